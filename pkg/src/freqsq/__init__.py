"""Frequency squares F(m*lam; lam^m): constructions, balanced-diagonal search,
equivalence testing and theorem verification."""

from .constructions import (
    SamplerConfig,
    blow_up,
    delta_diagonal_sum,
    delta_value,
    make_A,
    make_B,
    merge_symbols,
    plex_to_balanced_diagonal,
    random_square,
    two_plex_of_B,
)
from .core import (
    Diagonal,
    FrequencySquare,
    PlexSelection,
    SymbolCounts,
    Transform,
    apply_transform,
    diagonal_counts,
    is_balanced,
    map_diagonal,
    validate,
)
from .equivalence import (
    EquivalenceCertificate,
    are_equivalent,
    canonical_key,
    is_equivalent_to_A,
)
from .search import (
    SearchOutcome,
    Status,
    constructive_m2,
    decompose_plex,
    find_balanced,
    find_exact,
    find_k_plex,
    find_pattern_2x2,
    swap_descent,
)

__all__ = [
    "Diagonal",
    "EquivalenceCertificate",
    "FrequencySquare",
    "PlexSelection",
    "SamplerConfig",
    "SearchOutcome",
    "Status",
    "SymbolCounts",
    "Transform",
    "apply_transform",
    "are_equivalent",
    "blow_up",
    "canonical_key",
    "constructive_m2",
    "decompose_plex",
    "delta_diagonal_sum",
    "delta_value",
    "diagonal_counts",
    "find_balanced",
    "find_exact",
    "find_k_plex",
    "find_pattern_2x2",
    "is_balanced",
    "is_equivalent_to_A",
    "make_A",
    "make_B",
    "map_diagonal",
    "merge_symbols",
    "plex_to_balanced_diagonal",
    "random_square",
    "swap_descent",
    "two_plex_of_B",
    "validate",
]
