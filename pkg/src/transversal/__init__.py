"""Transversal (rainbow) structures in collections of digraphs and bipartite graphs."""

from .errors import (
    BudgetExceededError,
    InstanceFormatError,
    InvalidArgumentError,
    InvalidWitnessError,
    InvariantViolation,
    ShapeError,
    TransversalError,
)
from .extremal import (
    CharacteristicPartition,
    ECKind,
    classify_extremal,
    gen_extremal,
    gen_tight_witness,
    is_eps_nice,
    is_eps_nice_bipartite,
    verify_partition,
)
from .kernels import backend
from .model import (
    BipartiteCollection,
    CertKind,
    Digraph,
    DigraphCollection,
    RainbowCertificate,
    characteristic_bipartite,
    collection_semi_degree,
    semi_degree,
    validate_certificate,
    validate_matching,
)
from .oracle import oracle_transversal_hamilton_cycle
from .solvers import (
    SearchConfig,
    SolveOutcome,
    Status,
    find_transversal_hamilton_cycle,
    find_transversal_hamilton_path,
    find_transversal_perfect_matching,
    max_rainbow_matching,
    rainbow_cycle_cover,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteCollection",
    "BudgetExceededError",
    "CertKind",
    "CharacteristicPartition",
    "Digraph",
    "DigraphCollection",
    "ECKind",
    "InstanceFormatError",
    "InvalidArgumentError",
    "InvalidWitnessError",
    "InvariantViolation",
    "RainbowCertificate",
    "SearchConfig",
    "ShapeError",
    "SolveOutcome",
    "Status",
    "TransversalError",
    "backend",
    "characteristic_bipartite",
    "classify_extremal",
    "collection_semi_degree",
    "find_transversal_hamilton_cycle",
    "find_transversal_hamilton_path",
    "find_transversal_perfect_matching",
    "gen_extremal",
    "gen_tight_witness",
    "is_eps_nice",
    "is_eps_nice_bipartite",
    "max_rainbow_matching",
    "oracle_transversal_hamilton_cycle",
    "rainbow_cycle_cover",
    "semi_degree",
    "validate_certificate",
    "validate_matching",
    "verify_partition",
]
