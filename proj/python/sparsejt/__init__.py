"""Exact marginal inference over sparse factor tables."""

from ._core import (
    Error,
    InconsistentEvidence,
    InvalidArgument,
    ParseError,
    ResourceLimit,
    Timeout,
    brute_force,
    infer,
    marginals_text,
    normalize_uai,
    sparsify,
)

__all__ = [
    "Error",
    "InconsistentEvidence",
    "InvalidArgument",
    "ParseError",
    "ResourceLimit",
    "Timeout",
    "brute_force",
    "infer",
    "marginals_text",
    "normalize_uai",
    "sparsify",
]
