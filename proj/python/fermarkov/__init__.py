"""Markov triplet analysis of states on finite CAR chains."""

from ._core import (
    CarAlgebra,
    FermarkovError,
    Regions,
    analyze,
    block_markov,
    decompose,
    factorize,
    is_sufficient,
    petz_apply,
    product_markov,
    random_state,
    rel_entropy,
    restrict_density,
    selftest,
    ssa_gap,
    vn_entropy,
)

__all__ = [
    "CarAlgebra",
    "FermarkovError",
    "Regions",
    "analyze",
    "block_markov",
    "decompose",
    "factorize",
    "is_sufficient",
    "petz_apply",
    "product_markov",
    "random_state",
    "rel_entropy",
    "restrict_density",
    "selftest",
    "ssa_gap",
    "vn_entropy",
]
