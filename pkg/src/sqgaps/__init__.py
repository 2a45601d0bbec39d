"""Sieve constructions and gap statistics for sums of two coprime squares."""

from .analysis import compute_C, e_weight, f_rho, prob_subset
from .arith import PrimeClass, ResidueSystem, crt_combine, factorize, primes_up_to
from .construct import derive_params, run_pipeline, verify_certificate
from .membership import classify_range, is_in_R, is_in_S, max_gap, pair_bad

__all__ = [
    "PrimeClass",
    "ResidueSystem",
    "classify_range",
    "compute_C",
    "crt_combine",
    "derive_params",
    "e_weight",
    "f_rho",
    "factorize",
    "is_in_R",
    "is_in_S",
    "max_gap",
    "pair_bad",
    "primes_up_to",
    "prob_subset",
    "run_pipeline",
    "verify_certificate",
]
