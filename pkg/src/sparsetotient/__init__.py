"""Sparsely totient numbers: exact oracle, explicit families, witnesses and scans."""

from .core import DEFAULT_LIMIT, SparseTotientOracle, get_oracle, question2_table
from .errors import LimitError, PreconditionError, ResourceError, SparseTotientError, UnsupportedInputError
from .families import in_e2, in_e3, primorial_element, scan_fractional, thm3_classify, x_np, y_pk
from .primes import build_prime_table, is_prime, next_prime
from .totient import Factorization, build_totient_table, factorize, search_bound

__all__ = [
    "DEFAULT_LIMIT",
    "Factorization",
    "LimitError",
    "PreconditionError",
    "ResourceError",
    "SparseTotientError",
    "SparseTotientOracle",
    "UnsupportedInputError",
    "build_prime_table",
    "build_totient_table",
    "factorize",
    "get_oracle",
    "in_e2",
    "in_e3",
    "is_prime",
    "next_prime",
    "primorial_element",
    "question2_table",
    "scan_fractional",
    "search_bound",
    "thm3_classify",
    "x_np",
    "y_pk",
]
