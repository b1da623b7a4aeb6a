from krylov.pcg import KrylovResult, lanczos_tridiagonal, pcg, ritz_values
from krylov.spectrum import explicit_spectrum, materialize

__all__ = ["KrylovResult", "explicit_spectrum", "lanczos_tridiagonal", "materialize", "pcg", "ritz_values"]
