"""
charpoly_oracle.py - exact characteristic polynomial and Perron root isolation.

Has the following functions:
- characteristic_polynomial(entries): integer coefficients of det(xI - A), low degree first.
- real_root_intervals(coeffs): disjoint rational intervals, one around each real root.
- largest_real_root(coeffs, tol): largest real root, refined to width tol.
- perron_root_oracle(entries, tol): spectral radius of a nonnegative integer matrix.

The polynomial comes from sympy's exact Matrix.charpoly and the roots
from Poly.intervals / Poly.refine_root, which isolate over the rationals.
No floating point enters until the final midpoint, so this is the ground
truth the power-iteration kernel in sft_core is checked against.
"""

#####################################
# Import Modules
#####################################

# import external packages
import sympy

# import from local modules
from utils.utils_logger import logger

__all__ = [
    "characteristic_polynomial",
    "real_root_intervals",
    "largest_real_root",
    "perron_root_oracle",
]

X = sympy.Symbol("x")

#####################################
# Characteristic Polynomial
#####################################


def characteristic_polynomial(entries) -> list[int]:
    """
    Args:
        entries: square matrix of ints (nested lists or a numpy array).

    Returns:
        [c_0, c_1, ..., c_n] with det(xI - A) = sum c_k x^k and c_n = 1.
    """
    matrix = sympy.Matrix([[int(v) for v in row] for row in entries])
    if not matrix.is_square or matrix.rows == 0:
        raise ValueError(f"need a nonempty square matrix, got shape {matrix.shape}")
    return [int(c) for c in reversed(matrix.charpoly(X).all_coeffs())]


def _poly(coeffs: list[int]) -> sympy.Poly:
    poly = sympy.Poly([int(c) for c in reversed(coeffs)], X, domain="ZZ")
    if poly.is_zero or poly.degree() < 1:
        raise ValueError("constant polynomial has no roots")
    return poly


#####################################
# Root Isolation
#####################################


def real_root_intervals(coeffs: list[int]) -> list[tuple[sympy.Rational, sympy.Rational]]:
    """Isolating intervals of the distinct real roots, in increasing order."""
    return [interval for interval, _ in _poly(coeffs).sqf_part().intervals()]


def largest_real_root(coeffs: list[int], tol: float = 1e-12) -> float:
    """
    Largest real root of an integer polynomial, to within `tol`.

    Repeated roots are handled on the square-free part, which has the same
    roots, all simple.

    Raises:
        ValueError: if the polynomial is constant or has no real root.
    """
    square_free = _poly(coeffs).sqf_part()
    intervals = square_free.intervals()
    if not intervals:
        raise ValueError("polynomial has no real root")
    (lo, hi), _ = max(intervals, key=lambda item: item[0][1])
    if lo != hi:
        lo, hi = square_free.refine_root(lo, hi, eps=sympy.Rational(tol))
    logger.debug(f"largest of {len(intervals)} real roots isolated in [{float(lo)!r}, {float(hi)!r}]")
    return float((lo + hi) / 2)


def perron_root_oracle(entries, tol: float = 1e-12) -> float:
    """Spectral radius of a nonnegative integer matrix via its characteristic polynomial."""
    return largest_real_root(characteristic_polynomial(entries), tol)
