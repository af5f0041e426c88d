"""
tangency_extend.py - the extended transition matrix of an unfolded tangency.

Has the following functions:
- ExtensionSpec: base matrix H (order s) and transit lengths N1, N2.
- extend_matrix(spec): A of order s + l, l = N1 + N2 - 1.
- validate_markov_structure(A, spec): list of structural violations (empty when sound).
- perron_chain(A, spec, tol): spectral radii along the last-index principal minors.
- entropy_gap(spec, tol): log(lambda_mu) - log(lambda_0).
- relabel(H, entry, exit): move arbitrary exit/entry symbols to indices 1 and s.
- read_spec(path) / chain_to_frame(report): text formats.

Block layout of A (rectangles R_1..R_s first, then strips S_1..S_l):

    [ H             | e_1 e_1^T     ]
    [ e_l e_s^T     | superdiagonal ]

so R_1 feeds S_1, each strip feeds the next, and S_l re-enters R_s.
Indices in this module are 1-based where they name symbols.
"""

#####################################
# Import Modules
#####################################

# import from standard library
import math
import pathlib
from dataclasses import dataclass
from enum import Enum

# import external packages
import numpy as np
import pandas as pd
from dotenv import dotenv_values

# import from local modules
from symbolic.sft_core import (
    DEFAULT_TOL,
    TransitionMatrix,
    is_irreducible,
    principal_minor,
    read_matrix,
    spectral_radius,
)
from utils.utils_errors import ConfigError, InvalidSpecError
from utils.utils_logger import logger

__all__ = [
    "ExtensionSpec",
    "ViolationKind",
    "Violation",
    "ChainReport",
    "extend_matrix",
    "validate_markov_structure",
    "perron_chain",
    "entropy_gap",
    "strictness_margin",
    "relabel",
    "read_spec",
    "chain_to_frame",
]

#####################################
# Domain Types
#####################################


@dataclass(frozen=True)
class ExtensionSpec:
    """Base horseshoe matrix H plus the forward/backward transit lengths of the tangency orbit."""

    H: TransitionMatrix
    n1: int
    n2: int

    @property
    def s(self) -> int:
        return self.H.order

    @property
    def ell(self) -> int:
        return self.n1 + self.n2 - 1

    @property
    def order(self) -> int:
        return self.s + self.ell

    def validate(self) -> None:
        """
        Raises:
            InvalidSpecError: if s < 2, a transit length is not positive, or H is reducible.
        """
        if self.s < 2:
            raise InvalidSpecError(f"H must have order >= 2 so R_1 and R_s differ, got {self.s}")
        if self.n1 < 1 or self.n2 < 1:
            raise InvalidSpecError(f"N1 and N2 must be positive, got N1={self.n1}, N2={self.n2}")
        if not is_irreducible(self.H):
            raise InvalidSpecError("H is reducible; the basic set must be transitive")


class ViolationKind(str, Enum):
    ORDER_MISMATCH = "ORDER_MISMATCH"
    R_BLOCK_MISMATCH = "R_BLOCK_MISMATCH"
    MISSING_STRIP_ENTRY = "MISSING_STRIP_ENTRY"
    EXTRA_ENTRY_INTO_STRIPS = "EXTRA_ENTRY_INTO_STRIPS"
    BROKEN_CHAIN = "BROKEN_CHAIN"
    EXTRA_STRIP_TRANSITION = "EXTRA_STRIP_TRANSITION"
    MISSING_EXIT = "MISSING_EXIT"
    EXTRA_EXIT = "EXTRA_EXIT"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    row: int
    col: int
    detail: str


@dataclass(frozen=True)
class ChainReport:
    """Radii of A, A_1, ..., A_l where A_k drops the last k rows and columns."""

    radii: tuple[float, ...]
    strict_steps: tuple[bool, ...]
    conclusion: bool
    margin: float

    @property
    def non_increasing(self) -> bool:
        return all(b <= a + self.margin for a, b in zip(self.radii, self.radii[1:]))


#####################################
# Construction
#####################################


def extend_matrix(spec: ExtensionSpec) -> TransitionMatrix:
    """
    Build A_mu:
      a_ij = H_ij for i, j <= s
      a_{1,s+1} = 1          (R_1 enters the first strip)
      a_{i,i+1} = 1          for s+1 <= i <= s+l-1 (strip chain)
      a_{s+l,s} = 1          (last strip re-enters R_s)
    """
    spec.validate()
    s, ell = spec.s, spec.ell
    a = np.zeros((s + ell, s + ell), dtype=int)
    a[:s, :s] = spec.H.entries
    a[0, s] = 1
    for i in range(s, s + ell - 1):
        a[i, i + 1] = 1
    a[s + ell - 1, s - 1] = 1
    logger.debug(f"extended order-{s} H with l={ell} strips")
    return TransitionMatrix(a)


def relabel(H: TransitionMatrix, entry: int, exit: int) -> TransitionMatrix:
    """
    Permute symbols so `exit` becomes index 1 and `entry` becomes index s (1-based).

    The remaining symbols keep their relative order.
    """
    s = H.order
    if entry == exit or not (1 <= entry <= s and 1 <= exit <= s):
        raise InvalidSpecError(f"entry {entry} and exit {exit} must be distinct symbols in 1..{s}")
    rest = [i for i in range(1, s + 1) if i not in (entry, exit)]
    perm = [exit - 1] + [i - 1 for i in rest] + [entry - 1]
    return H.submatrix(perm)


#####################################
# Structural Validation
#####################################


def validate_markov_structure(A: TransitionMatrix, spec: ExtensionSpec) -> list[Violation]:
    """Check every block clause of the Markov partition layout; violations are returned, not raised."""
    s, ell = spec.s, spec.ell
    if A.order != s + ell:
        return [Violation(ViolationKind.ORDER_MISMATCH, 0, 0, f"expected order {s + ell}, got {A.order}")]

    a = A.entries
    found: list[Violation] = []

    # R-block equals H
    for i, j in zip(*np.nonzero(a[:s, :s] != spec.H.entries)):
        found.append(Violation(ViolationKind.R_BLOCK_MISMATCH, int(i) + 1, int(j) + 1, "R-block differs from H"))

    # only R_1 enters the strips, and only into S_1
    if a[0, s] != 1:
        found.append(Violation(ViolationKind.MISSING_STRIP_ENTRY, 1, s + 1, "R_1 must map into S_1"))
    for i in range(s):
        for j in range(s, s + ell):
            if a[i, j] == 1 and (i, j) != (0, s):
                found.append(
                    Violation(ViolationKind.EXTRA_ENTRY_INTO_STRIPS, i + 1, j + 1, "only R_1 may enter S_1")
                )

    # S_j -> S_{j+1} and nothing else
    for i in range(s, s + ell - 1):
        if a[i, i + 1] != 1:
            found.append(Violation(ViolationKind.BROKEN_CHAIN, i + 1, i + 2, "strip does not feed the next strip"))
        for j in range(s + ell):
            if a[i, j] == 1 and j != i + 1:
                found.append(
                    Violation(ViolationKind.EXTRA_STRIP_TRANSITION, i + 1, j + 1, "strip has a second successor")
                )

    # S_l -> R_s only
    last = s + ell - 1
    if a[last, s - 1] != 1:
        found.append(Violation(ViolationKind.MISSING_EXIT, last + 1, s, "last strip must re-enter R_s"))
    for j in range(s + ell):
        if a[last, j] == 1 and j != s - 1:
            found.append(Violation(ViolationKind.EXTRA_EXIT, last + 1, j + 1, "last strip meets more than R_s"))

    if found:
        logger.warning(f"{len(found)} Markov structure violations")
    return found


#####################################
# Perron-Frobenius Minor Chain
#####################################


def strictness_margin(tol: float) -> float:
    return max(10 * tol, 1e-9)


def perron_chain(A: TransitionMatrix, spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> ChainReport:
    """
    Spectral radii of the nested minors obtained by deleting the last row
    and column l times; the last minor is H.

    Only the first deletion is strict: A_mu is irreducible, while every
    later minor keeps a dangling strip chain and shares the radius of H.
    """
    margin = strictness_margin(tol)
    radii = [spectral_radius(A, tol).radius]
    current = A
    for _ in range(spec.ell):
        current = principal_minor(current, current.order)
        radii.append(spectral_radius(current, tol).radius)

    strict = tuple(a > b + margin for a, b in zip(radii, radii[1:]))
    conclusion = radii[0] > radii[-1] + margin
    logger.info(f"Perron chain over {spec.ell} deletions: lambda_mu={radii[0]:.12g}, lambda_0={radii[-1]:.12g}")
    return ChainReport(radii=tuple(radii), strict_steps=strict, conclusion=conclusion, margin=margin)


def entropy_gap(spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> float:
    """Certified entropy increase log(lambda_mu) - log(lambda_0) of the unfolded subsystem."""
    lam_mu = spectral_radius(extend_matrix(spec), tol).radius
    lam_0 = spectral_radius(spec.H, tol).radius
    return math.log(lam_mu) - math.log(lam_0)


#####################################
# Text Formats
#####################################


def read_spec(path: pathlib.Path) -> ExtensionSpec:
    """
    Read `H-file=...`, `N1=...`, `N2=...` lines. The H path is resolved
    relative to the spec file.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"spec file not found: {path}")
    values = dotenv_values(path)
    unknown = set(values) - {"H-file", "N1", "N2"}
    if unknown:
        raise ConfigError(f"unknown spec keys: {', '.join(sorted(unknown))}")
    try:
        h_path = (path.parent / values["H-file"]).resolve()
        n1, n2 = int(values["N1"]), int(values["N2"])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"spec file {path} needs H-file, N1 and N2: {e}") from e
    return ExtensionSpec(H=read_matrix(h_path), n1=n1, n2=n2)


def chain_to_frame(report: ChainReport) -> pd.DataFrame:
    """Columns step, radius, strict; step k is the minor with k deletions."""
    strict = [False, *report.strict_steps]
    return pd.DataFrame(
        {
            "step": range(len(report.radii)),
            "radius": report.radii,
            "strict": strict,
        }
    )
