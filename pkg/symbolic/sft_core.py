"""
sft_core.py - subshift of finite type algebra.

Has the following functions:
- TransitionMatrix: immutable 0-1 matrix with text serialization.
- is_irreducible(A): strong connectivity of the transition graph.
- spectral_radius(A, tol): Perron root by shifted power iteration, checked
  against the exact characteristic polynomial for small orders.
- decompose(A, tol): recurrent strongly connected components and their entropies.
- principal_minor(A, drop_index): delete one row and column (1-based index).
- full_shift(n): the all-ones matrix of the full n-shift.
- read_matrix(path) / write_matrix(A, path): the matrix text format.

Matrix text format: the first line holds the order, then one line per row
of space-separated 0/1 entries.

Entropies use the natural logarithm.
"""

#####################################
# Import Modules
#####################################

# import from standard library
import math
import pathlib
from dataclasses import dataclass, field

# import external packages
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

# import from local modules
from symbolic.charpoly_oracle import perron_root_oracle
from utils.utils_errors import ConfigError, IndexOutOfRangeError, NonConvergenceError
from utils.utils_logger import logger

__all__ = [
    "TransitionMatrix",
    "SpectralResult",
    "Component",
    "ComponentDecomposition",
    "is_irreducible",
    "spectral_radius",
    "decompose",
    "principal_minor",
    "full_shift",
    "read_matrix",
    "write_matrix",
]

DEFAULT_TOL = 1e-12
MAX_ITERATIONS = 1_000_000
ORACLE_MAX_ORDER = 8
ORACLE_AGREEMENT = 1e-9

#####################################
# Domain Types
#####################################


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Square 0-1 matrix; a_ij = 1 when symbol i may be followed by symbol j."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"transition matrix must be square with order >= 1, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("transition matrix entries must be 0 or 1")
        arr = arr.astype(np.int8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def order(self) -> int:
        return int(self.entries.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.order, self.entries.tobytes()))

    def __repr__(self) -> str:
        rows = ",".join("(" + ",".join(str(int(v)) for v in row) + ")" for row in self.entries)
        return f"TransitionMatrix[{self.order}]({rows})"

    def graph(self) -> csr_matrix:
        """Sparse adjacency matrix of the transition graph."""
        return csr_matrix(self.entries)

    def submatrix(self, indices) -> "TransitionMatrix":
        """Induced matrix on the given 0-based symbol indices."""
        idx = np.asarray(indices, dtype=int)
        return TransitionMatrix(self.entries[np.ix_(idx, idx)])

    def to_text(self) -> str:
        lines = [str(self.order)]
        lines.extend(" ".join(str(int(v)) for v in row) for row in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TransitionMatrix":
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        try:
            order = int(lines[0])
            rows = [[int(tok) for tok in line.split()] for line in lines[1:]]
        except (IndexError, ValueError) as e:
            raise ConfigError(f"malformed matrix text: {e}") from e
        if len(rows) != order or any(len(row) != order for row in rows):
            raise ConfigError(f"matrix text declares order {order} but holds {len(rows)} rows")
        try:
            return cls(np.array(rows, dtype=int))
        except ValueError as e:
            raise ConfigError(str(e)) from e


@dataclass(frozen=True)
class SpectralResult:
    """Perron root and entropy; degenerate marks the nilpotent case (radius 0, entropy 0)."""

    radius: float
    entropy: float
    iterations: int
    residual: float
    degenerate: bool = False
    oracle_radius: float | None = None


@dataclass(frozen=True)
class Component:
    """A recurrent strongly connected component (0-based symbol indices)."""

    indices: tuple[int, ...]
    matrix: TransitionMatrix


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple[Component, ...] = field(default_factory=tuple)
    component_entropies: tuple[float, ...] = field(default_factory=tuple)
    max_entropy: float = 0.0
    responsible_index: int | None = None


#####################################
# Graph Structure
#####################################


def is_irreducible(A: TransitionMatrix) -> bool:
    """True iff the transition graph is strongly connected (a lone symbol needs its self-loop)."""
    if A.order == 1:
        return bool(A.entries[0, 0] == 1)
    n_components, _ = connected_components(A.graph(), directed=True, connection="strong")
    return n_components == 1


def _is_nilpotent(A: TransitionMatrix) -> bool:
    # A^order = 0, tracked on the boolean pattern so nothing overflows
    base = A.entries.astype(np.int64)
    power = base.copy()
    for _ in range(A.order - 1):
        power = ((power @ base) > 0).astype(np.int64)
        if not power.any():
            return True
    return not power.any()


def _recurrent_components(A: TransitionMatrix) -> list[tuple[int, ...]]:
    _, labels = connected_components(A.graph(), directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for symbol, label in enumerate(labels):
        groups.setdefault(int(label), []).append(symbol)
    recurrent = [
        tuple(members)
        for members in groups.values()
        if len(members) > 1 or A.entries[members[0], members[0]] == 1
    ]
    return sorted(recurrent, key=lambda members: members[0])


#####################################
# Spectral Radius
#####################################


def _power_iteration(entries: np.ndarray, tol: float, max_iterations: int) -> tuple[float, int, float]:
    """
    Power iteration on A + I.

    The identity shift makes an irreducible matrix primitive, so periodic
    shifts converge instead of oscillating. The residual is relative to
    the current eigenvalue estimate.
    """
    n = entries.shape[0]
    shifted = entries.astype(float) + np.eye(n)
    x = np.full(n, 1.0 / math.sqrt(n))
    residual = math.inf
    for iteration in range(1, max_iterations + 1):
        y = shifted @ x
        lam = float(x @ y)
        residual = float(np.linalg.norm(y - lam * x)) / lam
        x = y / np.linalg.norm(y)
        if residual <= tol:
            return lam - 1.0, iteration, residual
        if iteration % 100_000 == 0:
            logger.debug(f"power iteration at {iteration}, residual {residual:.3e}")
    raise NonConvergenceError(
        f"power iteration did not reach tol={tol:g} within {max_iterations} iterations "
        f"(order {n}, last residual {residual:.3e})"
    )


def spectral_radius(
    A: TransitionMatrix,
    tol: float = DEFAULT_TOL,
    max_iterations: int = MAX_ITERATIONS,
    oracle_max_order: int = ORACLE_MAX_ORDER,
) -> SpectralResult:
    """
    Largest eigenvalue modulus of A and the entropy log(radius).

    Nilpotent matrices come back with radius 0, entropy 0 and degenerate=True.
    Reducible matrices are solved block by block: the Perron root of a
    nonnegative matrix is the largest Perron root of its irreducible
    diagonal blocks. For order <= oracle_max_order the result must agree
    with the integer characteristic polynomial to 1e-9.

    Raises:
        NonConvergenceError: if power iteration misses tol or disagrees with the oracle.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    if _is_nilpotent(A):
        logger.debug(f"order-{A.order} matrix is nilpotent; entropy 0")
        return SpectralResult(radius=0.0, entropy=0.0, iterations=0, residual=0.0, degenerate=True)

    if is_irreducible(A):
        radius, iterations, residual = _power_iteration(A.entries, tol, max_iterations)
    else:
        radius, iterations, residual = 0.0, 0, 0.0
        for members in _recurrent_components(A):
            block = spectral_radius(A.submatrix(members), tol, max_iterations, oracle_max_order=0)
            iterations += block.iterations
            if block.radius > radius:
                radius, residual = block.radius, block.residual

    oracle = None
    if A.order <= oracle_max_order:
        oracle = perron_root_oracle(A.entries, tol=min(tol, DEFAULT_TOL))
        if abs(oracle - radius) > max(ORACLE_AGREEMENT, 10 * tol):
            logger.error(f"power iteration {radius!r} disagrees with characteristic polynomial {oracle!r}")
            raise NonConvergenceError(
                f"power iteration radius {radius:.15g} differs from exact root {oracle:.15g}"
            )

    # a radius within tolerance of 1 is a union of cycles; log would leave -1e-16 behind
    entropy = 0.0 if abs(radius - 1.0) <= 10 * tol else math.log(radius)
    return SpectralResult(
        radius=radius,
        entropy=entropy,
        iterations=iterations,
        residual=residual,
        oracle_radius=oracle,
    )


#####################################
# Component Decomposition
#####################################


def decompose(A: TransitionMatrix, tol: float = DEFAULT_TOL) -> ComponentDecomposition:
    """
    Split the recurrent symbols into strongly connected components.

    Only components carrying at least one edge are kept; wandering symbols
    belong to none. max_entropy equals the entropy of A itself.
    """
    components = []
    entropies = []
    for members in _recurrent_components(A):
        sub = A.submatrix(members)
        components.append(Component(indices=members, matrix=sub))
        entropies.append(spectral_radius(sub, tol).entropy)

    if not components:
        return ComponentDecomposition()

    max_entropy = max(entropies)
    responsible = entropies.index(max_entropy)
    logger.debug(f"{len(components)} recurrent components, max entropy {max_entropy:.6g} at {responsible}")
    return ComponentDecomposition(
        components=tuple(components),
        component_entropies=tuple(entropies),
        max_entropy=max_entropy,
        responsible_index=responsible,
    )


#####################################
# Minors and Constructors
#####################################


def principal_minor(A: TransitionMatrix, drop_index: int) -> TransitionMatrix:
    """Remove row and column `drop_index` (1-based)."""
    if A.order < 2 or not 1 <= drop_index <= A.order:
        raise IndexOutOfRangeError(f"cannot drop index {drop_index} from an order-{A.order} matrix")
    keep = [i for i in range(A.order) if i != drop_index - 1]
    return A.submatrix(keep)


def full_shift(n: int) -> TransitionMatrix:
    """Transition matrix of the full n-shift; its entropy is log n."""
    return TransitionMatrix(np.ones((n, n), dtype=int))


#####################################
# File I/O
#####################################


def read_matrix(path: pathlib.Path) -> TransitionMatrix:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"matrix file not found: {path}")
    logger.info(f"Reading transition matrix from {path}")
    return TransitionMatrix.from_text(path.read_text())


def write_matrix(A: TransitionMatrix, path: pathlib.Path) -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(A.to_text())
    logger.info(f"Wrote order-{A.order} transition matrix to {path}")
    return path
