"""
entropy_estimate.py - numerical entropy estimates and closed-form bounds.

Has the following functions:
- separated_entropy(map, n, epsilon, grid, tail): (n, eps)-separated growth estimate.
- separated_subset(orbits, epsilon): greedy maximal separated subset of orbit segments.
- growth_rate(map, n, grid, tail): R(f), the growth rate of max ||Df^m||.
- yomdin_defect(rate, dim_m, k): alpha_k = (2 dim_m / k) R.
- snake_bound(lambda_p, mu_p, tau_p, eps): entropy created by a snake perturbation.
- variation_verdict(pieces, index, alpha_k) / applicable_verdicts(...): does entropy vary?
- sphere_snake_example(eps): the sphere example, bound arithmetic only.
- newhouse_interpretation(estimate): what a separated-set estimate does and does not bound.
- estimate_to_frame(estimate): CSV rows m, cardinality, rate plus the estimate row.

Separated sets. The sample starts as a lattice: `curves` columns per
transverse axis, each holding resolution + 1 points spaced along y across
the sampling box. Only orbits that stay in the box (and the domain) count,
so the box plays the part of the isolating neighbourhood of the invariant
set. Before r(m, eps) is taken, every column is refined at time m - 1 by
bisecting its parameter until neighbouring live images are at most epsilon
apart; a lattice that is not refined is already epsilon-separated at time 0
and its count stops growing. r(m, eps) is then the size of a greedy subset
of the live sample that is pairwise (m, epsilon)-separated in the Bowen
metric max_{i < m} |f^i x - f^i y|.

Close pairs are found with a Chebyshev cKDTree over whole orbit windows, one
block of the y coordinate at a time, and checked exactly before the scan.
The estimate is the least-squares slope of log r(m, eps) against m over the
tail window, floored at 0.
"""

#####################################
# Import Modules
#####################################

# import from standard library
import dataclasses
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

# import external packages
import numpy as np
import pandas as pd
from scipy.spatial import cKDTree
from scipy.stats import linregress

# import from local modules
from maps.smooth_maps import SmoothMap
from utils.utils_errors import GridTooCoarseError, InvalidEigenvaluesError, OverflowGuardError
from utils.utils_logger import logger

__all__ = [
    "SamplingGrid",
    "EntropyEstimate",
    "GrowthRate",
    "Verdict",
    "SnakeExample",
    "separated_entropy",
    "separated_subset",
    "growth_rate",
    "yomdin_defect",
    "snake_bound",
    "variation_verdict",
    "applicable_verdicts",
    "sphere_snake_example",
    "newhouse_interpretation",
    "estimate_to_frame",
]

MIN_PARAMETER_WIDTH = 1e-12
BOX_TOL = 1e-12
PAIR_BLOCKS = 64
OVERFLOW_LIMIT = 1e300
MAX_ATTAINED_TOL = 1e-12

#####################################
# Domain Types
#####################################


@dataclass(frozen=True)
class SamplingGrid:
    """
    How estimators sample a map.

    resolution: lattice cells along y per column, and lattice points per axis for growth_rate.
    curves: columns along every other axis of positive extent.
    box: (lo, hi) corners; defaults to the map's core box.
    max_points: refinement budget per column.
    """

    resolution: int = 400
    curves: int = 2
    box: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    max_points: int = 8_000_000

    def bounds(self, m: SmoothMap) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.box if self.box is not None else m.core_box
        return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)

    def positions(self, lo: float, hi: float) -> np.ndarray:
        """Cell centers along one axis, or the single level when the extent is 0."""
        if hi <= lo:
            return np.array([lo])
        return lo + (np.arange(self.curves) + 0.5) * (hi - lo) / self.curves

    def covering(self, m: SmoothMap) -> "SamplingGrid":
        """The same y spacing laid over the bounding box of the whole domain."""
        lo, hi = self.bounds(m)
        center = np.asarray(m.domain.center, dtype=float)
        box_lo, box_hi = center - m.domain.radius, center + m.domain.radius
        spacing = (hi[1] - lo[1]) / self.resolution
        resolution = math.ceil((box_hi[1] - box_lo[1]) / spacing - 1e-9)
        return dataclasses.replace(
            self,
            resolution=resolution,
            box=(tuple(float(v) for v in box_lo), tuple(float(v) for v in box_hi)),
        )


@dataclass(frozen=True)
class EntropyEstimate:
    """cardinalities are non-decreasing in m; sampled counts the live orbits behind each one."""

    value: float
    n: int
    epsilon: float
    cardinalities: tuple[int, ...]
    sampled: tuple[int, ...] = ()
    method: str = "separated-sets"


@dataclass(frozen=True)
class GrowthRate:
    """value is the tail slope of max log ||Df^m||; residual is the fit's standard error."""

    value: float
    samples: tuple[tuple[int, float], ...]
    residual: float


class Verdict(str, Enum):
    VARIES = "VARIES"
    CONSTANT_CINF = "CONSTANT_CINF"
    CONSTANT_CK = "CONSTANT_CK"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class SnakeExample:
    horseshoe_entropy: float
    snake_bound: float
    increases: bool


#####################################
# Tail Fits
#####################################


def _tail_slope(ms: np.ndarray, values: np.ndarray, tail: float):
    if not 0.0 <= tail < 1.0:
        raise ValueError(f"tail window must lie in [0, 1), got {tail}")
    n = int(ms[-1])
    start = max(1, math.ceil(tail * n))
    start = min(start, n - 1)
    window = ms >= start
    return linregress(ms[window], values[window])


#####################################
# Separated Sets
#####################################


@dataclass
class _Column:
    """One lattice column: parameters in [0, 1], their images now, and which orbits stayed in the box."""

    start: np.ndarray
    end: np.ndarray
    params: np.ndarray
    images: np.ndarray
    alive: np.ndarray

    def seed(self, s: np.ndarray) -> np.ndarray:
        return self.start + s[:, None] * (self.end - self.start)


def _seed_segments(m: SmoothMap, grid: SamplingGrid) -> list[tuple[np.ndarray, np.ndarray]]:
    lo, hi = grid.bounds(m)
    other_axes = [axis for axis in range(m.dim) if axis != 1]
    levels = [grid.positions(lo[axis], hi[axis]) for axis in other_axes]
    segments = []
    for combo in itertools.product(*levels):
        start = np.empty(m.dim)
        start[other_axes] = combo
        end = start.copy()
        start[1], end[1] = lo[1], hi[1]
        segments.append((start, end))
    return segments


def _membership(m: SmoothMap, lo: np.ndarray, hi: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    def inside(points: np.ndarray) -> np.ndarray:
        in_box = np.all((points >= lo - BOX_TOL) & (points <= hi + BOX_TOL), axis=1)
        return in_box & m.domain.contains(points, tol=BOX_TOL)

    return inside


def _track(m: SmoothMap, points: np.ndarray, steps: int, inside) -> tuple[np.ndarray, np.ndarray]:
    """Images after `steps` iterations and whether every iterate on the way stayed inside."""
    alive = inside(points)
    for _ in range(steps):
        points = m.evaluate(points)
        alive &= inside(points)
    return points, alive


def _trajectories(m: SmoothMap, points: np.ndarray, length: int) -> np.ndarray:
    """Orbit windows x, f(x), ..., f^{length-1}(x) as a (count, length, d) array."""
    paths = np.empty((len(points), length, points.shape[1]))
    paths[:, 0] = points
    for i in range(1, length):
        paths[:, i] = m.evaluate(paths[:, i - 1])
    return paths


def _bowen_close(first: np.ndarray, second: np.ndarray, epsilon: float) -> np.ndarray:
    return np.linalg.norm(first - second, axis=-1).max(axis=-1) < epsilon


def _close_pairs(trajectories: Callable[[np.ndarray], np.ndarray], key: np.ndarray, epsilon: float) -> np.ndarray:
    """
    All index pairs (a, b), a < b, at Bowen distance below epsilon.

    Points are cut into blocks of `key` (a time-0 coordinate) at least
    epsilon wide, so a close pair lies in one block or in two neighbours.
    Each block gets a Chebyshev cKDTree over its flattened orbit windows,
    which returns a superset of the close pairs; the Euclidean check on
    every time step then decides.
    """
    if len(key) < 2:
        return np.empty((0, 2), dtype=np.int64)
    order = np.argsort(key, kind="stable")
    ordered = key[order]
    width = max(epsilon, float(ordered[-1] - ordered[0]) / PAIR_BLOCKS)
    blocks = np.floor((ordered - ordered[0]) / width).astype(np.int64)
    cuts = np.flatnonzero(np.diff(blocks)) + 1
    block_ids = blocks[np.concatenate(([0], cuts))]

    found = [np.empty((0, 2), dtype=np.int64)]
    previous = None
    for block, members in zip(block_ids, np.split(order, cuts)):
        paths = trajectories(members)
        tree = cKDTree(paths.reshape(len(members), -1))
        local = tree.query_pairs(epsilon, p=np.inf, output_type="ndarray")
        if len(local):
            close = _bowen_close(paths[local[:, 0]], paths[local[:, 1]], epsilon)
            found.append(members[local[close]])
        if previous is not None and previous[0] == block - 1:
            _, other_members, other_paths, other_tree = previous
            cross = tree.sparse_distance_matrix(other_tree, epsilon, p=np.inf, output_type="ndarray")
            if len(cross):
                mine, theirs = cross["i"].astype(np.int64), cross["j"].astype(np.int64)
                close = _bowen_close(paths[mine], other_paths[theirs], epsilon)
                found.append(np.column_stack((members[mine[close]], other_members[theirs[close]])))
        previous = (block, members, paths, tree)
    return np.sort(np.concatenate(found), axis=1)


def _greedy_scan(count: int, pairs: np.ndarray) -> np.ndarray:
    """Scan indices 0..count-1 in order; keep one unless a kept earlier index is paired with it."""
    first, second = pairs[:, 0], pairs[:, 1]
    order = np.argsort(first, kind="stable")
    bounds = np.searchsorted(first[order], np.arange(count + 1)).tolist()
    later = second[order].tolist()
    covered = bytearray(count)
    kept = []
    for k in range(count):
        if covered[k]:
            continue
        kept.append(k)
        for j in later[bounds[k] : bounds[k + 1]]:
            covered[j] = 1
    return np.array(kept, dtype=np.int64)


def separated_subset(orbits: np.ndarray, epsilon: float) -> np.ndarray:
    """
    Indices of a greedy maximal (m, epsilon)-separated subset.

    orbits has shape (count, m, d), one orbit window per row. Rows are
    scanned in order and a row is kept when its Bowen distance to every
    kept row is at least epsilon.
    """
    orbits = np.asarray(orbits, dtype=float)
    if orbits.ndim != 3:
        raise ValueError(f"orbits must have shape (count, m, d), got {orbits.shape}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    key = orbits[:, 0, min(1, orbits.shape[2] - 1)]
    return _greedy_scan(len(orbits), _close_pairs(lambda idx: orbits[idx], key, epsilon))


def _refine(m: SmoothMap, column: _Column, step: int, epsilon: float, grid: SamplingGrid, inside) -> None:
    """Bisect until live neighbours are at most epsilon apart at time `step`."""
    while True:
        gaps = np.linalg.norm(np.diff(column.images, axis=0), axis=1)
        touches_live = column.alive[:-1] | column.alive[1:]
        wide = np.diff(column.params) > MIN_PARAMETER_WIDTH
        bad = np.flatnonzero(touches_live & wide & (gaps > epsilon))
        if bad.size == 0:
            return
        if len(column.params) + bad.size > grid.max_points:
            logger.error(f"{m.name}: refinement needs more than {grid.max_points} points at step {step}")
            raise GridTooCoarseError(
                f"refinement at step {step} exceeds max_points={grid.max_points}; lower n or raise epsilon"
            )
        mids = 0.5 * (column.params[bad] + column.params[bad + 1])
        images, alive = _track(m, column.seed(mids), step, inside)
        column.params = np.insert(column.params, bad + 1, mids)
        column.images = np.insert(column.images, bad + 1, images, axis=0)
        column.alive = np.insert(column.alive, bad + 1, alive)


def _advance(m: SmoothMap, column: _Column, inside) -> None:
    if len(column.params) == 0:
        return
    column.images = m.evaluate(column.images)
    column.alive = column.alive & inside(column.images)
    # a dead point only matters as the end of a gap next to a live one
    keep = column.alive.copy()
    keep[1:] |= column.alive[:-1]
    keep[:-1] |= column.alive[1:]
    column.params = column.params[keep]
    column.images = column.images[keep]
    column.alive = column.alive[keep]


def separated_entropy(
    m: SmoothMap,
    n: int,
    epsilon: float,
    grid: SamplingGrid | None = None,
    tail: float = 0.5,
) -> EntropyEstimate:
    """
    Growth rate of greedy (m, epsilon)-separated cardinalities for m = 1..n.

    A set separated for m steps stays separated for m + 1, so the reported
    cardinalities are the running maximum of the greedy counts. The result
    is a lower-bound proxy: it never certifies an upper bound on the
    topological entropy.

    Raises:
        GridTooCoarseError: if the y spacing exceeds epsilon, no seed starts
            inside the domain, or the refinement budget runs out.
    """
    grid = grid or SamplingGrid()
    if n < 2:
        raise ValueError(f"orbit length must be at least 2, got {n}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    lo, hi = grid.bounds(m)
    if grid.resolution < 2:
        raise GridTooCoarseError(f"grid resolution {grid.resolution} is below 2")
    spacing = (hi[1] - lo[1]) / grid.resolution
    if spacing > epsilon * (1.0 + 1e-9):
        raise GridTooCoarseError(f"seed spacing {spacing:.6g} exceeds epsilon {epsilon:.6g}")

    inside = _membership(m, lo, hi)
    columns = []
    for start, end in _seed_segments(m, grid):
        params = np.linspace(0.0, 1.0, grid.resolution + 1)
        column = _Column(start, end, params, images=np.empty((0, m.dim)), alive=np.empty(0, dtype=bool))
        column.images = column.seed(params)
        column.alive = inside(column.images)
        columns.append(column)
    if not any(column.alive.any() for column in columns):
        raise GridTooCoarseError(f"no seed of the sampling box lies in the domain of {m.name}")

    counts, sampled = [], []
    for step in range(n):
        for column in columns:
            _refine(m, column, step, epsilon, grid, inside)
        seeds = np.concatenate([column.seed(column.params[column.alive]) for column in columns])
        if len(seeds):
            pairs = _close_pairs(lambda idx: _trajectories(m, seeds[idx], step + 1), seeds[:, 1], epsilon)
            counts.append(len(_greedy_scan(len(seeds), pairs)))
        else:
            counts.append(0)
        sampled.append(len(seeds))
        logger.debug(f"{m.name}: m={step + 1}, {len(seeds)} live orbits, {counts[-1]} separated")
        if step + 1 < n:
            for column in columns:
                _advance(m, column, inside)

    cardinalities = np.maximum.accumulate(np.array(counts, dtype=np.int64))
    ms = np.arange(1, n + 1)
    fit = _tail_slope(ms, np.log(cardinalities.astype(float)), tail)
    value = max(0.0, float(fit.slope))
    logger.info(f"{m.name}: separated-set entropy {value:.6g} (n={n}, eps={epsilon:g})")
    return EntropyEstimate(
        value=value,
        n=n,
        epsilon=epsilon,
        cardinalities=tuple(int(c) for c in cardinalities),
        sampled=tuple(sampled),
    )


#####################################
# Derivative Growth
#####################################


def _lattice(m: SmoothMap, grid: SamplingGrid) -> np.ndarray:
    lo, hi = grid.bounds(m)
    axes = [np.linspace(lo[0], hi[0], grid.resolution), np.linspace(lo[1], hi[1], grid.resolution)]
    if m.dim == 3:
        axes.append(grid.positions(lo[2], hi[2]))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([axis.ravel() for axis in mesh])


def growth_rate(m: SmoothMap, n: int, grid: SamplingGrid | None = None, tail: float = 0.5) -> GrowthRate:
    """
    R(f) from Jacobian products along lattice orbits.

    Products are renormalized every step and their scale kept as a log, so
    nothing overflows however long the orbit.

    Raises:
        OverflowGuardError: if a single step produces a norm above 1e300.
    """
    grid = grid or SamplingGrid()
    if n < 4:
        raise ValueError(f"growth rate needs n >= 4, got {n}")
    points = _lattice(m, grid)
    count = len(points)
    product = np.tile(np.eye(m.dim), (count, 1, 1))
    log_scale = np.zeros(count)

    samples = []
    for step in range(1, n + 1):
        product = m.jacobian(points) @ product
        norms = np.linalg.norm(product, ord=2, axis=(1, 2))
        if not np.all(np.isfinite(norms)) or norms.max() > OVERFLOW_LIMIT:
            logger.error(f"{m.name}: derivative norm overflow at step {step}")
            raise OverflowGuardError(f"derivative norm exceeds {OVERFLOW_LIMIT:g} at step {step}")
        with np.errstate(divide="ignore"):
            log_scale = log_scale + np.log(norms)
        product = product / np.where(norms > 0, norms, 1.0)[:, None, None]
        samples.append((step, float(log_scale.max())))
        points = m.evaluate(points)

    ms = np.array([s for s, _ in samples])
    fit = _tail_slope(ms, np.array([v for _, v in samples]), tail)
    value = max(0.0, float(fit.slope))
    logger.info(f"{m.name}: growth rate R = {value:.6g} over {count} lattice orbits")
    return GrowthRate(value=value, samples=tuple(samples), residual=float(fit.stderr))


#####################################
# Closed-Form Bounds
#####################################


def yomdin_defect(rate, dim_m: int, k: int) -> float:
    """alpha_k = (2 dim_m / k) R, the largest entropy jump a C^k limit can hide."""
    if k < 1:
        raise ValueError(f"smoothness k must be at least 1, got {k}")
    if dim_m not in (2, 3):
        raise ValueError(f"manifold dimension must be 2 or 3, got {dim_m}")
    value = rate.value if isinstance(rate, GrowthRate) else float(rate)
    return (2.0 * dim_m / k) * value


def snake_bound(lambda_p: float, mu_p: float | None = None, tau_p: int = 1, eps: float = 0.0) -> float:
    """
    (1/tau) log lambda_eff - eps.

    lambda_eff is lambda_p for a conservative saddle (mu_p absent) and
    min(lambda_p, 1/mu_p) otherwise.

    Raises:
        InvalidEigenvaluesError: if the eigenvalues do not describe a saddle.
    """
    if lambda_p <= 1.0:
        raise InvalidEigenvaluesError(f"unstable eigenvalue must exceed 1, got {lambda_p}")
    if mu_p is not None and not 0.0 < mu_p < 1.0:
        raise InvalidEigenvaluesError(f"stable eigenvalue must lie in (0, 1), got {mu_p}")
    if tau_p < 1:
        raise ValueError(f"period must be a positive integer, got {tau_p}")
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    lambda_eff = lambda_p if mu_p is None else min(lambda_p, 1.0 / mu_p)
    return math.log(lambda_eff) / tau_p - eps


#####################################
# Verdicts
#####################################


def applicable_verdicts(pieces: list[float], index: int, alpha_k: float) -> set[Verdict]:
    """Every conclusion that holds; VARIES excludes the constant ones."""
    if not pieces:
        raise ValueError("need at least one piece entropy")
    if not 0 <= index < len(pieces):
        raise ValueError(f"tangency index {index} out of range for {len(pieces)} pieces")
    top = max(pieces)
    if pieces[index] >= top - MAX_ATTAINED_TOL:
        return {Verdict.VARIES}
    found = {Verdict.CONSTANT_CINF}
    if top - pieces[index] > alpha_k:
        found.add(Verdict.CONSTANT_CK)
    return found


def variation_verdict(pieces: list[float], index: int, alpha_k: float) -> Verdict:
    """
    VARIES when the tangency piece carries the entropy. Otherwise alpha_k = 0
    stands for the C-infinity case; for alpha_k > 0 the gap must beat it.
    """
    found = applicable_verdicts(pieces, index, alpha_k)
    if Verdict.VARIES in found:
        return Verdict.VARIES
    if alpha_k == 0:
        return Verdict.CONSTANT_CINF
    if Verdict.CONSTANT_CK in found:
        return Verdict.CONSTANT_CK
    return Verdict.UNDECIDED


def sphere_snake_example(eps: float = 0.01) -> SnakeExample:
    """A log 2 horseshoe next to a saddle with eigenvalue 3: a snake perturbation raises entropy."""
    base = math.log(2.0)
    bound = snake_bound(3.0, None, 1, eps)
    return SnakeExample(horseshoe_entropy=base, snake_bound=bound, increases=bound > base)


def newhouse_interpretation(estimate: EntropyEstimate) -> str:
    return (
        f"h(f) <= r({estimate.epsilon:g}, f) + h_loc({estimate.epsilon:g}, f). "
        f"The separated-set value {estimate.value:.6g} bounds r(eps, f) from below only; "
        "local entropy is not estimated, so no upper bound on h(f) follows."
    )


#####################################
# Tables
#####################################


def estimate_to_frame(estimate: EntropyEstimate) -> pd.DataFrame:
    """One row per m with log r(m, eps) / m, then an `estimate` row."""
    ms = np.arange(1, estimate.n + 1)
    counts = np.array(estimate.cardinalities)
    frame = pd.DataFrame(
        {
            "m": [str(m) for m in ms],
            "cardinality": [str(c) for c in counts],
            "rate": np.log(counts.astype(float)) / ms,
        }
    )
    final = pd.DataFrame({"m": ["estimate"], "cardinality": [""], "rate": [estimate.value]})
    return pd.concat([frame, final], ignore_index=True)
