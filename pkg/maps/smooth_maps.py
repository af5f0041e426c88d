"""
smooth_maps.py - explicit map families on the disc and on the 3-ball.

Has the following functions:
- model_horseshoe(): two-legged horseshoe on the unit disc, entropy log 2.
- alpha(t, p): the isotopy shift ((2/3)x, (1-t)y - (5/3)t).
- epsilon_zero(): smallest grid t pushing alpha_t(D) below the x-axis, plus margin.
- isotopy_map(t, base): the slice map f~_t acting on D_t.
- flow(tau, points): time-tau map of the pole-to-pole flow on the ball.
- family_G(tau, base): G_tau = phi_tau o F on the closed unit ball.
- restrict_to_slice(G, z): same map, seeds confined to the disc z = const.
- linear_map(matrix): a constant-Jacobian planar map.
- find_fixed_points(map, seeds, tol): bounded least-squares search for fixed points.
- orbit(map, p, n) / orbit_to_frame(points): orbit dumps (step, x, y[, z]).
- get_family(name, **params): registry for "horseshoe", "isotopy", "ball3".

Horseshoe model. The core square Q = [-q, q] x [Y0 - q, Y0 + q] sits in the
upper half of the disc; in square coordinates u = x/q, v = (y - Y0)/q it is cut
by the lines v = 1/3 and v = -1/3:
  upper leg  v in [1/3, 1]:   (u, v) -> (u/3 - 2/3, 3v - 2)
  lower leg  v in [-1, -1/3]: (u, v) -> (-u/3 + 2/3, -3v - 2)
  middle band: a half-annulus below Q joining the two legs
Everything past a collar of width SINK_COLLAR around Q contracts by SINK_RATE
towards SINK_CENTER, high in the upper half of the disc, and the sink sends
the whole disc above the collar. The fold hands over to the legs within
BAND_BLEND of the band edges, and the square map hands over to the sink
across the collar, both with a flat C-infinity step, so the map is
C-infinity on the whole disc and affine on the two legs. The middle band
lands strictly below Q, and every point below or above Q is sent above it,
so an orbit that leaves Q never comes back and the maximal invariant set in
Q is the full 2-shift. The lower half of the disc is pure sink.

All evaluate/jacobian callables accept one point of shape (d,) or a batch of
shape (N, d) and are pure, so maps can be shared between threads.
"""

#####################################
# Import Modules
#####################################

# import from standard library
import dataclasses
import functools
import math
from dataclasses import dataclass
from typing import Callable

# import external packages
import numpy as np
import pandas as pd
from scipy.optimize import least_squares

# import from local modules
from utils.utils_errors import ConfigError, DomainEscapeError
from utils.utils_logger import logger

__all__ = [
    "Disc",
    "SmoothMap",
    "PlanarMap",
    "Ball3Map",
    "model_horseshoe",
    "alpha",
    "epsilon_zero",
    "isotopy_map",
    "flow",
    "family_G",
    "restrict_to_slice",
    "linear_map",
    "find_fixed_points",
    "orbit",
    "orbit_to_frame",
    "get_family",
    "FAMILIES",
]

Q_HALF = 0.2
Q_CENTER_Y = 0.35
SINK_CENTER = np.array([0.0, 0.8])
SINK_RATE = 0.1
FOLD_SPEED = 1.5 * math.pi
# blend widths in square coordinates
BAND_BLEND = 0.1
SINK_COLLAR = 0.1

BLEND_WIDTH = 0.02
ESCAPE_TOL = 1e-9

#####################################
# Domain Types
#####################################


@dataclass(frozen=True)
class Disc:
    """Closed Euclidean ball (disc in the plane) given by center and radius."""

    center: tuple[float, ...]
    radius: float

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) <= self.radius + tol


@dataclass(frozen=True)
class SmoothMap:
    """
    A map with Jacobian, domain, and the box its seed curves are drawn from.

    core_box is the isolating region the estimators sample.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    domain: Disc
    core_box: tuple[tuple[float, ...], tuple[float, ...]]

    @property
    def dim(self) -> int:
        return len(self.domain.center)


@dataclass(frozen=True)
class PlanarMap(SmoothMap):
    pass


@dataclass(frozen=True)
class Ball3Map(SmoothMap):
    tau: float = 0.0


def _batched(fn: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    @functools.wraps(fn)
    def wrapper(points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        out = fn(np.atleast_2d(pts))
        return out[0] if single else out

    return wrapper


#####################################
# Model Horseshoe
#####################################


def _smooth_step(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1. Returns (value, derivative)."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s_left = np.where(s > 0, s, 1.0)
        s_right = np.where(s < 1, 1.0 - s, 1.0)
        left = np.where(s > 0, np.exp(-1.0 / s_left), 0.0)
        right = np.where(s < 1, np.exp(-1.0 / s_right), 0.0)
        # exp(-1/s) underflows long before s**2 does, so guard on the value
        d_left = np.where(left > 0, left / s_left**2, 0.0)
        d_right = np.where(right > 0, right / s_right**2, 0.0)
        total = left + right
        value = left / total
        derivative = (d_left * right + left * d_right) / total**2
    return value, derivative


def _square_coordinates(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return p[:, 0] / Q_HALF, (p[:, 1] - Q_CENTER_Y) / Q_HALF


def _fold_angle(v: np.ndarray) -> np.ndarray:
    # 0 at v = -1/3 (lower leg side), -pi at v = 1/3 (upper leg side)
    return -FOLD_SPEED * (v + 1.0 / 3.0)


def _square_map(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Horseshoe in square coordinates: (image, jacobian) of shapes (N, 2), (N, 2, 2)."""
    upper = np.column_stack((u / 3.0 - 2.0 / 3.0, 3.0 * v - 2.0))
    lower = np.column_stack((-u / 3.0 + 2.0 / 3.0, -3.0 * v - 2.0))

    rho = 2.0 / 3.0 - u / 3.0
    theta = _fold_angle(v)
    cos, sin = np.cos(theta), np.sin(theta)
    fold = np.column_stack((rho * cos, -1.0 + rho * sin))
    d_fold = np.empty((len(u), 2, 2))
    d_fold[:, 0, 0] = -cos / 3.0
    d_fold[:, 0, 1] = FOLD_SPEED * rho * sin
    d_fold[:, 1, 0] = -sin / 3.0
    d_fold[:, 1, 1] = -FOLD_SPEED * rho * cos

    # inside the band the fold hands over to each leg; the weights are flat at v = +-1/3
    w_up, dw_up = _smooth_step((v - 1.0 / 3.0 + BAND_BLEND) / BAND_BLEND)
    w_low, dw_low = _smooth_step((BAND_BLEND - 1.0 / 3.0 - v) / BAND_BLEND)
    dw_up = dw_up / BAND_BLEND
    dw_low = -dw_low / BAND_BLEND
    w_fold = 1.0 - w_up - w_low

    image = w_up[:, None] * upper + w_low[:, None] * lower + w_fold[:, None] * fold
    jac = (
        w_up[:, None, None] * np.diag([1.0 / 3.0, 3.0])
        + w_low[:, None, None] * np.diag([-1.0 / 3.0, -3.0])
        + w_fold[:, None, None] * d_fold
    )
    jac[:, :, 1] += dw_up[:, None] * (upper - fold) + dw_low[:, None] * (lower - fold)
    return image, jac


def _square_weight(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """1 on Q, 0 outside the collar. Returns (weight, gradient in square coordinates)."""
    step_u, dstep_u = _smooth_step((np.abs(u) - 1.0) / SINK_COLLAR)
    step_v, dstep_v = _smooth_step((np.abs(v) - 1.0) / SINK_COLLAR)
    keep_u, keep_v = 1.0 - step_u, 1.0 - step_v
    grad = -np.column_stack((dstep_u * np.sign(u) * keep_v, keep_u * dstep_v * np.sign(v))) / SINK_COLLAR
    return keep_u * keep_v, grad


def _horseshoe(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u, v = _square_coordinates(p)
    image, d_image = _square_map(u, v)
    weight, grad = _square_weight(u, v)
    square = np.column_stack((Q_HALF * image[:, 0], Q_CENTER_Y + Q_HALF * image[:, 1]))
    sink = SINK_CENTER + SINK_RATE * (p - SINK_CENTER)

    value = weight[:, None] * square + (1.0 - weight)[:, None] * sink
    # square coordinates scale both ways by Q_HALF, so d_image is already the physical Jacobian
    jac = weight[:, None, None] * d_image + (1.0 - weight)[:, None, None] * (SINK_RATE * np.eye(2))
    jac += (square - sink)[:, :, None] * grad[:, None, :] / Q_HALF
    return value, jac


@_batched
def _horseshoe_evaluate(p: np.ndarray) -> np.ndarray:
    return _horseshoe(p)[0]


@_batched
def _horseshoe_jacobian(p: np.ndarray) -> np.ndarray:
    return _horseshoe(p)[1]


def model_horseshoe() -> PlanarMap:
    """Two-legged horseshoe on the unit disc: expansion 3 in y, contraction 1/3 in x on the legs."""
    return PlanarMap(
        name="horseshoe",
        evaluate=_horseshoe_evaluate,
        jacobian=_horseshoe_jacobian,
        domain=Disc(center=(0.0, 0.0), radius=1.0),
        core_box=((-Q_HALF, Q_CENTER_Y - Q_HALF), (Q_HALF, Q_CENTER_Y + Q_HALF)),
    )



#####################################
# Isotopy Family
#####################################


def alpha(t: float, p: np.ndarray) -> np.ndarray:
    """alpha_t(x, y) = ((2/3) x, (1 - t) y - (5/3) t)."""
    pts = np.asarray(p, dtype=float)
    out = np.empty_like(pts)
    out[..., 0] = (2.0 / 3.0) * pts[..., 0]
    out[..., 1] = (1.0 - t) * pts[..., 1] - (5.0 / 3.0) * t
    return out


@functools.lru_cache(maxsize=None)
def epsilon_zero(grid_step: float = 1e-3, margin: float = 0.01, samples: int = 3600) -> float:
    """
    Smallest t on a grid with max_y alpha_t(D) < 0, plus `margin`.

    The maximum of a linear function over the disc sits on its boundary,
    so the boundary circle is what gets sampled.
    """
    theta = np.linspace(0.0, 2.0 * math.pi, samples + 1)
    boundary = np.column_stack((np.cos(theta), np.sin(theta)))
    for k in range(1, int(round(1.0 / grid_step)) + 1):
        t = k * grid_step
        if alpha(t, boundary)[:, 1].max() < 0.0:
            eps0 = t + margin
            logger.info(f"epsilon_0 = {eps0:.6g} (grid hit at t = {t:.6g})")
            return eps0
    raise ValueError("no t in (0, 1] pushes alpha_t(D) below the x-axis")


def _beta(t, u: np.ndarray):
    """
    Isotopy of the disc: the identity at t = 0, blended into alpha_sigma(t)
    by t = BLEND_WIDTH, with sigma(t) = eps0 + t (1 - eps0).

    t is a scalar or one level per row of u (t >= 0).
    Returns (beta, d beta / d u, d beta / d t).
    """
    eps0 = epsilon_zero()
    u = np.asarray(u, dtype=float)
    t = np.broadcast_to(np.asarray(t, dtype=float), u.shape[:-1])
    w, dw = _smooth_step(t / BLEND_WIDTH)
    dw = dw / BLEND_WIDTH
    sigma = eps0 + t * (1.0 - eps0)

    shifted = np.empty_like(u)
    shifted[..., 0] = (2.0 / 3.0) * u[..., 0]
    shifted[..., 1] = (1.0 - sigma) * u[..., 1] - (5.0 / 3.0) * sigma
    value = (1.0 - w)[..., None] * u + w[..., None] * shifted

    d_u = np.zeros(u.shape[:-1] + (2, 2))
    d_u[..., 0, 0] = 1.0 - w + w * (2.0 / 3.0)
    d_u[..., 1, 1] = 1.0 - w + w * (1.0 - sigma)

    d_t = dw[..., None] * (shifted - u)
    d_t[..., 1] += w * (1.0 - eps0) * (-u[..., 1] - 5.0 / 3.0)
    return value, d_u, d_t


def _check_trapping(m: SmoothMap) -> None:
    radius = m.domain.radius
    radii = np.linspace(0.0, 1.0, 25) * radius
    angles = np.linspace(0.0, 2.0 * math.pi, 40, endpoint=False)
    rr, aa = np.meshgrid(radii, angles)
    sample = np.column_stack(((rr * np.cos(aa)).ravel(), (rr * np.sin(aa)).ravel()))
    images = m.evaluate(sample)
    escaped = ~m.domain.contains(images, tol=ESCAPE_TOL)
    if escaped.any():
        worst = float(np.linalg.norm(images[escaped], axis=1).max())
        logger.error(f"{m.name}: {int(escaped.sum())} sampled points leave the disc of radius {radius:.6g}")
        raise DomainEscapeError(f"{m.name} sends points to radius {worst:.6g} > {radius:.6g}")


def isotopy_map(t: float, base: PlanarMap | None = None) -> PlanarMap:
    """
    f~_t on D_t = {|p| <= sqrt(1 - t^2)}: rescale D_t onto D, apply
    f_t = base o beta_|t|, rescale back. f~_0 is the base map and f~_t = f~_-t.

    Raises:
        DomainEscapeError: if a sampled point of D_t is sent outside D_t.
    """
    if not -1.0 < t < 1.0:
        raise ValueError(f"isotopy parameter must lie in (-1, 1), got {t}")
    base = base or model_horseshoe()
    level = abs(t)
    r = math.sqrt(1.0 - t * t)

    @_batched
    def evaluate(p: np.ndarray) -> np.ndarray:
        b, _, _ = _beta(level, p / r)
        return r * base.evaluate(b)

    @_batched
    def jacobian(p: np.ndarray) -> np.ndarray:
        b, d_u, _ = _beta(level, p / r)
        return base.jacobian(b) @ d_u

    lo, hi = base.core_box
    m = PlanarMap(
        name=f"isotopy(t={t:g})",
        evaluate=evaluate,
        jacobian=jacobian,
        domain=Disc(center=(0.0, 0.0), radius=r),
        core_box=(tuple(r * np.asarray(lo)), tuple(r * np.asarray(hi))),
    )
    _check_trapping(m)
    return m


#####################################
# Flow and the 3-Ball Family
#####################################


def flow(tau: float, points: np.ndarray) -> np.ndarray:
    """
    Time-tau map of z' = -(1 - z^2)/2, with (x, y) rescaled so each disc
    z = z0 lands on the disc z = z1. The poles are fixed.
    """
    pts = np.asarray(points, dtype=float)
    if tau == 0.0:
        return pts.copy()
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    z = pts[:, 2]
    out = pts.copy()
    inner = np.abs(z) < 1.0
    z0 = z[inner]
    z1 = np.tanh(np.arctanh(z0) - 0.5 * tau)
    k = np.sqrt((1.0 - z1**2) / (1.0 - z0**2))
    out[inner, 0] *= k
    out[inner, 1] *= k
    out[inner, 2] = z1
    return out[0] if single else out


def _flow_jacobian(tau: float, z0: np.ndarray, xy1: np.ndarray) -> np.ndarray:
    jac = np.tile(np.eye(3), (len(z0), 1, 1))
    if tau == 0.0:
        return jac
    z1 = np.tanh(np.arctanh(z0) - 0.5 * tau)
    k2 = (1.0 - z1**2) / (1.0 - z0**2)
    k = np.sqrt(k2)
    dk = k * (z0 - z1) / (1.0 - z0**2)
    jac[:, 0, 0] = k
    jac[:, 1, 1] = k
    jac[:, 0, 2] = xy1[:, 0] * dk
    jac[:, 1, 2] = xy1[:, 1] * dk
    jac[:, 2, 2] = k2
    return jac


def family_G(tau: float, base: PlanarMap | None = None) -> Ball3Map:
    """
    G_tau = phi_tau o F on the closed unit ball, F(x, y, z) = (f~_z(x, y), z).

    The slice map at height z acts on the disc of radius sqrt(1 - z^2);
    at z = 0 it is the base horseshoe, and the poles are left alone.
    """
    if tau < 0:
        raise ValueError(f"flow time must be nonnegative, got {tau}")
    base = base or model_horseshoe()

    def _slice(p: np.ndarray):
        # level z, slice radius r and the unit-disc point of every non-pole row
        z = np.clip(p[:, 2], -1.0, 1.0)
        inner = np.abs(z) < 1.0
        zi = z[inner]
        r = np.sqrt(1.0 - zi**2)
        xy = p[inner, :2]
        return z, inner, r, xy, xy / r[:, None]

    @_batched
    def evaluate(p: np.ndarray) -> np.ndarray:
        z, inner, r, _, u = _slice(p)
        moved = p.copy()
        if inner.any():
            b, _, _ = _beta(np.abs(z[inner]), u)
            moved[inner, :2] = r[:, None] * base.evaluate(b)
        return flow(tau, moved)

    @_batched
    def jacobian(p: np.ndarray) -> np.ndarray:
        z, inner, r, xy, u = _slice(p)
        d_f = np.tile(np.eye(3), (len(p), 1, 1))
        moved = p.copy()
        if inner.any():
            zi = z[inner]
            dr = -zi / r
            b, d_u, d_t = _beta(np.abs(zi), u)
            fb = base.evaluate(b)
            jf = base.jacobian(b)
            moved[inner, :2] = r[:, None] * fb
            d_f[inner, :2, :2] = jf @ d_u
            # d/dz of u = xy / r, then of beta through both t = |z| and u
            du_dz = -xy * (dr / r**2)[:, None]
            d_b = d_t * np.sign(zi)[:, None] + (d_u @ du_dz[..., None])[..., 0]
            d_f[inner, :2, 2] = dr[:, None] * fb + r[:, None] * (jf @ d_b[..., None])[..., 0]
        d_phi = np.tile(np.eye(3), (len(p), 1, 1))
        if inner.any():
            d_phi[inner] = _flow_jacobian(tau, z[inner], moved[inner, :2])
        return d_phi @ d_f

    lo, hi = base.core_box
    return Ball3Map(
        name=f"ball3(tau={tau:g})",
        evaluate=evaluate,
        jacobian=jacobian,
        domain=Disc(center=(0.0, 0.0, 0.0), radius=1.0),
        core_box=((lo[0], lo[1], -0.5), (hi[0], hi[1], 0.5)),
        tau=tau,
    )


def restrict_to_slice(G: Ball3Map, z: float = 0.0) -> Ball3Map:
    """Same map; its estimator seeds are confined to the disc at height z."""
    lo, hi = G.core_box
    return dataclasses.replace(
        G,
        name=f"{G.name}|z={z:g}",
        core_box=((lo[0], lo[1], z), (hi[0], hi[1], z)),
    )


#####################################
# Other Maps
#####################################


def linear_map(matrix) -> PlanarMap:
    """p -> M p on the unit disc (not trapping; used for growth-rate checks)."""
    mat = np.asarray(matrix, dtype=float)

    @_batched
    def evaluate(p: np.ndarray) -> np.ndarray:
        return p @ mat.T

    @_batched
    def jacobian(p: np.ndarray) -> np.ndarray:
        return np.broadcast_to(mat, (len(p), 2, 2)).copy()

    return PlanarMap(
        name="linear",
        evaluate=evaluate,
        jacobian=jacobian,
        domain=Disc(center=(0.0, 0.0), radius=1.0),
        core_box=((-0.5, -0.5), (0.5, 0.5)),
    )


#####################################
# Orbits and Fixed Points
#####################################


def orbit(m: SmoothMap, p, n: int) -> np.ndarray:
    """Points p, f(p), ..., f^n(p) as an (n + 1, d) array."""
    points = [np.asarray(p, dtype=float)]
    for _ in range(n):
        points.append(m.evaluate(points[-1]))
    return np.vstack(points)


def orbit_to_frame(points: np.ndarray) -> pd.DataFrame:
    names = ["x", "y", "z"][: points.shape[1]]
    frame = pd.DataFrame(points, columns=names)
    frame.insert(0, "step", range(len(points)))
    return frame


def find_fixed_points(m: SmoothMap, seeds, tol: float = 1e-9, merge: float = 1e-3) -> np.ndarray:
    """
    Bounded least squares on f(p) - p from every seed, projected into the domain.

    Converged points within `merge` of each other are reported once, by the
    representative with the smallest residual.
    """
    center = np.asarray(m.domain.center)
    radius = m.domain.radius

    def project(p: np.ndarray) -> np.ndarray:
        offset = p - center
        norm = np.linalg.norm(offset)
        return p if norm <= radius else center + offset * (radius / norm)

    def residual(p: np.ndarray) -> np.ndarray:
        q = project(p)
        return m.evaluate(q) - q

    found: list[tuple[float, np.ndarray]] = []
    for seed in np.atleast_2d(seeds):
        start = project(np.asarray(seed, dtype=float))
        if np.linalg.norm(residual(start)) < tol:
            candidate = start
        else:
            fit = least_squares(residual, start, bounds=(center - radius, center + radius))
            candidate = project(fit.x)
        err = float(np.linalg.norm(residual(candidate)))
        if err < tol:
            found.append((err, candidate))

    found.sort(key=lambda item: item[0])
    representatives: list[np.ndarray] = []
    for _, point in found:
        if all(np.linalg.norm(point - rep) > merge for rep in representatives):
            representatives.append(point)
    logger.info(f"{m.name}: {len(representatives)} fixed points from {len(np.atleast_2d(seeds))} seeds")
    return np.array(representatives).reshape(-1, m.dim)


#####################################
# Family Registry
#####################################

FAMILIES = ("horseshoe", "isotopy", "ball3")


def get_family(name: str, t: float = 0.0, tau: float = 0.0) -> SmoothMap:
    """Look up a shipped family by name."""
    if name == "horseshoe":
        return model_horseshoe()
    if name == "isotopy":
        return isotopy_map(t)
    if name == "ball3":
        return family_G(tau)
    raise ConfigError(f"unknown map family {name!r}; expected one of {', '.join(FAMILIES)}")
