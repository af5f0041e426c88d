import itertools

import numpy as np
import pytest

from maps.smooth_maps import (
    Q_CENTER_Y,
    Q_HALF,
    SINK_CENTER,
    SINK_RATE,
    alpha,
    epsilon_zero,
    family_G,
    find_fixed_points,
    flow,
    get_family,
    isotopy_map,
    linear_map,
    model_horseshoe,
    orbit,
    orbit_to_frame,
    restrict_to_slice,
)
from utils.utils_errors import ConfigError, DomainEscapeError

FD_STEP = 1e-6


def sample_disc(rng, count: int, radius: float = 1.0) -> np.ndarray:
    angle = rng.uniform(0.0, 2 * np.pi, count)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    return np.column_stack((r * np.cos(angle), r * np.sin(angle)))


def sample_ball(rng, count: int, max_abs_z: float = 1.0) -> np.ndarray:
    points = rng.normal(size=(count, 3))
    points /= np.linalg.norm(points, axis=1)[:, None]
    points *= rng.uniform(0.0, 1.0, count)[:, None] ** (1 / 3)
    points[:, 2] = np.clip(points[:, 2], -max_abs_z, max_abs_z)
    return points


def finite_difference_jacobian(m, p: np.ndarray) -> np.ndarray:
    cols = []
    for k in range(len(p)):
        e = np.zeros(len(p))
        e[k] = FD_STEP
        cols.append((m.evaluate(p + e) - m.evaluate(p - e)) / (2 * FD_STEP))
    return np.column_stack(cols)


def assert_jacobian_matches(m, points: np.ndarray) -> None:
    analytic = m.jacobian(points)
    for p, jac in zip(points, analytic):
        fd = finite_difference_jacobian(m, p)
        scale = max(1.0, np.abs(jac).max())
        assert np.abs(fd - jac).max() <= 1e-5 * scale, p


class TestModelHorseshoe:
    def test_legs_stretch_by_three(self):
        f = model_horseshoe()
        upper = np.array([0.0, Q_CENTER_Y + 0.5 * Q_HALF])
        lower = np.array([0.0, Q_CENTER_Y - 0.5 * Q_HALF])
        assert np.allclose(f.jacobian(upper), np.diag([1 / 3, 3]))
        assert np.allclose(f.jacobian(lower), np.diag([-1 / 3, -3]))

    def test_legs_cross_the_core_square(self):
        f = model_horseshoe()
        top, bottom = Q_CENTER_Y + Q_HALF, Q_CENTER_Y - Q_HALF
        images = f.evaluate(np.array([[0.1, top], [0.1, Q_CENTER_Y + Q_HALF / 3], [0.1, bottom]]))
        assert images[0, 1] == pytest.approx(top)
        assert images[1, 1] == pytest.approx(bottom)
        assert images[2, 1] == pytest.approx(top)

    def test_fold_joins_the_legs_continuously(self):
        f = model_horseshoe()
        for v in (1 / 3, -1 / 3):
            y = Q_CENTER_Y + v * Q_HALF
            inside, outside = f.evaluate(np.array([[0.05, y - 1e-9], [0.05, y + 1e-9]]))
            assert np.linalg.norm(inside - outside) < 1e-7

    def test_continuous_across_the_edges_of_the_square(self):
        f = model_horseshoe()
        along = np.linspace(-Q_HALF, Q_HALF, 41)
        top, bottom = Q_CENTER_Y + Q_HALF, Q_CENTER_Y - Q_HALF
        normal = np.array([0.0, 1e-12])
        for edge in (np.column_stack((along, np.full_like(along, top))), np.column_stack((along, np.full_like(along, bottom)))):
            assert np.abs(f.evaluate(edge + normal) - f.evaluate(edge - normal)).max() < 1e-9
        ys = Q_CENTER_Y + np.linspace(-Q_HALF, Q_HALF, 41)
        normal = np.array([1e-12, 0.0])
        for x in (-Q_HALF, Q_HALF):
            edge = np.column_stack((np.full_like(ys, x), ys))
            assert np.abs(f.evaluate(edge + normal) - f.evaluate(edge - normal)).max() < 1e-9

    def test_jacobian_matches_finite_differences_near_the_blends(self):
        offsets = np.array([-0.019, -0.01, -1e-3, -1e-5, 1e-5, 1e-3, 0.005, 0.01, 0.015, 0.019])
        along = np.linspace(-0.9 * Q_HALF, 0.9 * Q_HALF, 7)
        points = []
        # the sink collar outside each edge, and the band blends inside the middle band
        for level in (-Q_HALF, Q_HALF):
            for d in offsets:
                y = Q_CENTER_Y + level + np.sign(level) * d
                points.extend((x, y) for x in along)
                points.extend((level + np.sign(level) * d, Q_CENTER_Y + x) for x in along)
        for level in (-Q_HALF / 3, Q_HALF / 3):
            for d in offsets[offsets < 0]:
                points.extend((x, Q_CENTER_Y + level + np.sign(level) * d) for x in along)
        assert_jacobian_matches(model_horseshoe(), np.array(points))

    def test_collar_reaches_the_sink(self):
        f = model_horseshoe()
        outside = np.array([[0.0, Q_CENTER_Y + 1.2 * Q_HALF], [1.2 * Q_HALF, Q_CENTER_Y], [0.0, -0.5]])
        sink = SINK_CENTER + SINK_RATE * (outside - SINK_CENTER)
        assert np.allclose(f.evaluate(outside), sink, atol=1e-12)
        assert np.allclose(f.jacobian(outside), SINK_RATE * np.eye(2), atol=1e-12)

    def test_orbits_leaving_the_square_never_return(self, rng):
        f = model_horseshoe()
        top, bottom = Q_CENTER_Y + Q_HALF, Q_CENTER_Y - Q_HALF
        points = sample_disc(rng, 20_000)
        points = points[(points[:, 1] > top) | (points[:, 1] < bottom)]
        for _ in range(6):
            points = f.evaluate(points)
            assert points[:, 1].min() > top

    def test_sink_is_the_attracting_fixed_point(self):
        f = model_horseshoe()
        assert np.allclose(f.evaluate(SINK_CENTER), SINK_CENTER)
        assert np.linalg.norm(orbit(f, np.array([0.3, -0.9]), 40)[-1] - SINK_CENTER) < 1e-12

    def test_middle_band_lands_below_the_square(self):
        f = model_horseshoe()
        v = np.linspace(-1 / 3 + 1e-9, 1 / 3 - 1e-9, 2001)
        u = np.linspace(-1.0, 1.0, 2001)
        points = np.column_stack((Q_HALF * u, Q_CENTER_Y + Q_HALF * v))
        assert f.evaluate(points)[:, 1].max() < Q_CENTER_Y - Q_HALF

    def test_maps_disc_into_itself(self, rng):
        f = model_horseshoe()
        images = f.evaluate(sample_disc(rng, 10_000))
        assert np.linalg.norm(images, axis=1).max() < 1.0

    def test_jacobian_matches_finite_differences(self, rng):
        assert_jacobian_matches(model_horseshoe(), sample_disc(rng, 500))

    def test_itineraries_realize_every_word(self):
        f = model_horseshoe()
        depth = 10
        ys = np.linspace(Q_CENTER_Y - Q_HALF, Q_CENTER_Y + Q_HALF, 200_001)
        points = np.column_stack((np.zeros_like(ys), ys))
        alive = np.ones(len(ys), dtype=bool)
        words = np.zeros(len(ys), dtype=np.int64)
        for _ in range(depth):
            v = (points[:, 1] - Q_CENTER_Y) / Q_HALF
            in_square = (np.abs(points[:, 0]) <= Q_HALF) & (np.abs(v) <= 1)
            upper = in_square & (v >= 1 / 3)
            lower = in_square & (v <= -1 / 3)
            alive &= upper | lower
            words = 2 * words + upper.astype(np.int64)
            points = f.evaluate(points)
        assert len(set(words[alive].tolist())) == 2**depth

    def test_evaluates_single_points_and_batches(self):
        f = model_horseshoe()
        p = np.array([0.03, 0.6])
        assert f.evaluate(p).shape == (2,)
        assert np.array_equal(f.evaluate(p[None, :])[0], f.evaluate(p))


class TestAlphaAndEpsilonZero:
    def test_alpha_formula(self):
        assert np.allclose(alpha(1.0, np.array([0.3, 0.7])), [0.2, -5 / 3])
        assert np.allclose(alpha(0.5, np.array([0.0, 0.0])), [0.0, -5 / 6])

    def test_epsilon_zero_pushes_disc_below_axis(self):
        eps0 = epsilon_zero()
        assert 0.0 < eps0 < 1.0
        theta = np.linspace(0, 2 * np.pi, 10_001)
        circle = np.column_stack((np.cos(theta), np.sin(theta)))
        assert alpha(eps0, circle)[:, 1].max() < 0.0


class TestIsotopy:
    def test_zero_is_the_base_map(self, rng):
        points = sample_disc(rng, 1000)
        assert np.array_equal(isotopy_map(0.0).evaluate(points), model_horseshoe().evaluate(points))

    def test_mirrored_parameters_agree(self, rng):
        for t in (0.01, 0.3, 0.8):
            points = sample_disc(rng, 500, radius=np.sqrt(1 - t * t))
            assert np.array_equal(isotopy_map(t).evaluate(points), isotopy_map(-t).evaluate(points))

    @pytest.mark.parametrize("t", [0.0, 0.005, 0.015, 0.3, 0.7, 0.95, 0.99])
    def test_maps_its_disc_inside(self, rng, t):
        m = isotopy_map(t)
        images = m.evaluate(sample_disc(rng, 2000, radius=m.domain.radius))
        assert np.linalg.norm(images, axis=1).max() < m.domain.radius

    @pytest.mark.parametrize("t", [0.01, 0.3, 0.9])
    def test_jacobian_matches_finite_differences(self, rng, t):
        m = isotopy_map(t)
        assert_jacobian_matches(m, sample_disc(rng, 500, radius=0.999 * m.domain.radius))

    def test_near_one_is_a_contraction(self, rng):
        m = isotopy_map(0.99)
        points = sample_disc(rng, 500, radius=m.domain.radius)
        norms = np.linalg.norm(m.jacobian(points), ord=2, axis=(1, 2))
        assert norms.max() < 1.0
        limits = np.array([orbit(m, p, 200)[-1] for p in points[:20]])
        assert np.ptp(limits, axis=0).max() < 1e-9

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            isotopy_map(1.0)

    def test_escaping_base_is_rejected(self):
        with pytest.raises(DomainEscapeError):
            isotopy_map(0.0, base=linear_map(np.diag([3.0, 1.0])))


class TestFlowAndBall:
    def test_flow_zero_is_identity(self, rng):
        points = sample_ball(rng, 100)
        assert np.array_equal(flow(0.0, points), points)

    def test_flow_fixes_poles_and_moves_down(self, rng):
        poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        assert np.array_equal(flow(0.3, poles), poles)
        points = sample_ball(rng, 1000, max_abs_z=0.99)
        moved = flow(0.3, points)
        assert np.all(moved[:, 2] < points[:, 2])
        assert np.linalg.norm(moved, axis=1).max() <= 1.0 + 1e-12

    def test_flow_displacement_grows_with_time(self, rng):
        points = sample_ball(rng, 200, max_abs_z=0.99)
        drops = [points[:, 2] - flow(tau, points)[:, 2] for tau in (0.01, 0.05, 0.2)]
        assert np.all(drops[0] < drops[1]) and np.all(drops[1] < drops[2])

    def test_g0_on_the_equator_is_the_horseshoe(self, rng):
        planar = sample_disc(rng, 1000)
        points = np.column_stack((planar, np.zeros(len(planar))))
        images = family_G(0.0).evaluate(points)
        assert np.array_equal(images[:, :2], model_horseshoe().evaluate(planar))
        assert np.all(images[:, 2] == 0.0)

    @pytest.mark.parametrize("tau", [0.0, 0.01, 0.05, 0.2])
    def test_maps_ball_into_itself(self, rng, tau):
        images = family_G(tau).evaluate(sample_ball(rng, 10_000))
        assert np.linalg.norm(images, axis=1).max() <= 1.0 + 1e-12

    @pytest.mark.parametrize("tau", [0.0, 0.05])
    def test_jacobian_matches_finite_differences(self, rng, tau):
        points = sample_ball(rng, 500, max_abs_z=0.95)
        points *= 0.99
        assert_jacobian_matches(family_G(tau), points)

    def test_height_decreases_along_orbits(self, rng):
        G = family_G(0.05)
        for p in sample_ball(rng, 10, max_abs_z=0.9):
            zs = orbit(G, p, 2000)[:, 2]
            below = np.argmax(zs < -1 + 1e-6) if np.any(zs < -1 + 1e-6) else len(zs)
            assert np.all(np.diff(zs[: below + 1]) < 0)

    def test_fixed_points_are_the_poles(self):
        axis = np.linspace(-1.0, 1.0, 10)
        seeds = np.array(list(itertools.product(axis, axis, axis)))
        found = find_fixed_points(family_G(0.05), seeds)
        assert len(found) == 2
        assert sorted(found[:, 2].round(6).tolist()) == [-1.0, 1.0]
        assert np.abs(found[:, :2]).max() < 1e-6

    def test_restrict_to_slice_only_moves_the_box(self):
        G = family_G(0.0)
        S = restrict_to_slice(G, 0.0)
        assert S.core_box[0][2] == S.core_box[1][2] == 0.0
        assert S.evaluate is G.evaluate


class TestHelpers:
    def test_linear_map(self):
        m = linear_map([[2.0, 0.0], [0.0, 0.5]])
        assert np.allclose(m.evaluate(np.array([1.0, 1.0])), [2.0, 0.5])
        assert np.allclose(m.jacobian(np.zeros((3, 2))), np.diag([2.0, 0.5]))

    def test_orbit_frame_columns(self):
        frame = orbit_to_frame(orbit(family_G(0.05), np.array([0.0, 0.5, 0.2]), 4))
        assert list(frame.columns) == ["step", "x", "y", "z"]
        assert frame["step"].tolist() == [0, 1, 2, 3, 4]

    def test_registry(self):
        assert get_family("horseshoe").name == "horseshoe"
        assert get_family("isotopy", t=0.5).domain.radius == pytest.approx(np.sqrt(0.75))
        assert get_family("ball3", tau=0.05).dim == 3
        with pytest.raises(ConfigError):
            get_family("henon")
