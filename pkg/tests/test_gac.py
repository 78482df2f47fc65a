import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texgraph.gac import (
    CircleContour,
    ContourVanishedError,
    EdgeMap,
    GacParams,
    LevelSetField,
    MaskContour,
    RectangleContour,
    edge_map,
    gac_step,
    interior_area,
    jaccard,
    pixel_accuracy,
    reinitialize,
    run_gac,
    signed_distance,
)
from texgraph.image import Image, ShapeMask, gaussian_smooth


def flat_edge(height, width):
    return EdgeMap(np.ones((height, width)), lam=1.0, sigma=0.0)


def blob_mask(seed, size=40):
    """Random smooth blob with a cleared border, both signs guaranteed."""
    rng = np.random.default_rng(seed)
    field = gaussian_smooth(Image(rng.uniform(0.0, 1.0, (size, size))), 3.0).plane(0)
    inside = field > np.median(field)
    inside[0, :] = inside[-1, :] = False
    inside[:, 0] = inside[:, -1] = False
    assert inside.any() and not inside.all()
    return inside


def brute_signed_distance(inside):
    """Quadratic all-pairs scan: distance to nearest opposite-sign pixel."""
    yy, xx = np.indices(inside.shape)
    pts = np.stack([yy.ravel(), xx.ravel()], axis=1).astype(np.float64)
    flat = inside.ravel()
    ins, outs = pts[flat], pts[~flat]
    u = np.empty(inside.size)
    for i in range(inside.size):
        opp = outs if flat[i] else ins
        d = np.sqrt(((opp - pts[i]) ** 2).sum(axis=1)).min()
        u[i] = 0.5 - d if flat[i] else d - 0.5
    return u.reshape(inside.shape)


def valley_fixture(shift=0):
    """g = 1 with a deep square moat straddling a rectangle's interface."""
    size = 60
    a, b = 18 + shift, 42 + shift
    g = np.ones((size, size))
    ring = np.zeros((size, size), bool)
    ring[a:b, a:b] = True
    ring[a + 2:b - 2, a + 2:b - 2] = False
    g[ring] = 1e-4
    u0 = signed_distance(RectangleContour((a + 1, a + 1), (b - 2, b - 2)),
                         size, size)
    return EdgeMap(g, lam=1.0, sigma=0.0), u0


class TestEdgeMap:
    def test_constant_image_gives_unit_map(self):
        e = edge_map(Image(np.full((12, 15), 42.0)), sigma=1.0, lam=0.5)
        assert np.all(e.g == 1.0)
        assert e.lam == 0.5
        assert e.sigma == 1.0

    def test_gradient_equal_to_lam_gives_half(self):
        ramp = np.tile(np.arange(20.0) * 0.3, (20, 1))
        e = edge_map(Image(ramp), sigma=0.0, lam=0.3)
        assert e.g[5:-5, 5:-5] == pytest.approx(0.5)

    def test_duplicated_channel_doubles_s2(self):
        rng = np.random.default_rng(0)
        plane = rng.uniform(0.0, 1.0, (16, 16))
        single = edge_map(Image(plane), sigma=0.0, lam=0.7)
        double = edge_map(Image(np.stack([plane, plane], axis=-1)),
                          sigma=0.0, lam=0.7)
        s2 = 1.0 / single.g - 1.0
        expected = 1.0 / (1.0 + 2.0 * s2)
        assert double.g == pytest.approx(expected, rel=1e-12)

    def test_smoothing_flattens_fine_texture(self):
        checker = 255.0 * ((np.indices((20, 20)).sum(axis=0)) % 2)
        sharp = edge_map(Image(checker), sigma=0.0, lam=10.0)
        blurred = edge_map(Image(checker), sigma=2.0, lam=10.0)
        assert blurred.g.min() > sharp.g.min()

    def test_lam_must_be_positive(self):
        with pytest.raises(ValueError, match="lam"):
            edge_map(Image(np.zeros((5, 5))), sigma=1.0, lam=0.0)

    def test_value_range_enforced(self):
        with pytest.raises(ValueError, match="lie in"):
            EdgeMap(np.full((4, 4), 1.5), lam=1.0, sigma=0.0)
        with pytest.raises(ValueError, match="lie in"):
            EdgeMap(np.zeros((4, 4)), lam=1.0, sigma=0.0)


class TestSignedDistance:
    def test_circle_center_value(self):
        f = signed_distance(CircleContour((50.0, 50.0), 30.0), 100, 100)
        assert f.u[50, 50] == -30.0
        assert f.time == 0.0

    def test_circle_interface_pixels_are_subunit(self):
        f = signed_distance(CircleContour((20.0, 20.0), 12.5), 40, 40)
        inside = f.u < 0
        grew = inside | np.roll(inside, 1, 0) | np.roll(inside, -1, 0) \
            | np.roll(inside, 1, 1) | np.roll(inside, -1, 1)
        boundary = grew & ~inside
        assert np.abs(f.u[boundary]).max() < 1.0

    def test_rectangle_interior_and_offsets(self):
        f = signed_distance(RectangleContour((5, 6), (10, 14)), 30, 20)
        inside = f.u < 0
        assert inside.sum() == 6 * 9
        assert f.u[5, 6] == -0.5
        assert f.u[4, 6] == 0.5
        assert f.u[7, 10] < -0.5

    def test_mask_matches_quadratic_scan(self):
        for seed in (1, 2, 3):
            inside = blob_mask(seed)
            f = signed_distance(MaskContour(ShapeMask(inside)), 40, 40)
            assert np.array_equal(f.u, brute_signed_distance(inside))

    def test_empty_interior_rejected(self):
        with pytest.raises(ValueError, match="empty interior"):
            signed_distance(CircleContour((5.5, 5.5), 0.4), 12, 12)

    def test_border_contact_rejected(self):
        with pytest.raises(ValueError, match="strictly inside"):
            signed_distance(CircleContour((3.0, 3.0), 3.5), 20, 20)

    def test_mask_shape_must_match_domain(self):
        mask = ShapeMask(blob_mask(4))
        with pytest.raises(ValueError, match="does not match domain"):
            signed_distance(MaskContour(mask), 41, 40)

    def test_bad_specs_rejected(self):
        with pytest.raises(ValueError, match="radius"):
            CircleContour((5.0, 5.0), 0.0)
        with pytest.raises(ValueError, match="corners"):
            RectangleContour((5, 5), (4, 9))
        with pytest.raises(TypeError):
            signed_distance("circle", 10, 10)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_interface_offset_is_half_pixel(self, seed):
        rng = np.random.default_rng(seed)
        inside = np.zeros((14, 14), bool)
        inside[3:11, 3:11] = rng.uniform(size=(8, 8)) < 0.5
        if not inside.any():
            inside[7, 7] = True
        f = signed_distance(MaskContour(ShapeMask(inside)), 14, 14)
        assert np.abs(f.u).min() == 0.5
        assert np.array_equal(f.u < 0, inside)


class TestGacStep:
    def test_constant_field_is_fixed_point(self):
        field = LevelSetField(np.full((10, 10), 3.0), time=1.0)
        rng = np.random.default_rng(5)
        g = 1.0 / (1.0 + rng.uniform(0.0, 2.0, (10, 10)))
        out = gac_step(field, EdgeMap(g, 1.0, 0.0), GacParams(nu=0.0))
        assert np.array_equal(out.u, field.u)
        assert out.time == pytest.approx(1.1)

    def test_shape_mismatch_rejected(self):
        field = LevelSetField(np.zeros((10, 10)))
        with pytest.raises(ValueError, match="does not match"):
            gac_step(field, flat_edge(9, 10), GacParams(nu=0.0))

    def test_shrinking_circle_tracks_analytic_radius(self):
        size, r0 = 100, 30.0
        field = signed_distance(CircleContour((50.0, 50.0), r0), size, size)
        e = flat_edge(size, size)
        params = GacParams(nu=0.0, tau=0.1)
        for it in range(1, 3001):
            field = gac_step(field, e, params)
            if it % 100 == 0:
                field = reinitialize(field)
            if it % 500 == 0:
                r_true = np.sqrt(r0 * r0 - 2.0 * field.time)
                r_est = np.sqrt(interior_area(field) / np.pi)
                assert r_est == pytest.approx(r_true, rel=0.05)

    def test_balloon_tracks_expansion_ode(self):
        size, r0 = 100, 10.0
        field = signed_distance(CircleContour((50.0, 50.0), r0), size, size)
        e = flat_edge(size, size)
        params = GacParams(nu=-1.0, tau=0.1)

        def ode_radius(t, dt=1e-4):
            r = r0
            for _ in range(int(round(t / dt))):
                r += dt * (1.0 - 1.0 / r)
            return r

        for it in range(1, 301):
            field = gac_step(field, e, params)
            if it % 100 == 0:
                field = reinitialize(field)
            if it % 100 == 0:
                r_est = np.sqrt(interior_area(field) / np.pi)
                assert r_est == pytest.approx(ode_radius(field.time), rel=0.05)


class TestReinitialize:
    def test_exact_circle_field_barely_moves(self):
        f = signed_distance(CircleContour((15.0, 15.0), 10.3), 30, 30)
        r = reinitialize(f)
        assert np.abs(r.u - f.u).max() < 1.0
        assert r.time == f.time

    def test_idempotent(self):
        u = np.sin(np.linspace(0, 6, 24))[:, None] * np.cos(np.linspace(0, 5, 24))
        once = reinitialize(LevelSetField(u))
        twice = reinitialize(once)
        assert np.array_equal(once.u, twice.u)

    def test_signs_preserved(self):
        for seed in (6, 7):
            inside = blob_mask(seed, size=24)
            scaled = LevelSetField(np.where(inside, -3.7, 0.2))
            r = reinitialize(scaled)
            assert np.array_equal(r.u < 0, inside)

    def test_single_sign_raises(self):
        with pytest.raises(ContourVanishedError, match="contour vanished"):
            reinitialize(LevelSetField(np.ones((8, 8))))
        with pytest.raises(ContourVanishedError, match="contour vanished"):
            reinitialize(LevelSetField(-np.ones((8, 8))))


class TestRunGac:
    def test_valley_pins_contour(self):
        e, u0 = valley_fixture()
        params = GacParams(nu=-1.0, tau=0.1, max_iters=500, steady_window=100)
        field, mask, iterations = run_gac(u0, e, params)
        assert iterations == 100
        assert np.array_equal(mask.inside, u0.u < 0)

    def test_valley_holds_for_500_raw_steps(self):
        e, u0 = valley_fixture()
        params = GacParams(nu=-1.0, tau=0.1)
        field = u0
        for it in range(1, 501):
            field = gac_step(field, e, params)
            if it % 100 == 0:
                field = reinitialize(field)
        assert np.array_equal(field.u < 0, u0.u < 0)

    def test_curvature_extinction_raises_with_count(self):
        # a pixel-symmetric interior stalls at one isolated pixel (its
        # central gradient is exactly zero), so seed off the lattice
        u0 = signed_distance(CircleContour((20.5, 20.5), 4.0), 40, 40)
        with pytest.raises(ContourVanishedError,
                           match=r"contour vanished after \d+ iterations"):
            run_gac(u0, flat_edge(40, 40), GacParams(nu=0.0, max_iters=2000))

    def test_observer_sees_every_iteration(self):
        e, u0 = valley_fixture()
        rows = []

        def log(iteration, field, mask, changed):
            rows.append((iteration, field.time, mask.count(), changed))

        params = GacParams(nu=-1.0, tau=0.1, max_iters=500, steady_window=50)
        _, mask, iterations = run_gac(u0, e, params, observer=log)
        assert len(rows) == iterations
        assert [r[0] for r in rows] == list(range(1, iterations + 1))
        assert rows[-1][1] == pytest.approx(0.1 * iterations)
        assert all(r[3] == 0 for r in rows[-50:])
        assert rows[-1][2] == mask.count()

    def test_max_iters_caps_run(self):
        size = 60
        u0 = signed_distance(CircleContour((30.0, 30.0), 10.0), size, size)
        params = GacParams(nu=-1.0, tau=0.1, max_iters=7, steady_window=100)
        _, _, iterations = run_gac(u0, flat_edge(size, size), params)
        assert iterations == 7

    def test_params_validation(self):
        with pytest.raises(ValueError, match="tau"):
            GacParams(nu=0.0, tau=0.0)
        with pytest.raises(ValueError, match="tau"):
            GacParams(nu=0.0, tau=0.3)
        with pytest.raises(ValueError, match="reinit_every"):
            GacParams(nu=0.0, reinit_every=0)
        with pytest.raises(ValueError, match="max_iters"):
            GacParams(nu=0.0, max_iters=0)
        with pytest.raises(ValueError, match="steady_window"):
            GacParams(nu=0.0, steady_window=0)

    def test_field_validation(self):
        with pytest.raises(ValueError, match="finite"):
            LevelSetField(np.array([[1.0, np.nan], [0.0, -1.0]]))
        with pytest.raises(ValueError, match="2-D"):
            LevelSetField(np.zeros(9))


class TestSchemeInvariants:
    def test_extrema_monotone_without_force(self):
        rng = np.random.default_rng(3)
        smooth = gaussian_smooth(Image(rng.uniform(0.0, 10.0, (60, 60))), 2.0)
        g = 1.0 / (1.0 + gaussian_smooth(
            Image(rng.uniform(0.0, 4.0, (60, 60))), 3.0).plane(0) ** 2)
        e = EdgeMap(g, 1.0, 0.0)
        params = GacParams(nu=0.0, tau=0.1)
        for start in (LevelSetField(smooth.plane(0).copy()),
                      signed_distance(CircleContour((30.0, 30.0), 15.0), 60, 60)):
            field = start
            for _ in range(100):
                nxt = gac_step(field, e, params)
                assert nxt.u.max() <= field.u.max() + 1e-9
                assert nxt.u.min() >= field.u.min() - 1e-9
                field = nxt

    def test_range_growth_bounded_by_force_displacement(self):
        size, r0 = 100, 10.0
        field = signed_distance(CircleContour((50.0, 50.0), r0), size, size)
        lo, hi = field.u.min(), field.u.max()
        e = flat_edge(size, size)
        params = GacParams(nu=-1.0, tau=0.1)
        for it in range(1, 301):
            field = gac_step(field, e, params)
            if it % 100 == 0:
                field = reinitialize(field)
            bound = params.tau * it * abs(params.nu)
            assert field.u.max() <= hi + bound + 1e-6
            assert field.u.min() >= lo - bound - 1e-6

    def test_circle_stays_circular(self):
        size = 100
        field = signed_distance(CircleContour((50.0, 50.0), 30.0), size, size)
        e = flat_edge(size, size)
        params = GacParams(nu=0.0, tau=0.1)
        for it in range(1, 2001):
            field = gac_step(field, e, params)
            if it % 100 == 0:
                field = reinitialize(field)
            if it % 400 == 0:
                inside = field.u < 0
                core = np.roll(inside, 1, 0) & np.roll(inside, -1, 0) \
                    & np.roll(inside, 1, 1) & np.roll(inside, -1, 1)
                yy, xx = np.nonzero(inside & ~core)
                radii = np.sqrt((yy - 50.0) ** 2 + (xx - 50.0) ** 2)
                assert np.sqrt(((radii - radii.mean()) ** 2).mean()) <= 0.5

    def test_translation_equivariance(self):
        params = GacParams(nu=-1.0, tau=0.1, max_iters=500, steady_window=100)
        e0, u0 = valley_fixture(shift=0)
        e1, u1 = valley_fixture(shift=1)
        _, mask0, _ = run_gac(u0, e0, params)
        _, mask1, _ = run_gac(u1, e1, params)
        shifted = np.zeros_like(mask0.inside)
        shifted[1:, 1:] = mask0.inside[:-1, :-1]
        assert np.array_equal(mask1.inside, shifted)


class TestAreaAndMasks:
    def test_interior_area_counts_pixels_after_reinit(self):
        inside = blob_mask(9, size=30)
        f = signed_distance(MaskContour(ShapeMask(inside)), 30, 30)
        assert interior_area(f) == float(inside.sum())

    def test_interior_area_tracks_circle(self):
        f = signed_distance(CircleContour((40.0, 40.0), 20.0), 80, 80)
        assert interior_area(f) == pytest.approx(np.pi * 400.0, rel=0.01)

    def test_jaccard_basics(self):
        small = np.zeros((10, 30), bool)
        small[2:7, 2:12] = True
        big = np.zeros((10, 30), bool)
        big[2:7, 2:22] = True
        assert small.sum() == 50 and big.sum() == 100
        assert jaccard(ShapeMask(small), ShapeMask(big)) == 0.5
        assert jaccard(ShapeMask(small), ShapeMask(small)) == 1.0
        disjoint = np.zeros((10, 30), bool)
        disjoint[8:, :] = True
        assert jaccard(ShapeMask(small), ShapeMask(disjoint)) == 0.0
        empty = ShapeMask(np.zeros((10, 30), bool))
        assert jaccard(empty, empty) == 1.0
        with pytest.raises(ValueError, match="dimension mismatch"):
            jaccard(empty, ShapeMask(np.zeros((30, 10), bool)))

    def test_pixel_accuracy(self):
        a = ShapeMask(np.zeros((5, 5), bool))
        assert pixel_accuracy(a, a) == 1.0
        b = ShapeMask(np.ones((5, 5), bool))
        assert pixel_accuracy(a, b) == 0.0
        with pytest.raises(ValueError, match="dimension mismatch"):
            pixel_accuracy(a, ShapeMask(np.zeros((5, 6), bool)))

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_jaccard_properties(self, seed):
        rng = np.random.default_rng(seed)
        a = ShapeMask(rng.uniform(size=(9, 9)) < 0.4)
        b = ShapeMask(rng.uniform(size=(9, 9)) < 0.4)
        j = jaccard(a, b)
        assert 0.0 <= j <= 1.0
        assert j == jaccard(b, a)
        assert jaccard(a, a) == 1.0
