import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texgraph.image import (
    Image,
    ImageIOError,
    ShapeMask,
    gaussian_kernel,
    gaussian_smooth,
    letter_e_mask,
    load_image,
    noise_pattern,
    rescale,
    save_image,
    stripe_pattern,
    synth_compose,
    synth_stripe_noise,
)


class TestImageType:
    def test_2d_input_gets_channel_axis(self):
        img = Image(np.zeros((3, 4)))
        assert (img.height, img.width, img.channels) == (3, 4, 1)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            Image(np.array([[np.nan, 0.0]]))

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            Image(np.zeros((0, 4)))


class TestPgmIO:
    def test_p2_identity_read(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P2\n# comment\n2 2\n255\n0 255\n128 64\n")
        img = load_image(str(p))
        assert img.plane().tolist() == [[0.0, 255.0], [128.0, 64.0]]

    def test_p5_roundtrip(self, tmp_path):
        p = tmp_path / "t.pgm"
        data = np.arange(12, dtype=np.float64).reshape(3, 4)
        save_image(Image(data), str(p))
        back = load_image(str(p))
        assert np.array_equal(back.plane(), data)

    def test_truncated_body_errors(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n4 4\n255\nshort")
        with pytest.raises(ImageIOError, match="malformed image payload"):
            load_image(str(p))

    def test_maxval_over_255_rejected(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P2\n1 1\n65535\n300\n")
        with pytest.raises(ImageIOError, match="unsupported bit depth"):
            load_image(str(p))

    def test_out_of_range_value_errors(self, tmp_path):
        with pytest.raises(ValueError, match=r"value outside \[0,255\]"):
            save_image(Image(np.array([[300.0]])), str(tmp_path / "t.pgm"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageIOError, match="unreadable"):
            load_image(str(tmp_path / "nope.pgm"))


class TestPngIO:
    def test_all_white_png(self, tmp_path):
        from PIL import Image as PILImage

        p = tmp_path / "w.png"
        PILImage.fromarray(np.full((5, 7), 255, dtype=np.uint8), mode="L").save(p)
        img = load_image(str(p))
        assert np.array_equal(img.plane(), np.full((5, 7), 255.0))

    def test_rgb_luma(self, tmp_path):
        from PIL import Image as PILImage

        p = tmp_path / "c.png"
        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[..., 0] = 100  # red only
        PILImage.fromarray(rgb, mode="RGB").save(p)
        img = load_image(str(p))
        assert img.channels == 1
        assert np.allclose(img.plane(), 29.9)

    def test_roundtrip_integer_values(self, tmp_path):
        p = tmp_path / "g.png"
        data = np.arange(16, dtype=np.float64).reshape(4, 4) * 17
        save_image(Image(data), str(p))
        assert np.array_equal(load_image(str(p)).plane(), data)

    def test_16bit_grayscale_scaled(self, tmp_path):
        from PIL import Image as PILImage

        p = tmp_path / "d.png"
        arr = np.full((2, 2), 65535, dtype=np.uint16)
        PILImage.fromarray(arr).save(p)
        img = load_image(str(p))
        assert np.allclose(img.plane(), 255.0)


class TestF64Raw:
    def test_size_arithmetic(self, tmp_path):
        p = tmp_path / "m.f64"
        save_image(Image(np.zeros((2, 3))), str(p))
        assert p.stat().st_size == 16 + 48

    def test_roundtrip_full_precision(self, tmp_path):
        p = tmp_path / "m.f64"
        data = np.random.default_rng(3).random((4, 5, 2)) * 1e9
        save_image(Image(data), str(p))
        back = load_image(str(p))
        assert back.channels == 2
        assert np.array_equal(back.data, data)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "m.f64"
        p.write_bytes(b"XXXX" + b"\0" * 12)
        with pytest.raises(ImageIOError, match="magic"):
            load_image(str(p))


class TestRescale:
    def test_two_values(self):
        out = rescale(Image(np.array([[1.0, 3.0]])), 0, 255)
        assert out.plane().tolist() == [[0.0, 255.0]]

    def test_constant_goes_to_midpoint(self):
        out = rescale(Image(np.full((3, 3), 7.0)), 0, 255)
        assert np.all(out.plane() == 127.5)

    def test_three_values_unit(self):
        out = rescale(Image(np.array([[0.0, 1.0, 2.0]])), 0, 1)
        assert out.plane().tolist() == [[0.0, 0.5, 1.0]]

    def test_lo_ge_hi_rejected(self):
        with pytest.raises(ValueError):
            rescale(Image(np.zeros((2, 2))), 1.0, 1.0)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30))
    @settings(max_examples=50, deadline=None)
    def test_idempotent(self, vals):
        img = Image(np.array([vals]))
        once = rescale(img, 0, 1)
        twice = rescale(once, 0, 1)
        assert np.allclose(once.data, twice.data, atol=1e-12)


def conv2d_oracle(plane: np.ndarray, kernel1d: np.ndarray) -> np.ndarray:
    """Direct 2-D convolution with the separable product kernel, mirrored edges."""
    r = len(kernel1d) // 2
    k2 = np.outer(kernel1d, kernel1d)
    padded = np.pad(plane, r, mode="symmetric")
    h, w = plane.shape
    out = np.zeros_like(plane)
    for y in range(h):
        for x in range(w):
            out[y, x] = np.sum(padded[y : y + 2 * r + 1, x : x + 2 * r + 1] * k2)
    return out


class TestGaussianSmooth:
    def test_sigma_zero_identity(self):
        data = np.random.default_rng(0).random((6, 6))
        out = gaussian_smooth(Image(data), 0.0)
        assert np.array_equal(out.plane(), data)

    def test_constant_preserved(self):
        out = gaussian_smooth(Image(np.full((9, 9), 42.0)), 2.0)
        assert np.allclose(out.plane(), 42.0, atol=1e-12)

    def test_impulse_matches_direct_convolution(self):
        data = np.zeros((21, 21))
        data[10, 10] = 1.0
        out = gaussian_smooth(Image(data), 2.0)
        k = gaussian_kernel(2.0)
        expect = conv2d_oracle(data, k)
        assert np.allclose(out.plane(), expect, atol=1e-14)
        assert out.plane()[10, 10] == pytest.approx(k[len(k) // 2] ** 2)

    def test_random_image_matches_direct_convolution(self):
        data = np.random.default_rng(5).random((11, 13)) * 100
        out = gaussian_smooth(Image(data), 1.3)
        expect = conv2d_oracle(data, gaussian_kernel(1.3))
        assert np.allclose(out.plane(), expect, atol=1e-10)

    @given(st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_minmax_bounds(self, seed):
        data = np.random.default_rng(seed).random((8, 8)) * 200 - 100
        out = gaussian_smooth(Image(data), 1.5)
        assert out.plane().min() >= data.min() - 1e-9
        assert out.plane().max() <= data.max() + 1e-9


class TestSynthCompose:
    def test_all_inside(self):
        a, b = Image(np.zeros((4, 4))), Image(np.full((4, 4), 255.0))
        mask = ShapeMask(np.ones((4, 4), dtype=bool))
        assert np.array_equal(synth_compose(a, b, mask).data, a.data)

    def test_all_outside(self):
        a, b = Image(np.zeros((4, 4))), Image(np.full((4, 4), 255.0))
        mask = ShapeMask(np.zeros((4, 4), dtype=bool))
        assert np.array_equal(synth_compose(a, b, mask).data, b.data)

    def test_checkerboard(self):
        a, b = Image(np.zeros((4, 4))), Image(np.full((4, 4), 255.0))
        checker = (np.indices((4, 4)).sum(axis=0) % 2) == 0
        out = synth_compose(a, b, ShapeMask(checker))
        assert np.array_equal(out.plane() == 0.0, checker)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            synth_compose(Image(np.zeros((4, 4))), Image(np.zeros((4, 5))),
                          ShapeMask(np.ones((4, 4), dtype=bool)))


class TestStripeNoise:
    def test_period4_vertical_columns(self):
        mask = ShapeMask(np.ones((3, 8), dtype=bool))
        img = synth_stripe_noise(8, 3, mask, period=4, orientation="vertical", seed=1)
        assert img.plane()[0].tolist() == [0, 0, 255, 255, 0, 0, 255, 255]

    def test_horizontal_rows(self):
        pat = stripe_pattern(2, 6, 3, "horizontal")
        assert pat[:, 0].tolist() == [0, 0, 255, 0, 0, 255]

    def test_same_seed_identical(self):
        mask = ShapeMask(letter_e_mask(40, 40).inside)
        a = synth_stripe_noise(40, 40, mask, period=2, seed=99)
        b = synth_stripe_noise(40, 40, mask, period=2, seed=99)
        assert np.array_equal(a.data, b.data)

    def test_noise_mean_near_uniform_expectation(self):
        mask = ShapeMask(np.zeros((200, 200), dtype=bool))
        img = synth_stripe_noise(200, 200, mask, period=4, seed=7)
        assert 119 <= img.plane().mean() <= 136

    def test_period_too_small(self):
        with pytest.raises(ValueError, match="period"):
            stripe_pattern(4, 4, 1)


def flood_fill_4(inside: np.ndarray) -> int:
    """Pixels reachable from one inside seed via 4-neighbors."""
    h, w = inside.shape
    seen = np.zeros_like(inside)
    ys, xs = np.nonzero(inside)
    stack = [(int(ys[0]), int(xs[0]))]
    seen[stack[0]] = True
    count = 0
    while stack:
        y, x = stack.pop()
        count += 1
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and inside[ny, nx] and not seen[ny, nx]:
                seen[ny, nx] = True
                stack.append((ny, nx))
    return count


class TestLetterEMask:
    def test_deterministic_count(self):
        a = letter_e_mask(80, 80)
        b = letter_e_mask(80, 80)
        assert a.count() == b.count() > 0

    def test_connected_4(self):
        mask = letter_e_mask(80, 80)
        assert flood_fill_4(mask.inside) == mask.count()

    def test_connected_odd_dims(self):
        mask = letter_e_mask(97, 61)
        assert flood_fill_4(mask.inside) == mask.count()

    def test_inside_fraction(self):
        mask = letter_e_mask(80, 80)
        frac = mask.count() / (80 * 80)
        assert 0.1 < frac < 0.5

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            letter_e_mask(10, 80)
