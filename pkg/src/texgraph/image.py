"""Image container, file I/O, smoothing, and synthetic test images.

Intensities are stored as float64 in a (height, width, channels) array.
Pixel coordinates are (row, col) with mesh size 1 on both axes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

F64RAW_MAGIC = b"TGF1"
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class ImageIOError(Exception):
    """Unreadable, malformed, or unwritable image file."""


@dataclass
class Image:
    data: np.ndarray  # (height, width, channels) float64

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValueError(f"image data must be 2-D or 3-D, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError(f"degenerate image shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image intensities must be finite")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def plane(self, c: int = 0) -> np.ndarray:
        """Single channel as a 2-D (height, width) view."""
        return self.data[:, :, c]


@dataclass
class ShapeMask:
    inside: np.ndarray  # (height, width) bool

    def __post_init__(self) -> None:
        arr = np.asarray(self.inside, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        self.inside = arr

    @property
    def height(self) -> int:
        return self.inside.shape[0]

    @property
    def width(self) -> int:
        return self.inside.shape[1]

    def count(self) -> int:
        return int(self.inside.sum())


# ---------------------------------------------------------------------------
# file I/O

def _infer_format(path: str) -> str:
    lower = str(path).lower()
    if lower.endswith(".pgm"):
        return "pgm"
    if lower.endswith(".png"):
        return "png"
    if lower.endswith((".f64", ".f64raw", ".raw")):
        return "f64raw"
    raise ImageIOError(f"cannot infer image format from path {path!r}")


def _read_pgm(raw: bytes) -> np.ndarray:
    # Header tokens may be interleaved with '#' comments; P5 payload is binary.
    if len(raw) < 2 or raw[:2] not in (b"P2", b"P5"):
        raise ImageIOError("malformed header: not a P2/P5 PGM")
    magic = raw[:2]
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageIOError("malformed header: truncated PGM header")
        try:
            fields.append(int(raw[start:pos]))
        except ValueError as exc:
            raise ImageIOError("malformed header: non-numeric PGM field") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ImageIOError("malformed header: bad PGM dimensions")
    if not 0 < maxval <= 255:
        raise ImageIOError(f"unsupported bit depth: PGM maxval {maxval}")
    if magic == b"P5":
        body = raw[pos + 1 : pos + 1 + width * height]
        if len(body) < width * height:
            raise ImageIOError("malformed image payload")
        pixels = np.frombuffer(body, dtype=np.uint8).astype(np.float64)
    else:
        tokens = raw[pos:].split()
        if len(tokens) < width * height:
            raise ImageIOError("malformed image payload")
        try:
            pixels = np.array([int(t) for t in tokens[: width * height]], dtype=np.float64)
        except ValueError as exc:
            raise ImageIOError("malformed image payload") from exc
    return pixels.reshape(height, width)


def _read_png(path: str, grayscale: bool) -> np.ndarray:
    from PIL import Image as PILImage

    with PILImage.open(path) as im:
        mode = im.mode
        if mode == "P":
            im = im.convert("RGB")
            mode = "RGB"
        if mode == "RGBA":
            im = im.convert("RGB")
            mode = "RGB"
        if mode == "L":
            return np.asarray(im, dtype=np.float64)
        if mode in ("I", "I;16"):
            arr = np.asarray(im, dtype=np.float64)
            return arr * (255.0 / 65535.0)
        if mode == "RGB":
            arr = np.asarray(im, dtype=np.float64)
            if grayscale:
                w = np.array(LUMA_WEIGHTS)
                return arr @ w
            return arr
        raise ImageIOError(f"unsupported bit depth or mode: {mode}")


def _read_f64raw(raw: bytes) -> np.ndarray:
    if len(raw) < 16 or raw[:4] != F64RAW_MAGIC:
        raise ImageIOError("malformed header: bad f64raw magic")
    width, height, channels = struct.unpack("<III", raw[4:16])
    if width < 1 or height < 1 or channels < 1:
        raise ImageIOError("malformed header: bad f64raw dimensions")
    need = width * height * channels * 8
    if len(raw) - 16 < need:
        raise ImageIOError("malformed image payload")
    arr = np.frombuffer(raw[16 : 16 + need], dtype="<f8")
    return arr.reshape(height, width, channels).astype(np.float64)


def load_image(path: str, format: str | None = None, grayscale: bool = True) -> Image:
    """Read a PGM (P2/P5, maxval <= 255), PNG, or f64raw file.

    PNG intensities are mapped to [0,255] reals; RGB collapses to luma
    when grayscale is requested.
    """
    fmt = format or _infer_format(path)
    try:
        if fmt == "png":
            return Image(_read_png(path, grayscale))
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ImageIOError(f"unreadable file {path!r}: {exc}") from exc
    if fmt == "pgm":
        return Image(_read_pgm(raw))
    if fmt == "f64raw":
        return Image(_read_f64raw(raw))
    raise ImageIOError(f"unknown image format {fmt!r}")


def _to_uint8(img: Image) -> np.ndarray:
    rounded = np.rint(img.data)
    if rounded.min() < 0 or rounded.max() > 255:
        raise ValueError("value outside [0,255]")
    return rounded.astype(np.uint8)


def save_image(img: Image, path: str, format: str | None = None) -> None:
    """Write pgm/png (rounded to integers in [0,255]) or full-precision f64raw.

    f64raw layout: magic "TGF1", then width/height/channels as u32
    little-endian, then row-major (channel fastest) little-endian float64.
    """
    fmt = format or _infer_format(path)
    try:
        if fmt == "pgm":
            if img.channels != 1:
                raise ValueError("pgm supports single-channel images only")
            payload = _to_uint8(img)[:, :, 0]
            header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
            with open(path, "wb") as fh:
                fh.write(header)
                fh.write(payload.tobytes())
        elif fmt == "png":
            from PIL import Image as PILImage

            payload = _to_uint8(img)
            if img.channels == 1:
                pil = PILImage.fromarray(payload[:, :, 0], mode="L")
            elif img.channels == 3:
                pil = PILImage.fromarray(payload, mode="RGB")
            else:
                raise ValueError("png supports 1 or 3 channels")
            pil.save(path, format="PNG")
        elif fmt == "f64raw":
            header = F64RAW_MAGIC + struct.pack("<III", img.width, img.height, img.channels)
            with open(path, "wb") as fh:
                fh.write(header)
                fh.write(img.data.astype("<f8").tobytes(order="C"))
        else:
            raise ImageIOError(f"unknown image format {fmt!r}")
    except OSError as exc:
        raise ImageIOError(f"unwritable path {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# intensity transforms

def rescale(img: Image, lo: float, hi: float) -> Image:
    """Affine map sending min->lo and max->hi; constant images go to the midpoint."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo} >= {hi}")
    vmin = float(img.data.min())
    vmax = float(img.data.max())
    if vmin == vmax:
        return Image(np.full_like(img.data, 0.5 * (lo + hi)))
    out = (img.data - vmin) * ((hi - lo) / (vmax - vmin)) + lo
    return Image(out)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian, radius ceil(3*sigma), normalized to sum 1."""
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _convolve_axis(plane: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(plane, pad, mode="symmetric")
    windows = np.lib.stride_tricks.sliding_window_view(padded, len(kernel), axis=axis)
    return windows @ kernel


def gaussian_smooth(img: Image, sigma: float) -> Image:
    """Separable Gaussian convolution with mirrored boundary; sigma=0 is identity."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return Image(img.data.copy())
    kernel = gaussian_kernel(sigma)
    out = np.empty_like(img.data)
    for c in range(img.channels):
        plane = _convolve_axis(img.plane(c), kernel, axis=0)
        out[:, :, c] = _convolve_axis(plane, kernel, axis=1)
    return Image(out)


# ---------------------------------------------------------------------------
# synthetic test images

def stripe_pattern(width: int, height: int, period: int,
                   orientation: str = "vertical") -> np.ndarray:
    """Binary 0/255 stripes; value 255 where (coord % period) >= (period+1)//2."""
    if period < 2:
        raise ValueError(f"period must be >= 2, got {period}")
    if orientation not in ("horizontal", "vertical"):
        raise ValueError(f"unknown orientation {orientation!r}")
    if orientation == "vertical":
        coord = np.arange(width) % period
        row = np.where(coord >= (period + 1) // 2, 255.0, 0.0)
        return np.tile(row, (height, 1))
    coord = np.arange(height) % period
    col = np.where(coord >= (period + 1) // 2, 255.0, 0.0)
    return np.tile(col[:, None], (1, width))


def noise_pattern(width: int, height: int, seed: int) -> np.ndarray:
    """I.i.d. uniform integers in [0,255] from a seeded generator."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(height, width)).astype(np.float64)


def synth_compose(tex_a: Image, tex_b: Image, mask: ShapeMask) -> Image:
    """tex_a where the mask is inside, tex_b elsewhere."""
    if (tex_a.height, tex_a.width) != (tex_b.height, tex_b.width) or \
            (tex_a.height, tex_a.width) != (mask.height, mask.width) or \
            tex_a.channels != tex_b.channels:
        raise ValueError("dimension mismatch between textures and mask")
    out = np.where(mask.inside[:, :, None], tex_a.data, tex_b.data)
    return Image(out)


def synth_stripe_noise(width: int, height: int, mask: ShapeMask, period: int = 2,
                       orientation: str = "vertical", seed: int = 0) -> Image:
    """Binary stripes inside the mask, seeded uniform noise outside.

    The noise field is generated for the full canvas so the outside pixels
    are independent of the mask shape; identical seeds give identical images.
    """
    if (mask.height, mask.width) != (height, width):
        raise ValueError("dimension mismatch between mask and canvas")
    stripes = stripe_pattern(width, height, period, orientation)
    noise = noise_pattern(width, height, seed)
    return Image(np.where(mask.inside, stripes, noise))


def letter_e_mask(width: int, height: int) -> ShapeMask:
    """Block-letter 'E' in the central 60% of the canvas.

    The letter box is 7 bar thicknesses tall: horizontal bars occupy the
    t-intervals [0,1), [3,4), [6,7) of the box, the vertical bar the left
    edge, all with thickness t = letter_height/7.
    """
    if width < 40 or height < 40:
        raise ValueError(f"canvas must be at least 40x40, got {width}x{height}")
    letter_h = int(0.6 * height + 0.5)
    letter_w = int(0.6 * width + 0.5)
    top = (height - letter_h) // 2
    left = (width - letter_w) // 2
    t = letter_h / 7.0

    inside = np.zeros((height, width), dtype=bool)
    for k in (0, 3, 6):
        y0 = top + int(k * t + 0.5)
        y1 = top + int((k + 1) * t + 0.5)
        inside[y0:y1, left : left + letter_w] = True
    inside[top : top + letter_h, left : left + int(t + 0.5)] = True
    return ShapeMask(inside)
