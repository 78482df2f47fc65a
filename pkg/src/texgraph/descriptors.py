"""Per-pixel descriptor maps: sweep a (graph setting, entropy index) pair.

A descriptor map evaluates one entropy index on the patch graph of every
pixel. Border pixels use clipped patches. Maps can be affinely
normalized to [0, 1] and stacked (with per-channel weights) into a
multi-channel image for segmentation.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entropy import IndexKind, evaluate_index
from .image import Image
from .patchgraph import OFFSETS, SETTINGS, _as_plane, build_setting

UNWEIGHTED_SETTINGS = ("TuE", "TuA")


@dataclass(frozen=True)
class DescriptorConfig:
    setting: str
    kind: IndexKind
    rho: float = 5.0
    beta: float = 0.1
    nbhd: str = "eight"
    channel_weight: float = 1.0

    def __post_init__(self) -> None:
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown graph setting {self.setting!r}; expected one of {SETTINGS}")
        if self.nbhd not in OFFSETS:
            raise ValueError(f"unknown neighborhood {self.nbhd!r}")
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.channel_weight > 0.0:
            raise ValueError(f"channel_weight must be positive, got {self.channel_weight}")
        if self.kind.tag == "IDE" and self.setting not in UNWEIGHTED_SETTINGS:
            raise ValueError(
                f"IDE requires unweighted graph settings {UNWEIGHTED_SETTINGS}, "
                f"got {self.setting!r}"
            )


@dataclass
class DescriptorMap:
    values: np.ndarray
    config: DescriptorConfig

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("descriptor values must be a 2-D grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("descriptor values must be finite")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def _sweep_rows(plane: np.ndarray, cfg: DescriptorConfig, rows: range) -> np.ndarray:
    out = np.empty((len(rows), plane.shape[1]))
    for i, y in enumerate(rows):
        for x in range(plane.shape[1]):
            g = build_setting(plane, (y, x), cfg.setting,
                              rho=cfg.rho, beta=cfg.beta, nbhd=cfg.nbhd)
            out[i, x] = evaluate_index(g, cfg.kind)
    return out


def compute_descriptor_map(u, cfg: DescriptorConfig, threads: int = 1) -> DescriptorMap:
    """Evaluate cfg's index on the patch graph of every pixel.

    threads > 1 splits the sweep into contiguous row blocks executed in
    worker processes; block results are reassembled in row order, so the
    output is independent of the worker count.
    """
    plane = _as_plane(u)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    h = plane.shape[0]
    if threads == 1 or h < 2 * threads:
        values = _sweep_rows(plane, cfg, range(h))
        return DescriptorMap(values, cfg)
    bounds = np.linspace(0, h, threads + 1).astype(int)
    blocks = [range(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_sweep_rows, [plane] * len(blocks), [cfg] * len(blocks), blocks))
    return DescriptorMap(np.vstack(parts), cfg)


def normalize_map(m: DescriptorMap) -> Image:
    """Affine rescale of the values to [0, 1]; constant maps become 0.5."""
    v = m.values
    lo = float(v.min())
    hi = float(v.max())
    if hi > lo:
        return Image((v - lo) / (hi - lo))
    return Image(np.full_like(v, 0.5))


def stack_maps(maps) -> Image:
    """Multi-channel image: channel i = channel_weight_i * normalize_map(maps[i])."""
    maps = list(maps)
    if not maps:
        raise ValueError("need at least one descriptor map")
    shape = maps[0].values.shape
    if any(m.values.shape != shape for m in maps):
        raise ValueError("dimension mismatch between descriptor maps")
    channels = [m.config.channel_weight * normalize_map(m).plane(0) for m in maps]
    return Image(np.stack(channels, axis=-1))
