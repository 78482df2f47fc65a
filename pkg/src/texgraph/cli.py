"""Command-line pipeline around the library.

Subcommands cover the full workflow: synthesize benchmark images, turn an
image into descriptor maps, segment with the level-set solver, tabulate
dimension curves or measure sphere growth, and score a mask against ground
truth.  Every run is reproducible: identical flags and seeds give identical
output bytes.

Exit codes: 0 success (including a segmentation that reaches its iteration
cap), 2 usage error, 3 contour vanished, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .descriptors import (DescriptorConfig, DescriptorMap,
                          compute_descriptor_map, normalize_map, stack_maps)
from .entropy import IndexKind
from .gac import (CircleContour, ContourVanishedError, GacParams,
                  MaskContour, RectangleContour, edge_map, interior_area,
                  jaccard, pixel_accuracy, run_gac, signed_distance)
from .image import (Image, ImageIOError, ShapeMask, letter_e_mask,
                    load_image, noise_pattern, save_image, stripe_pattern,
                    synth_compose, synth_stripe_noise)
from .fractal import (aggregate_sphere_growth, dimension_curve, fit_local_dimension,
                      grid_centers)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VANISHED = 3
EXIT_IO = 4

_UNSET = object()


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# flag table and config-file merging

def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if v < 0.0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer, got {text}")
    return v


def _choice(*options: str) -> Callable[[str], str]:
    def conv(text: str) -> str:
        if text not in options:
            raise argparse.ArgumentTypeError(
                f"expected one of {', '.join(options)}; got {text!r}")
        return text
    return conv


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not values:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")
    return values


def _circle_spec(text: str) -> CircleContour:
    parts = _float_list(text)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("circle takes row,col,radius")
    return CircleContour((parts[0], parts[1]), parts[2])


def _rect_spec(text: str) -> RectangleContour:
    parts = _float_list(text)
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("rect takes top,left,bottom,right")
    return RectangleContour((int(parts[0]), int(parts[1])),
                            (int(parts[2]), int(parts[3])))


@dataclass(frozen=True)
class _Flag:
    name: str
    conv: Callable[[str], object]
    default: object
    help: str
    required: bool = False
    repeatable: bool = False

    @property
    def dest(self) -> str:
        return {"--lambda": "lam", "--in": "inputs"}.get(
            self.name, self.name.lstrip("-").replace("-", "_"))

    @property
    def key(self) -> str:
        return self.name.lstrip("-").replace("-", "_")


@dataclass
class RunConfig:
    """Merged subcommand parameters: explicit flags win over config-file keys."""

    values: dict = field(default_factory=dict)

    def __getattr__(self, name: str):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def _add_flags(parser: argparse.ArgumentParser, flags: list[_Flag]) -> None:
    for f in flags:
        kwargs = dict(dest=f.dest, type=f.conv, default=_UNSET, help=f.help)
        if f.repeatable:
            kwargs["action"] = "append"
            kwargs["default"] = None
        parser.add_argument(f.name, **kwargs)
    parser.add_argument("--config", dest="config", default=None,
                        help="key=value file merged under explicit flags")
    parser.add_argument("--threads", dest="threads", type=_positive_int,
                        default=_UNSET, help="worker cap for data-parallel internals "
                        "(does not change results; default 1)")


def _parse_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ImageIOError(f"unreadable config {path!r}: {exc}") from exc
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, _, raw = body.partition("=")
        value = raw.strip().strip('"').strip("'")
        entries[key.strip().replace("-", "_")] = value
    return entries


def merge_config(ns: argparse.Namespace, flags: list[_Flag]) -> RunConfig:
    """Resolve each flag from (explicit flag, config key, default), in that order."""
    threads = _Flag("--threads", _positive_int, 1,
                    "worker cap for data-parallel internals")
    flags = flags + [threads]
    by_key = {f.key: f for f in flags}
    values: dict[str, object] = {f.dest: f.default for f in flags}
    if ns.config is not None:
        for key, raw in _parse_config_file(ns.config).items():
            f = by_key.get(key)
            if f is None:
                raise UsageError(f"unknown config key {key!r}")
            try:
                parsed = f.conv(raw)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from exc
            values[f.dest] = [parsed] if f.repeatable else parsed
    for f in flags:
        explicit = getattr(ns, f.dest)
        if explicit is not _UNSET and explicit is not None:
            values[f.dest] = explicit
    for f in flags:
        if f.required and values[f.dest] is None:
            raise UsageError(f"missing required flag {f.name}")
    return RunConfig(values)


# ---------------------------------------------------------------------------
# shared helpers

def _write_mask(mask: ShapeMask, path: str) -> None:
    save_image(Image(np.where(mask.inside, 255.0, 0.0)), path)


def _load_mask(path: str) -> ShapeMask:
    return ShapeMask(load_image(path).plane(0) > 127.0)


def _preview(values: np.ndarray) -> Image:
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        return Image(np.rint((values - lo) / (hi - lo) * 255.0))
    return Image(np.full_like(values, 128.0))


def _ensure_dir(path: str) -> None:
    import os

    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ImageIOError(f"unwritable path {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# synth

_SYNTH_FLAGS = [
    _Flag("--kind", _choice("e-compose", "e-stripes"), None,
          "fixture family: letter E over two textures, or stripes/noise", required=True),
    _Flag("--out", str, None, "output directory", required=True),
    _Flag("--seed", _nonneg_int, 0, "noise seed (default 0)"),
    _Flag("--width", _positive_int, 80, "canvas width (default 80)"),
    _Flag("--height", _positive_int, 80, "canvas height (default 80)"),
    _Flag("--period", _positive_int, 2, "stripe period in pixels (default 2)"),
    _Flag("--orientation", _choice("vertical", "horizontal"), "vertical",
          "stripe orientation (default vertical)"),
]


def cmd_synth(cfg: RunConfig) -> int:
    mask = letter_e_mask(cfg.width, cfg.height)
    if cfg.kind == "e-stripes":
        img = synth_stripe_noise(cfg.width, cfg.height, mask, period=cfg.period,
                                 orientation=cfg.orientation, seed=cfg.seed)
    else:
        checker = Image(np.where(stripe_pattern(cfg.width, cfg.height, cfg.period, "vertical")
                                 == stripe_pattern(cfg.width, cfg.height, cfg.period, "horizontal"),
                                 255.0, 0.0))
        img = synth_compose(Image(noise_pattern(cfg.width, cfg.height, cfg.seed)), checker, mask)
    _ensure_dir(cfg.out)
    save_image(img, f"{cfg.out}/{cfg.kind}.pgm")
    _write_mask(mask, f"{cfg.out}/{cfg.kind}-truth.pgm")
    return EXIT_OK


# ---------------------------------------------------------------------------
# descriptor

_DESCRIPTOR_FLAGS = [
    _Flag("--in", str, None, "input image (pgm/png/f64raw)", required=True),
    _Flag("--out", str, None, "output basename; writes <out>.f64raw and <out>.pgm",
          required=True),
    _Flag("--setting", _choice("GwE", "GwA", "TwE", "TwA", "TuE", "TuA"), "GwA",
          "patch-graph setting (default GwA)"),
    _Flag("--kind", _choice("IfV", "IfP", "IDE"), "IfV", "entropy index (default IfV)"),
    _Flag("--rho", _positive_float, 5.0, "patch radius (default 5)"),
    _Flag("--beta", _positive_float, 0.1, "contrast scale (default 0.1)"),
    _Flag("--q", float, 0.1, "information-functional weight in (0,1) (default 0.1)"),
    _Flag("--M", _positive_float, None, "functional coefficient (default 1/(1-q))"),
    _Flag("--nbhd", _choice("four", "eight"), "eight", "grid neighborhood (default eight)"),
    _Flag("--channel-weight", _positive_float, 1.0,
          "weight applied when the map is stacked into a feature image (default 1)"),
]


def cmd_descriptor(cfg: RunConfig) -> int:
    img = load_image(cfg.inputs)
    kind = IndexKind(cfg.kind, q=cfg.q, M=cfg.M)
    dcfg = DescriptorConfig(cfg.setting, kind, rho=cfg.rho, beta=cfg.beta,
                            nbhd=cfg.nbhd, channel_weight=cfg.channel_weight)
    dmap = compute_descriptor_map(img.plane(0), dcfg, threads=cfg.threads)
    save_image(Image(dmap.values), f"{cfg.out}.f64raw", format="f64raw")
    save_image(_preview(dmap.values), f"{cfg.out}.pgm")
    v = dmap.values
    print("min,max,mean")
    print(f"{v.min():.17g},{v.max():.17g},{v.mean():.17g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# segment

_SEGMENT_FLAGS = [
    _Flag("--in", str, None, "descriptor map (f64raw, repeatable) or one raw image",
          required=True, repeatable=True),
    _Flag("--out", str, None, "output directory", required=True),
    _Flag("--circle", _circle_spec, None, "seed contour circle row,col,radius"),
    _Flag("--rect", _rect_spec, None, "seed contour rectangle top,left,bottom,right"),
    _Flag("--mask", str, None, "seed contour mask image path"),
    _Flag("--sigma", _nonneg_float, 1.0, "pre-smoothing width (default 1)"),
    _Flag("--lambda", _positive_float, 0.1, "edge-stopping contrast (default 0.1)"),
    _Flag("--nu", float, -1.0, "balloon force, negative expands (default -1)"),
    _Flag("--tau", _positive_float, 0.1, "time step (default 0.1)"),
    _Flag("--iters", _positive_int, 10000, "iteration cap (default 10000)"),
    _Flag("--reinit-every", _positive_int, 100,
          "reinitialization cadence in iterations (default 100)"),
    _Flag("--steady-window", _positive_int, 100,
          "iterations without mask change that declare steady state (default 100)"),
    _Flag("--snapshot-every", _nonneg_int, 0,
          "overlay snapshot cadence in iterations (0 disables, default 0)"),
    _Flag("--channel-weight", _float_list, None,
          "comma list of per-map weights for f64raw inputs (default all 1)"),
]


def _segment_feature(cfg: RunConfig) -> Image:
    paths = cfg.inputs
    formats = []
    for p in paths:
        try:
            fmt = "f64raw" if p.endswith(".f64raw") else "raster"
        except AttributeError:
            raise UsageError("bad --in value")
        formats.append(fmt)
    if all(f == "f64raw" for f in formats):
        weights = cfg.channel_weight or (1.0,) * len(paths)
        if len(weights) != len(paths):
            raise UsageError("need one --channel-weight entry per map")
        maps = []
        for p, w in zip(paths, weights):
            data = load_image(p).plane(0)
            neutral = DescriptorConfig("GwA", IndexKind("IfV"), channel_weight=w)
            maps.append(DescriptorMap(data, neutral))
        return stack_maps(maps)
    if len(paths) == 1 and formats[0] == "raster":
        if cfg.channel_weight is not None:
            raise UsageError("--channel-weight applies to f64raw maps only")
        return Image(load_image(paths[0], grayscale=False).data / 255.0)
    raise UsageError("inputs must be f64raw descriptor maps or a single raw image")


def _overlay(base: np.ndarray, mask: np.ndarray) -> Image:
    inside = mask
    core = (np.roll(inside, 1, 0) & np.roll(inside, -1, 0)
            & np.roll(inside, 1, 1) & np.roll(inside, -1, 1) & inside)
    boundary = inside & ~core
    rgb = np.repeat(base[:, :, None], 3, axis=2)
    rgb[boundary] = (255.0, 0.0, 0.0)
    return Image(rgb)


def cmd_segment(cfg: RunConfig) -> int:
    feature = _segment_feature(cfg)
    contours = [c for c in (cfg.circle, cfg.rect,
                            MaskContour(_load_mask(cfg.mask)) if cfg.mask else None)
                if c is not None]
    if len(contours) != 1:
        raise UsageError("exactly one of --circle, --rect, --mask is required")
    e = edge_map(feature, sigma=cfg.sigma, lam=cfg.lam)
    u0 = signed_distance(contours[0], feature.width, feature.height)
    params = GacParams(nu=cfg.nu, tau=cfg.tau, reinit_every=cfg.reinit_every,
                       max_iters=cfg.iters, steady_window=cfg.steady_window)
    _ensure_dir(cfg.out)
    base = _preview(feature.plane(0)).plane(0)

    rows = [(0, 0.0, interior_area(u0), 0)]
    last_change = [0]

    def observer(iteration, fld, mask, changed):
        rows.append((iteration, fld.time, interior_area(fld), changed))
        if changed:
            last_change[0] = iteration
        if cfg.snapshot_every and iteration % cfg.snapshot_every == 0:
            save_image(_overlay(base, mask.inside),
                       f"{cfg.out}/overlay-{iteration:06d}.png")

    try:
        fld, mask, iters = run_gac(u0, e, params, observer=observer)
    except ContourVanishedError as exc:
        _write_iteration_csv(cfg.out, rows)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VANISHED
    _write_iteration_csv(cfg.out, rows)
    _write_mask(mask, f"{cfg.out}/final-mask.pgm")
    steady = iters - last_change[0] >= params.steady_window
    print("steady,iterations,time,interior_area")
    print(f"{str(steady).lower()},{iters},{fld.time:.12g},{interior_area(fld):.12g}")
    return EXIT_OK


def _write_iteration_csv(out_dir: str, rows) -> None:
    try:
        with open(f"{out_dir}/iterations.csv", "w", encoding="ascii") as fh:
            fh.write("iteration,time,interior_area,changed_pixels\n")
            for it, t, area, changed in rows:
                fh.write(f"{it},{t:.12g},{area:.12g},{changed}\n")
    except OSError as exc:
        raise ImageIOError(f"unwritable path {out_dir!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# fractal

_FRACTAL_FLAGS = [
    _Flag("--mode", _choice("curves", "growth"), None,
          "curves: tabulate ln f over dimension; growth: measure sphere volumes",
          required=True),
    _Flag("--out", str, None, "output directory", required=True),
    _Flag("--q", _float_list, (0.1, 0.5, 0.7), "comma list of q values (curves mode)"),
    _Flag("--M", _positive_float, 1.0, "functional coefficient (default 1)"),
    _Flag("--delta-step", _positive_float, 0.01, "dimension grid step (default 0.01)"),
    _Flag("--evaluator", _choice("quadrature", "closed-negative", "closed-positive"),
          "quadrature", "curve evaluator (default quadrature)"),
    _Flag("--in", str, None, "input image (growth mode)"),
    _Flag("--setting", _choice("GwE", "GwA", "TwE", "TwA", "TuE", "TuA"), "GwA",
          "patch-graph setting (default GwA)"),
    _Flag("--rho", _positive_float, 12.0, "patch radius (default 12)"),
    _Flag("--beta", _positive_float, 10.0, "contrast scale (default 10)"),
    _Flag("--nbhd", _choice("four", "eight"), "eight", "grid neighborhood (default eight)"),
    _Flag("--step", _positive_int, 8, "center lattice step (default 8)"),
    _Flag("--margin", _nonneg_int, 13, "center lattice margin (default 13)"),
    _Flag("--radius-max", _positive_int, 12, "largest sphere radius (default 12)"),
    _Flag("--fit-min", _positive_float, 3.0, "fit range lower radius (default 3)"),
    _Flag("--fit-max", _positive_float, 12.0, "fit range upper radius (default 12)"),
]


def cmd_fractal(cfg: RunConfig) -> int:
    _ensure_dir(cfg.out)
    if cfg.mode == "curves":
        n = int(round(2.0 / cfg.delta_step))
        grid = np.linspace(0.0, 2.0, n + 1)
        for q in cfg.q:
            curve = dimension_curve(q, M=cfg.M, delta_grid=grid, evaluator=cfg.evaluator)
            path = f"{cfg.out}/curve-q{q:g}.csv"
            try:
                with open(path, "w", encoding="ascii") as fh:
                    fh.write("delta,ln_fv,ln_fp\n")
                    for d, fv, fp in curve.rows():
                        fh.write(f"{d:.12g},{fv:.12g},{fp:.12g}\n")
            except OSError as exc:
                raise ImageIOError(f"unwritable path {path!r}: {exc}") from exc
        return EXIT_OK
    if cfg.inputs is None:
        raise UsageError("growth mode requires --in")
    img = load_image(cfg.inputs)
    plane = img.plane(0)
    centers = grid_centers(img.height, img.width, cfg.step, cfg.margin)
    radii = np.arange(1.0, float(cfg.radius_max) + 0.5)
    sample = aggregate_sphere_growth(plane, centers, radii, setting=cfg.setting,
                                     rho=cfg.rho, beta=cfg.beta, nbhd=cfg.nbhd)
    try:
        with open(f"{cfg.out}/growth.csv", "w", encoding="ascii") as fh:
            fh.write("d,volume\n")
            for d, vol in zip(sample.radii, sample.volumes):
                fh.write(f"{d:.12g},{vol:.12g}\n")
    except OSError as exc:
        raise ImageIOError(f"unwritable path {cfg.out!r}: {exc}") from exc
    delta_hat = fit_local_dimension(sample, (cfg.fit_min, cfg.fit_max))
    print("delta_hat")
    print(f"{delta_hat:.12g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval

_EVAL_FLAGS = [
    _Flag("--mask", str, None, "segmentation mask image", required=True),
    _Flag("--truth", str, None, "ground-truth mask image", required=True),
]


def cmd_eval(cfg: RunConfig) -> int:
    mask = _load_mask(cfg.mask)
    truth = _load_mask(cfg.truth)
    print("jaccard,pixel_accuracy")
    print(f"{jaccard(mask, truth):.12g},{pixel_accuracy(mask, truth):.12g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# driver

_SUBCOMMANDS: dict[str, tuple[list[_Flag], Callable[[RunConfig], int], str]] = {
    "synth": (_SYNTH_FLAGS, cmd_synth,
              "write a synthetic benchmark image and its ground-truth mask"),
    "descriptor": (_DESCRIPTOR_FLAGS, cmd_descriptor,
                   "compute a descriptor map (f64raw + pgm preview, stats on stdout)"),
    "segment": (_SEGMENT_FLAGS, cmd_segment,
                "run the level-set segmentation over descriptor maps or a raw image"),
    "fractal": (_FRACTAL_FLAGS, cmd_fractal,
                "tabulate dimension curves or measure sphere growth on an image"),
    "eval": (_EVAL_FLAGS, cmd_eval,
             "score a mask against ground truth (Jaccard + pixel accuracy)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texgraph",
        description="graph-entropy texture descriptors and level-set segmentation")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name, (flags, _, blurb) in _SUBCOMMANDS.items():
        sub = subs.add_parser(name, help=blurb, description=blurb)
        _add_flags(sub, flags)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    flags, runner, _ = _SUBCOMMANDS[ns.subcommand]
    try:
        cfg = merge_config(ns, flags)
        return runner(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImageIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
