#!/usr/bin/env python3
"""Compute descriptor maps for several graph settings on one image.

Writes a grey preview per setting plus the raw float64 map, and prints a
one-line summary (min/max/mean) for each, so the settings can be compared
side by side on the same input.
"""

import argparse
import os
import sys

from texgraph import (
    DescriptorConfig,
    Image,
    IndexKind,
    compute_descriptor_map,
    load_image,
    normalize_map,
    save_image,
)

ALL_SETTINGS = ("GwE", "GwA", "TwE", "TwA", "TuE", "TuA")


def parse_args() -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("image", help="input image (pgm/png)")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--settings", default=",".join(ALL_SETTINGS),
                    help="comma list of graph settings (default: all six)")
    ap.add_argument("--kind", default="IfV", choices=("IfV", "IfP", "IDE"))
    ap.add_argument("--rho", type=float, default=5.0)
    ap.add_argument("--beta", type=float, default=0.1)
    ap.add_argument("--q", type=float, default=0.1)
    ap.add_argument("--threads", type=int, default=4)
    return ap.parse_args()


def main() -> int:
    args = parse_args()
    u = load_image(args.image).plane(0)
    os.makedirs(args.out, exist_ok=True)
    kind = IndexKind(args.kind, q=args.q)
    for setting in args.settings.split(","):
        setting = setting.strip()
        cfg = DescriptorConfig(setting, kind, rho=args.rho, beta=args.beta)
        dmap = compute_descriptor_map(u, cfg, threads=args.threads)
        save_image(Image(dmap.values), f"{args.out}/{setting}.f64raw",
                   format="f64raw")
        preview = normalize_map(dmap).plane(0) * 255.0
        save_image(Image(preview), f"{args.out}/{setting}.pgm")
        v = dmap.values
        print(f"{setting}: min={v.min():.4f} max={v.max():.4f} "
              f"mean={v.mean():.4f} std={v.std():.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
