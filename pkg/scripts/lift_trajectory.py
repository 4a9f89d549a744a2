"""Horizontal lift of an orthonormal frame along a segment, written as CSV.

Example:
    python scripts/lift_trajectory.py --builtin rot30 --start -0.4,-0.4 --direction 0.8,0.6 --t-max 1
"""
import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from hessinv import catalog
from hessinv.connection import Segment, horizontal_lift, orthonormal_diagonal_frame


@dataclass(frozen=True)
class LiftConfig:
    builtin: str
    start: tuple
    direction: tuple
    t_max: float = 1.0
    step: float = 1e-3
    every: int = 50


def parse(argv=None) -> LiftConfig:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--builtin", default="rot30", choices=sorted(catalog.CATALOG))
    ap.add_argument("--start", required=True)
    ap.add_argument("--direction", required=True)
    ap.add_argument("--t-max", type=float, default=1.0)
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--every", type=int, default=50, help="write every n-th step")
    ns = ap.parse_args(argv)
    vec = lambda s: tuple(float(v) for v in s.split(","))
    return LiftConfig(ns.builtin, vec(ns.start), vec(ns.direction), ns.t_max, ns.step, ns.every)


def main(argv=None):
    cfg = parse(argv)
    f = catalog.get(cfg.builtin)
    x0 = np.array(cfg.start)
    res = horizontal_lift(f, Segment(x0, np.array(cfg.direction), cfg.t_max),
                          orthonormal_diagonal_frame(f.hessian(x0)), step=cfg.step)
    w = csv.writer(sys.stdout, lineterminator="\n")
    n = f.dim
    w.writerow(["t", *[f"A{i + 1}{j + 1}" for i in range(n) for j in range(n)], "orthonormality_drift", "c_drift"])
    for i, row in enumerate(res.rows()):
        if i % cfg.every == 0 or i == len(res.t) - 1:
            w.writerow([format(float(v), ".12g") for v in row])
    print(f"# halving error {res.halving_error:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
