"""Worst-case and circle-averaged fig5 error as the PU power cap varies.

Angles are folded onto [0, pi] (the geometry is mirror-symmetric), so this is a
cheaper sweep than the full reproduction.
"""

import argparse
from collections import defaultdict

import numpy as np

from femtoloss import default_config
from femtoloss.experiments import ExperimentSpec, run_fig5, theta_grid
from femtoloss.model import dbm_to_w

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--pmax-dbm", type=float, nargs="+", default=[23, 27, 30, 33, 36, 40])
    ap.add_argument("--trials", type=int, default=100)
    args = ap.parse_args()

    base = default_config()
    half = tuple(t for t in theta_grid(36) if t < np.pi)
    spec = ExperimentSpec("fig5", trials=args.trials, thetas=half)
    print("pmax_dbm,max_err_db," + ",".join(f"avg_r1_{a:.0f}_r0_{b:.0f}" for a in spec.r1_list for b in spec.r0_list))
    for pmax in args.pmax_dbm:
        rows = run_fig5(spec, base.with_(Pmax=dbm_to_w(pmax)))
        avg = defaultdict(list)
        for r1, r0, _, m, _, _ in rows:
            avg[(r1, r0)].append(m)
        cells = [f"{np.mean(avg[(a, b)]):.3f}" for a in spec.r1_list for b in spec.r0_list]
        print(f"{pmax:g},{max(r[3] for r in rows):.3f}," + ",".join(cells), flush=True)
