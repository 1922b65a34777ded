"""PU-SU pipeline error around the PU circles; writes results/fig5.csv."""

import argparse
from collections import defaultdict
from pathlib import Path

import numpy as np

from femtoloss import load_config
from femtoloss.configfile import default_config_path
from femtoloss.experiments import FIG5_HEADER, ExperimentSpec, run_fig5, theta_grid, to_csv

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(default_config_path()))
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--thetas", type=int, default=36)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/fig5.csv")
    args = ap.parse_args()

    cfg = load_config(args.config)
    spec = ExperimentSpec("fig5", trials=args.trials, thetas=theta_grid(args.thetas))
    rows = run_fig5(spec, cfg, threads=args.threads)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(to_csv(FIG5_HEADER, rows))

    by_circle = defaultdict(list)
    for r1, r0, _, m, _, _ in rows:
        by_circle[(r1, r0)].append(m)
    for (r1, r0), v in sorted(by_circle.items()):
        print(f"r1={r1:4.0f} r0={r0:4.0f}  mean {np.nanmean(v):5.2f} dB  max {np.nanmax(v):5.2f} dB")
