"""BS-PU MAP error vs PU distance; writes results/fig3.csv."""

import argparse
from pathlib import Path

from femtoloss import load_config
from femtoloss.configfile import default_config_path
from femtoloss.experiments import FIG3_HEADER, ExperimentSpec, run_fig3, to_csv

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=str(default_config_path()))
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/fig3.csv")
    args = ap.parse_args()

    cfg = load_config(args.config)
    rows = run_fig3(ExperimentSpec("fig3", trials=args.trials), cfg, threads=args.threads)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(to_csv(FIG3_HEADER, rows))
    for d, m, se, _ in rows:
        print(f"{d:6.0f} m  {m:6.3f} dB  (+/- {se:.3f})")
