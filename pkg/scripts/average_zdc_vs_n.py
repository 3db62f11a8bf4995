#!/usr/bin/env python
"""Average z_DC versus number of tones for every waveform strategy.

Writes the sweep table to CSV and prints it with each strategy's mean
relative to the numeric optimum.
"""
from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from wptwave.harness import ExperimentConfig, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--realizations", type=int, help="override n_realizations")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("average_zdc.csv"))
    args = ap.parse_args()

    cfg = ExperimentConfig.from_json_file(args.config) if args.config else ExperimentConfig()
    if args.realizations:
        cfg = replace(cfg, n_realizations=args.realizations)
    res = run_sweep(cfg, workers=args.workers)
    args.out.write_text(res.to_csv())

    print(f"{'N':>3} {'strategy':>13} {'mean z_DC':>12} {'stderr':>10} {'vs opt':>7} {'beta':>6}")
    for row in res.rows:
        ref = res.row(row.n, "opt").mean_zdc if "opt" in cfg.strategies else float("nan")
        beta = "" if row.mean_beta is None else f"{row.mean_beta:6.2f}"
        print(f"{row.n:>3} {row.strategy:>13} {row.mean_zdc:12.4e} {row.stderr:10.2e} "
              f"{row.mean_zdc / ref:7.3f} {beta:>6}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
