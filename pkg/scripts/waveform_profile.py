#!/usr/bin/env python
"""Channel gain and per-tone amplitudes of SMF(1), SMF(3) and OPT on one channel.

Prints the table; with --plot, also saves a two-panel figure (needs matplotlib).
"""
from __future__ import annotations

import argparse
from pathlib import Path

from wptwave.channel import sample_channel
from wptwave.harness import ExperimentConfig, channel_rng, emit_waveform_profile, profile_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--channel-seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=Path("waveform_profile.csv"))
    ap.add_argument("--plot", type=Path)
    args = ap.parse_args()

    cfg = ExperimentConfig.from_json_file(args.config) if args.config else ExperimentConfig()
    taps = sample_channel(cfg.pdp, channel_rng(args.channel_seed, 0))
    rows = emit_waveform_profile(cfg, taps)
    args.out.write_text(profile_csv(rows))
    print(profile_csv(rows), end="")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        f_mhz = [(r["frequency_hz"] - cfg.center_frequency) / 1e6 for r in rows]
        fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
        top.plot(f_mhz, [r["gain"] for r in rows], "k.-")
        top.set_ylabel("|h_n|")
        for s in cfg.profile_strategies:
            bottom.plot(f_mhz, [r[s] for r in rows], "o-", label=s)
        bottom.set_xlabel("offset from centre [MHz]")
        bottom.set_ylabel("s_n")
        bottom.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"saved {args.plot}")


if __name__ == "__main__":
    main()
