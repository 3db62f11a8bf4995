"""Command line entry point: ``wptwave {sweep,profile,validate}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelResponse, MultipathChannel, sample_channel
from .harness import (ExperimentConfig, channel_rng, emit_waveform_profile, profile_csv,
                      run_sweep)
from .metrics import DiodeParams, z_dc, z_dc_time_domain_oracle
from .signal_model import FrequencyGrid, Waveform

log = logging.getLogger("wptwave")


def _load_config(path) -> ExperimentConfig:
    return ExperimentConfig.from_json_file(path) if path else ExperimentConfig()


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    log.info("sweep: N=%s strategies=%s realizations=%d seed=%d workers=%d",
             list(cfg.n_values), list(cfg.strategies), cfg.n_realizations, cfg.seed,
             args.workers)
    res = run_sweep(cfg, workers=args.workers, keep_records=bool(args.records))
    _write(res.to_csv(), args.out)
    if args.json:
        Path(args.json).write_text(res.to_json() + "\n")
    if args.records:
        Path(args.records).write_text(res.records_csv())
    return 0


def cmd_profile(args) -> int:
    cfg = _load_config(args.config)
    if args.channel_json:
        taps = MultipathChannel.from_json(Path(args.channel_json).read_text())
    else:
        taps = sample_channel(cfg.pdp, channel_rng(args.channel_seed, 0))
    if args.dump_channel:
        Path(args.dump_channel).write_text(taps.to_json() + "\n")
    rows = emit_waveform_profile(cfg, taps, args.strategies)
    _write(profile_csv(rows), args.out)
    return 0


def oracle_self_test(instances: int = 200, seed: int = 0, rtol: float = 1e-6) -> tuple[int, float]:
    """Compare the quadruple-sum ``z_DC`` with the sampled time-domain average.

    Returns ``(failures, worst relative error)``.
    """
    rng = np.random.default_rng(seed)
    diode = DiodeParams(r_ant=1.0)
    worst, failures = 0.0, 0
    for i in range(instances):
        n = (1, 2, 4, 8)[i % 4]
        k = 2 * n + int(rng.integers(0, 4))
        grid = FrequencyGrid(k * 1.0, 1.0, n)
        ch = ChannelResponse(rng.rayleigh(1.0, n), rng.uniform(-np.pi, np.pi, n))
        w = Waveform(rng.uniform(0, 1, n), rng.uniform(-np.pi, np.pi, n))
        ref = z_dc(w, ch, diode)
        got = z_dc_time_domain_oracle(w, ch, grid, diode, 16 * (k + n))
        err = abs(got - ref) / ref
        worst = max(worst, err)
        failures += err > rtol
    return failures, worst


def cmd_validate(args) -> int:
    failures, worst = oracle_self_test(args.instances, args.seed)
    status = "PASS" if failures == 0 else "FAIL"
    print(f"{status} oracle equivalence: {args.instances} instances, "
          f"{failures} failures, worst relative error {worst:.3e}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wptwave",
                                description="Channel-adaptive multisine waveform simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="average z_DC versus N for each strategy")
    sw.add_argument("--config", help="JSON experiment config (defaults if omitted)")
    sw.add_argument("--out", default="-", help="CSV output path ('-' for stdout)")
    sw.add_argument("--json", help="also write a JSON mirror of the table")
    sw.add_argument("--records", help="write per-realization z_DC and beta to this CSV")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    pr = sub.add_parser("profile", help="per-tone channel gain and waveform amplitudes")
    pr.add_argument("--config")
    pr.add_argument("--channel-seed", type=int, default=0)
    pr.add_argument("--channel-json", help="replay a dumped channel instead of sampling")
    pr.add_argument("--dump-channel", help="write the channel taps used to this JSON file")
    pr.add_argument("--strategies", nargs="+")
    pr.add_argument("--out", default="-")
    pr.set_defaults(func=cmd_profile)

    va = sub.add_parser("validate", help="oracle-equivalence self-test")
    va.add_argument("--instances", type=int, default=200)
    va.add_argument("--seed", type=int, default=0)
    va.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"wptwave: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
