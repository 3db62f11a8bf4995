"""Monte Carlo sweeps over tone count and waveform strategy.

Every realization ``r`` draws its channel taps from a generator keyed by
``(seed, r)`` only, so all strategies and all tone counts see the same tap
set (paired comparison), and results do not depend on how realizations are
spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import (ChannelResponse, MultipathChannel, PowerDelayProfile,
                      frequency_response, sample_channel)
from .designers import (BetaSearchOptions, OptSearchOptions, design_opt_numeric, design_smf,
                        design_up, optimize_beta)
from .metrics import DiodeParams, z_dc
from .signal_model import FrequencyGrid, PowerBudget

MAX_TONES = 64
# received power is set by the channel normalization; transmit power is unit
TRANSMIT_POWER_W = 1.0
CSV_COLUMNS = ("N", "strategy", "mean_zdc", "stderr", "mean_beta", "realizations", "seed")
DEFAULT_STRATEGIES = ("up", "mf", "smf:3", "smf-opt-beta", "opt")


def dbm_to_watts(x: float) -> float:
    return 10.0 ** ((x - 30.0) / 10.0)


def watts_to_dbm(p: float) -> float:
    return 10.0 * math.log10(p) + 30.0


def parse_strategy(name: str) -> tuple[str, float | None]:
    """Split a CLI strategy name into ``(kind, beta)``."""
    if name in ("up", "opt", "smf-opt-beta"):
        return name, None
    if name == "mf":
        return "smf", 1.0
    if name.startswith("smf:"):
        try:
            beta = float(name[4:])
        except ValueError:
            raise ValueError(f"bad SMF exponent in strategy {name!r}") from None
        if not beta >= 1:
            raise ValueError(f"SMF exponent must be >= 1 in {name!r}")
        return "smf", beta
    raise ValueError(f"unknown strategy {name!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    center_frequency: float = 5.18e9
    bandwidth: float = 10e6
    n_values: tuple = (1, 2, 4, 8, 16, 32)
    strategies: tuple = DEFAULT_STRATEGIES
    received_power_dbm: float = -20.0
    pdp: PowerDelayProfile | None = None
    fixed_channel: MultipathChannel | None = None
    n_realizations: int = 500
    seed: int = 2017
    diode: DiodeParams = field(default_factory=DiodeParams)
    beta_search: BetaSearchOptions = field(default_factory=BetaSearchOptions)
    opt_search: OptSearchOptions = field(default_factory=OptSearchOptions)
    profile_n: int = 16
    profile_strategies: tuple = ("smf:1", "smf:3", "opt")

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "profile_strategies", tuple(self.profile_strategies))
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        for n in self.n_values + (self.profile_n,):
            if not 1 <= n <= MAX_TONES:
                raise ValueError(f"tone counts must lie in [1, {MAX_TONES}], got {n}")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        if not self.strategies:
            raise ValueError("strategies must be nonempty")
        for s in self.strategies + self.profile_strategies:
            parse_strategy(s)
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not (self.bandwidth > 0 and self.center_frequency > 0):
            raise ValueError("bandwidth and center frequency must be positive")
        if self.pdp is None:
            object.__setattr__(self, "pdp", PowerDelayProfile.exponential(
                target_received_power=dbm_to_watts(self.received_power_dbm)))
        elif self.pdp.target_received_power != dbm_to_watts(self.received_power_dbm):
            object.__setattr__(self, "pdp", replace(
                self.pdp, target_received_power=dbm_to_watts(self.received_power_dbm)))

    def grid(self, n: int) -> FrequencyGrid:
        return FrequencyGrid.centered(self.center_frequency, self.bandwidth, n)

    @property
    def budget(self) -> PowerBudget:
        return PowerBudget(TRANSMIT_POWER_W)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if d.get("pdp") is not None:
            d["pdp"] = PowerDelayProfile.from_entries(d["pdp"])
        if d.get("fixed_channel") is not None:
            d["fixed_channel"] = MultipathChannel.from_dict(d["fixed_channel"])
        for key, typ in (("diode", DiodeParams), ("beta_search", BetaSearchOptions),
                         ("opt_search", OptSearchOptions)):
            if key in d:
                d[key] = typ(**d[key])
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            text = fh.read()
        return cls.from_dict(json.loads(text) if text.strip() else {})


@dataclass(frozen=True)
class SweepRow:
    n: int
    strategy: str
    mean_zdc: float
    stderr: float
    mean_beta: float | None
    realizations: int
    seed: int


@dataclass(frozen=True)
class RealizationRecord:
    n: int
    realization: int
    strategy: str
    zdc: float
    beta: float | None
    channel_digest: str


@dataclass
class SweepResult:
    rows: list
    records: list = field(default_factory=list)

    def row(self, n: int, strategy: str) -> SweepRow:
        for r in self.rows:
            if r.n == n and r.strategy == strategy:
                return r
        raise KeyError((n, strategy))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.n, r.strategy, repr(r.mean_zdc), repr(r.stderr),
                        "" if r.mean_beta is None else repr(r.mean_beta),
                        r.realizations, r.seed])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        rows = [SweepRow(int(n), s, float(m), float(se), float(b) if b else None, int(k), int(sd))
                for n, s, m, se, b, k, sd in reader]
        return cls(rows)

    def to_json(self) -> str:
        return json.dumps([dict(zip(CSV_COLUMNS, (r.n, r.strategy, r.mean_zdc, r.stderr,
                                                 r.mean_beta, r.realizations, r.seed)))
                           for r in self.rows], indent=2)

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("N", "realization", "strategy", "zdc", "beta", "channel"))
        for r in self.records:
            w.writerow([r.n, r.realization, r.strategy, repr(r.zdc),
                        "" if r.beta is None else repr(r.beta), r.channel_digest])
        return buf.getvalue()


def channel_rng(seed: int, realization: int) -> np.random.Generator:
    return np.random.default_rng([seed, realization, 0])


def design(strategy: str, ch: ChannelResponse, grid: FrequencyGrid, cfg: ExperimentConfig,
           rng: np.random.Generator | None = None):
    """Waveform for ``strategy`` on channel ``ch``; returns ``(waveform, beta or None)``."""
    kind, beta = parse_strategy(strategy)
    budget = cfg.budget
    if kind == "up":
        return design_up(grid, budget), None
    if kind == "smf":
        return design_smf(ch, budget, beta), beta
    if kind == "smf-opt-beta":
        res = optimize_beta(ch, budget, cfg.diode, cfg.beta_search)
        return design_smf(ch, budget, res.beta), res.beta
    return design_opt_numeric(ch, budget, cfg.diode, cfg.opt_search, rng=rng,
                              beta_opts=cfg.beta_search), None


def realization_channel(cfg: ExperimentConfig, r: int) -> MultipathChannel:
    if cfg.fixed_channel is not None:
        return cfg.fixed_channel
    return sample_channel(cfg.pdp, channel_rng(cfg.seed, r))


def run_realization(cfg: ExperimentConfig, r: int) -> list:
    taps = realization_channel(cfg, r)
    out = []
    for n in cfg.n_values:
        grid = cfg.grid(n)
        ch = frequency_response(taps, grid)
        digest = ch.digest()
        for strategy in cfg.strategies:
            rng = np.random.default_rng([cfg.seed, r, n, 1])
            w, beta = design(strategy, ch, grid, cfg, rng)
            out.append(RealizationRecord(n, r, strategy, z_dc(w, ch, cfg.diode), beta, digest))
    return out


def _run_chunk(args):
    cfg, indices = args
    return [rec for r in indices for rec in run_realization(cfg, r)]


def run_sweep(cfg: ExperimentConfig, workers: int = 1, keep_records: bool = False) -> SweepResult:
    indices = list(range(cfg.n_realizations))
    if workers > 1:
        chunks = [indices[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_chunk, [(cfg, c) for c in chunks]))
        records = [rec for part in parts for rec in part]
    else:
        records = _run_chunk((cfg, indices))
    # fix the aggregation order so the output never depends on scheduling
    records.sort(key=lambda rec: (rec.realization, cfg.n_values.index(rec.n),
                                  cfg.strategies.index(rec.strategy)))

    rows = []
    for n in cfg.n_values:
        for strategy in cfg.strategies:
            sel = [rec for rec in records if rec.n == n and rec.strategy == strategy]
            z = [rec.zdc for rec in sel]
            k = len(z)
            mean = math.fsum(z) / k
            se = math.sqrt(math.fsum((v - mean) ** 2 for v in z) / (k - 1) / k) if k > 1 else 0.0
            betas = [rec.beta for rec in sel if rec.beta is not None]
            mean_beta = math.fsum(betas) / len(betas) if betas else None
            rows.append(SweepRow(n, strategy, mean, se, mean_beta, k, cfg.seed))
    return SweepResult(rows, records if keep_records else [])


def emit_waveform_profile(cfg: ExperimentConfig, taps: MultipathChannel,
                          strategies=None) -> list[dict]:
    """Per-tone rows ``{tone, frequency_hz, gain, <strategy>...}`` for one channel."""
    strategies = tuple(strategies or cfg.profile_strategies)
    grid = cfg.grid(cfg.profile_n)
    ch = frequency_response(taps, grid)
    rng = np.random.default_rng([cfg.seed, 0, cfg.profile_n, 1])
    amps = {s: design(s, ch, grid, cfg, rng)[0].amplitudes for s in strategies}
    rows = []
    for i, f in enumerate(grid.frequencies):
        row = {"tone": i, "frequency_hz": float(f), "gain": float(ch.gains[i])}
        row.update({s: float(amps[s][i]) for s in strategies})
        rows.append(row)
    return rows


def profile_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
