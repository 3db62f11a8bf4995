"""Multipath channels: random tap generation and per-tone frequency response."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .signal_model import FrequencyGrid


@dataclass(frozen=True, eq=False)
class MultipathChannel:
    """L paths with delays ``tau`` (s), amplitudes ``alpha`` and phases ``xi`` (rad)."""

    delays: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        arrays = [np.array(getattr(self, k), dtype=float).reshape(-1)
                  for k in ("delays", "amplitudes", "phases")]
        tau, alpha, xi = arrays
        if not (tau.size == alpha.size == xi.size):
            raise ValueError("delays, amplitudes and phases must have equal length")
        if tau.size < 1:
            raise ValueError("a channel needs at least one tap")
        if np.any(tau < 0) or np.any(alpha < 0):
            raise ValueError("tap delays and amplitudes must be nonnegative")
        for name, arr in zip(("delays", "amplitudes", "phases"), arrays):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_taps(self) -> int:
        return self.delays.size

    def __eq__(self, other):
        if not isinstance(other, MultipathChannel):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("delays", "amplitudes", "phases"))

    def to_dict(self) -> dict:
        return {"taps": [{"delay_s": float(t), "amplitude": float(a), "phase": float(x)}
                         for t, a, x in zip(self.delays, self.amplitudes, self.phases)]}

    @classmethod
    def from_dict(cls, d: dict) -> "MultipathChannel":
        taps = d["taps"]
        return cls([t["delay_s"] for t in taps],
                   [t["amplitude"] for t in taps],
                   [t.get("phase", 0.0) for t in taps])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MultipathChannel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class ChannelResponse:
    """Per-tone gain ``A_n = |h_n|`` and phase ``psibar_n = arg(h_n)``."""

    gains: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        a = np.array(self.gains, dtype=float).reshape(-1)
        p = np.array(self.phases, dtype=float).reshape(-1)
        if a.shape != p.shape:
            raise ValueError("gains and phases must have equal length")
        if np.any(a < 0):
            raise ValueError("channel gains must be nonnegative")
        a.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "gains", a)
        object.__setattr__(self, "phases", p)

    def __len__(self):
        return self.gains.size

    @classmethod
    def flat(cls, n_tones: int, gain: float = 1.0, phase: float = 0.0) -> "ChannelResponse":
        return cls(np.full(n_tones, gain), np.full(n_tones, phase))

    def digest(self) -> str:
        """Hash of the exact bytes of gains and phases, for paired-comparison checks."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.gains).tobytes())
        h.update(np.ascontiguousarray(self.phases).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class PowerDelayProfile:
    """Mean tap power versus delay, plus the target average received power in watts."""

    delays: tuple
    powers: tuple
    target_received_power: float = 1e-5

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays)
        powers = tuple(float(p) for p in self.powers)
        if len(delays) != len(powers) or not delays:
            raise ValueError("profile needs matching, nonempty delays and powers")
        if any(d < 0 for d in delays):
            raise ValueError("profile delays must be nonnegative")
        if any(p < 0 for p in powers):
            raise ValueError("profile powers must be nonnegative")
        if not self.target_received_power > 0:
            raise ValueError("target received power must be positive")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "powers", powers)

    @classmethod
    def exponential(cls, n_taps: int = 18, spacing: float = 10e-9,
                    decay: float = 30e-9, target_received_power: float = 1e-5):
        """Exponentially decaying profile ``p_l = exp(-tau_l / decay)``."""
        delays = [l * spacing for l in range(n_taps)]
        return cls(delays, [float(np.exp(-d / decay)) for d in delays],
                   target_received_power)

    @classmethod
    def from_entries(cls, entries, target_received_power: float = 1e-5):
        """Build from config-style entries ``[{"delay_ns": ..., "power": ...}, ...]``."""
        return cls([e["delay_ns"] * 1e-9 for e in entries],
                   [e["power"] for e in entries], target_received_power)

    def to_entries(self) -> list:
        return [{"delay_ns": d * 1e9, "power": p} for d, p in zip(self.delays, self.powers)]


def normalization_constant(pdp: PowerDelayProfile) -> float:
    """Factor mapping profile powers to absolute tap variances.

    Chosen so that, per watt of transmit power, the mean per-tone gain
    ``E{A_n^2}`` equals the target received power.
    """
    total = sum(pdp.powers)
    if not total > 0:
        raise ValueError("degenerate power delay profile: all powers are zero")
    return pdp.target_received_power / total


def sample_channel(pdp: PowerDelayProfile, rng: np.random.Generator) -> MultipathChannel:
    """Draw one channel with independent CSCG taps of variance ``kappa * p_l``."""
    var = normalization_constant(pdp) * np.asarray(pdp.powers)
    g = np.sqrt(var / 2) * (rng.standard_normal(var.size) + 1j * rng.standard_normal(var.size))
    return MultipathChannel(np.asarray(pdp.delays), np.abs(g), np.angle(g))


def frequency_response(ch: MultipathChannel, grid: FrequencyGrid) -> ChannelResponse:
    f = grid.frequencies
    h = np.exp(1j * (-2 * np.pi * np.multiply.outer(f, ch.delays) + ch.phases)) @ ch.amplitudes
    return ChannelResponse(np.abs(h), np.angle(h))
