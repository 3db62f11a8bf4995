"""Multisine waveforms, frequency grids and time-domain synthesis.

A waveform is a set of per-tone amplitudes ``s_n`` and phases ``phi_n``.
The transmit power convention is ``E{|x|^2} = 0.5 * sum(s_n^2)``, read
directly as watts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrequencyGrid:
    """Evenly spaced tones ``f_n = f0 + n * delta_f``, n = 0..N-1."""

    f0: float
    delta_f: float
    n_tones: int

    def __post_init__(self):
        if self.n_tones < 1:
            raise ValueError(f"n_tones must be >= 1, got {self.n_tones}")
        if not self.delta_f > 0:
            raise ValueError(f"delta_f must be > 0, got {self.delta_f}")
        if not self.f0 > 0:
            raise ValueError(f"f0 must be > 0, got {self.f0}")

    @classmethod
    def centered(cls, center: float, bandwidth: float, n_tones: int) -> "FrequencyGrid":
        """Grid of ``n_tones`` tones spaced ``bandwidth / n_tones`` around ``center``."""
        delta_f = bandwidth / n_tones
        return cls(center - 0.5 * (n_tones - 1) * delta_f, delta_f, n_tones)

    @property
    def frequencies(self) -> np.ndarray:
        return self.f0 + self.delta_f * np.arange(self.n_tones)


@dataclass(frozen=True)
class PowerBudget:
    p_watts: float

    def __post_init__(self):
        if not self.p_watts > 0:
            raise ValueError(f"transmit power must be > 0 W, got {self.p_watts}")


@dataclass(frozen=True, eq=False)
class Waveform:
    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        s = np.array(self.amplitudes, dtype=float).reshape(-1)
        phi = np.array(self.phases, dtype=float).reshape(-1)
        if s.shape != phi.shape:
            raise ValueError(
                f"amplitudes and phases differ in length ({s.size} vs {phi.size})")
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise ValueError("amplitudes must be finite and nonnegative")
        s.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "amplitudes", s)
        object.__setattr__(self, "phases", phi)

    def __len__(self):
        return self.amplitudes.size

    def __eq__(self, other):
        if not isinstance(other, Waveform):
            return NotImplemented
        return (np.array_equal(self.amplitudes, other.amplitudes)
                and np.array_equal(self.phases, other.phases))

    @property
    def weights(self) -> np.ndarray:
        """Complex tone weights ``w_n = s_n exp(j phi_n)``."""
        return self.amplitudes * np.exp(1j * self.phases)

    def to_dict(self) -> dict:
        return {"amplitudes": self.amplitudes.tolist(), "phases": self.phases.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Waveform":
        return cls(d["amplitudes"], d["phases"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Waveform":
        return cls.from_dict(json.loads(text))


def transmit_power(w: Waveform) -> float:
    return 0.5 * float(np.sum(w.amplitudes ** 2))


def power_normalized(u: np.ndarray, p_watts: float) -> np.ndarray:
    """Scale a nonnegative direction ``u`` so that ``0.5 * ||s||^2 = p_watts``.

    All designers go through this helper so that equal directions give
    bit-identical amplitudes.
    """
    u = np.asarray(u, dtype=float)
    norm = np.sqrt(np.sum(u ** 2))
    if not norm > 0:
        raise ValueError("degenerate waveform: all amplitudes are zero")
    return np.sqrt(2.0 * p_watts) * (u / norm)


def scale_to_power(w: Waveform, budget: PowerBudget) -> Waveform:
    s = w.amplitudes
    peak = s.max(initial=0.0)
    if not peak > 0:
        raise ValueError("degenerate waveform: all amplitudes are zero")
    # divide by the peak first so squaring cannot under/overflow
    return Waveform(power_normalized(s / peak, budget.p_watts), w.phases)


def _check_lengths(w: Waveform, gains, phases, grid: FrequencyGrid):
    if not (len(w) == len(gains) == len(phases) == grid.n_tones):
        raise ValueError(
            f"length mismatch: waveform {len(w)}, channel {len(gains)}, "
            f"grid {grid.n_tones}")


def synthesize_received(w: Waveform, ch, grid: FrequencyGrid, t) -> np.ndarray | float:
    """Received signal ``y(t) = sum_n s_n A_n cos(2 pi f_n t + phi_n + psibar_n)``.

    ``ch`` is anything with ``gains`` and ``phases`` arrays (a
    ``ChannelResponse``).  ``t`` may be a scalar or an array of times.
    """
    _check_lengths(w, ch.gains, ch.phases, grid)
    t_arr = np.asarray(t, dtype=float)
    a = w.amplitudes * np.asarray(ch.gains, dtype=float)
    psi = w.phases + np.asarray(ch.phases, dtype=float)
    arg = 2 * np.pi * np.multiply.outer(t_arr, grid.frequencies) + psi
    y = np.cos(arg) @ a
    return float(y) if t_arr.ndim == 0 else y


def synthesize_transmit(w: Waveform, grid: FrequencyGrid, t) -> np.ndarray | float:
    """Transmit signal ``x(t) = Re{sum_n w_n exp(j 2 pi f_n t)}``."""
    n = len(w)
    flat = _FlatResponse(np.ones(n), np.zeros(n))
    return synthesize_received(w, flat, grid, t)


@dataclass(frozen=True)
class _FlatResponse:
    gains: np.ndarray
    phases: np.ndarray
