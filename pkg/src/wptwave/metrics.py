"""Rectifier DC-output proxy ``z_DC`` for multisine inputs.

Three evaluation routes are provided:

* :func:`z_dc` sums the 4th-order term over every balanced index quadruple
  ``n0 + n1 = n2 + n3``, with the received phases inside the cosines;
* :func:`z_dc_smf_closed_form` is the same quantity specialised to the
  scaled matched filter, as a function of the exponent ``beta``;
* :func:`z_dc_time_domain_oracle` averages ``k2 R y^2 + k4 R^2 y^4`` over
  one period of the sampled received signal.  It shares no code with the
  other two and is used to check them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .signal_model import FrequencyGrid, PowerBudget, Waveform, _check_lengths


@dataclass(frozen=True)
class DiodeParams:
    """Diode constants and antenna resistance.

    ``k2`` and ``k4`` default to ``i_s / (i! (n v_t)^i)``; passing them
    explicitly overrides the derived values (handy for rounded textbook
    constants).
    """

    i_s: float = 5e-6
    ideality: float = 1.05
    v_t: float = 25.86e-3
    r_ant: float = 50.0
    k2: float | None = None
    k4: float | None = None

    def __post_init__(self):
        for name in ("i_s", "ideality", "v_t", "r_ant"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        for order in (2, 4):
            name = f"k{order}"
            if getattr(self, name) is None:
                object.__setattr__(self, name, diode_k(order, self))
            elif getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def diode_k(order: int, p: DiodeParams) -> float:
    """Taylor coefficient ``i_s / (order! (n v_t)^order)`` of the diode current."""
    if order not in (2, 4):
        raise ValueError(f"unsupported Taylor order {order}; only 2 and 4 are modelled")
    return p.i_s / (math.factorial(order) * (p.ideality * p.v_t) ** order)


@dataclass(frozen=True, eq=False)
class QuadrupleSet:
    n_tones: int
    tuples: np.ndarray  # shape (count, 4), columns n0, n1, n2, n3

    def __len__(self):
        return self.tuples.shape[0]


def quadruple_count(n: int) -> int:
    return (2 * n ** 3 + n) // 3


@lru_cache(maxsize=None)
def _quadruples(n: int) -> np.ndarray:
    rows = []
    idx = np.arange(n)
    for k in range(2 * n - 1):
        # all ordered pairs (i, k - i) with both entries in range
        first = idx[(idx <= k) & (k - idx < n)]
        pairs = np.column_stack([first, k - first])
        m = len(pairs)
        left = np.repeat(pairs, m, axis=0)
        right = np.tile(pairs, (m, 1))
        rows.append(np.hstack([left, right]))
    out = np.vstack(rows)
    out.setflags(write=False)
    return out


def enumerate_quadruples(n: int) -> QuadrupleSet:
    """All ``(n0, n1, n2, n3)`` in ``[0, n)^4`` with ``n0 + n1 = n2 + n3``."""
    if n < 1:
        raise ValueError(f"need at least one tone, got {n}")
    return QuadrupleSet(n, _quadruples(n))


def _quartic_sum(a: np.ndarray, psi: np.ndarray | None = None) -> float:
    q = _quadruples(a.size)
    prod = a[q[:, 0]] * a[q[:, 1]] * a[q[:, 2]] * a[q[:, 3]]
    if psi is not None:
        prod = prod * np.cos(psi[q[:, 0]] + psi[q[:, 1]] - psi[q[:, 2]] - psi[q[:, 3]])
    return float(np.sum(prod))


def z_dc(w: Waveform, ch, p: DiodeParams) -> float:
    """``z_DC`` from per-tone amplitudes and received phases ``phi_n + psibar_n``."""
    if len(w) != len(ch.gains) or len(ch.gains) != len(ch.phases):
        raise ValueError(
            f"length mismatch: waveform {len(w)}, channel {len(ch.gains)}")
    a = w.amplitudes * ch.gains
    psi = w.phases + ch.phases
    second = 0.5 * p.k2 * p.r_ant * float(np.sum(a ** 2))
    fourth = 0.375 * p.k4 * p.r_ant ** 2 * _quartic_sum(a, psi)
    return second + fourth


def z_dc_smf_closed_form(beta: float, ch, budget: PowerBudget, p: DiodeParams) -> float:
    """``z_DC`` of the scaled matched filter with exponent ``beta``, without building it."""
    A = np.asarray(ch.gains, dtype=float)
    peak = A.max(initial=0.0)
    if not peak > 0:
        raise ValueError("degenerate channel: all gains are zero")
    # factor the peak out of every power so that large beta cannot underflow;
    # both terms are homogeneous of degree 2 (resp. 4) in A
    g = A / peak
    denom = float(np.sum(g ** (2 * beta)))
    P = budget.p_watts
    second = p.k2 * p.r_ant * P * peak ** 2 * float(np.sum(g ** (2 * (beta + 1)))) / denom
    fourth = (1.5 * p.k4 * p.r_ant ** 2 * P ** 2 * peak ** 4
              * _quartic_sum(g ** (beta + 1)) / denom ** 2)
    return second + fourth


def z_dc_time_domain_oracle(w: Waveform, ch, grid: FrequencyGrid, p: DiodeParams,
                            samples: int) -> float:
    """Period average of ``k2 R y(t)^2 + k4 R^2 y(t)^4`` on a uniform time grid.

    Only valid when ``f0 = K * delta_f`` with integer ``K >= 2N``; then
    ``y`` is periodic in ``1 / delta_f`` and no out-of-band mixing product
    lands on DC.  ``samples`` must be at least ``16 (K + N)``.
    """
    _check_lengths(w, ch.gains, ch.phases, grid)
    n = grid.n_tones
    ratio = grid.f0 / grid.delta_f
    K = int(round(ratio))
    if abs(ratio - K) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"f0 / delta_f = {ratio} is not an integer")
    if K < 2 * n:
        raise ValueError(f"f0 / delta_f = {K} must be >= 2N = {2 * n}")
    if samples < 16 * (K + n):
        raise ValueError(f"need at least {16 * (K + n)} samples, got {samples}")

    # y at t_m = m / (samples * delta_f); integer tone index keeps the phase exact
    m = np.arange(samples)
    cycles = np.mod(np.multiply.outer(m, K + np.arange(n)), samples) / samples
    y = np.cos(2 * np.pi * cycles + (w.phases + ch.phases)) @ (w.amplitudes * ch.gains)
    r = p.r_ant
    return p.k2 * r * float(np.mean(y ** 2)) + p.k4 * r ** 2 * float(np.mean(y ** 4))
