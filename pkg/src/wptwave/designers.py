"""Transmit waveform designs: uniform power, scaled matched filter, numeric optimum."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrics import DiodeParams, z_dc, z_dc_smf_closed_form
from .signal_model import FrequencyGrid, PowerBudget, Waveform, power_normalized

GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SmfConfig:
    beta: float = 3.0

    def __post_init__(self):
        if not self.beta >= 1:
            raise ValueError(f"SMF exponent must be >= 1, got {self.beta}")


@dataclass(frozen=True)
class BetaSearchOptions:
    beta_min: float = 1.0
    beta_max: float = 12.0
    tolerance: float = 1e-6
    max_iterations: int = 50
    fd_step: float = 1e-4
    grid_points: int = 23

    def __post_init__(self):
        if not self.beta_min >= 1:
            raise ValueError("beta_min must be >= 1")
        if not self.beta_max > self.beta_min:
            raise ValueError("beta_max must exceed beta_min")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1 or self.grid_points < 3:
            raise ValueError("max_iterations >= 1 and grid_points >= 3 required")


@dataclass(frozen=True)
class OptSearchOptions:
    step_init: float = 0.25
    max_iterations: int = 500
    restarts: int = 2
    convergence_tol: float = 1e-10

    def __post_init__(self):
        if not (self.step_init > 0 and self.max_iterations > 0 and self.convergence_tol > 0):
            raise ValueError("step_init, max_iterations and convergence_tol must be > 0")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class BetaSearchResult:
    beta: float
    z_value: float
    beta_irrelevant: bool = False
    method: str = "newton"
    iterations: int = 0


def optimal_phases(ch) -> np.ndarray:
    """Phases that cancel the channel phase on every tone."""
    return -np.asarray(ch.phases, dtype=float)


def design_up(grid: FrequencyGrid, budget: PowerBudget) -> Waveform:
    """Uniform power, zero phase. Channel independent."""
    n = grid.n_tones
    return Waveform(power_normalized(np.ones(n), budget.p_watts), np.zeros(n))


def _relative_gains(ch) -> np.ndarray:
    A = np.asarray(ch.gains, dtype=float)
    peak = A.max(initial=0.0)
    if not peak > 0:
        raise ValueError("degenerate channel: all gains are zero")
    return A / peak


def design_smf(ch, budget: PowerBudget, beta: float) -> Waveform:
    """Scaled matched filter: ``s_n`` proportional to ``A_n ** beta``, phases ``-psibar_n``."""
    SmfConfig(beta)
    g = _relative_gains(ch)
    return Waveform(power_normalized(g ** beta, budget.p_watts), optimal_phases(ch))


def design_mf(ch, budget: PowerBudget) -> Waveform:
    return design_smf(ch, budget, 1.0)


def _golden_max(f, lo, hi, tol, max_iter):
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    it = 0
    while hi - lo > tol and it < max_iter:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
        it += 1
    return (x1, f1, it) if f1 >= f2 else (x2, f2, it)


def optimize_beta(ch, budget: PowerBudget, p: DiodeParams,
                  opts: BetaSearchOptions = BetaSearchOptions()) -> BetaSearchResult:
    """Per-channel SMF exponent maximising the closed-form ``z_DC``.

    A coarse grid on ``[beta_min, beta_max]`` brackets the best point; Newton
    iterations on the first derivative (central differences) refine it
    inside that bracket.  If Newton steps out of the bracket or fails to
    improve, golden-section search on the bracket takes over.  The returned
    value is never worse than any grid point, both endpoints, or beta = 3.
    """
    g = _relative_gains(ch)
    nz = g[g > 0]
    if nz.size < 2 or np.allclose(nz, nz[0], rtol=1e-9, atol=0):
        return BetaSearchResult(opts.beta_min,
                                z_dc_smf_closed_form(opts.beta_min, ch, budget, p),
                                beta_irrelevant=True, method="flat", iterations=0)

    lo_b, hi_b = opts.beta_min, opts.beta_max
    scale = z_dc_smf_closed_form(lo_b, ch, budget, p)

    def f(b):
        return z_dc_smf_closed_form(b, ch, budget, p) / scale

    grid = np.linspace(lo_b, hi_b, opts.grid_points)
    if lo_b <= 3.0 <= hi_b:
        grid = np.unique(np.append(grid, 3.0))
    values = np.array([f(b) for b in grid])
    i = int(np.argmax(values))
    best_b, best_f = float(grid[i]), float(values[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, grid.size - 1)])

    h = opts.fd_step
    b, fb = best_b, best_f
    method, iters = "newton", 0
    converged = False
    for iters in range(1, opts.max_iterations + 1):
        bm, bp = max(b - h, lo_b), min(b + h, hi_b)
        fm, fp = f(bm), f(bp)
        d1 = (fp - fm) / (bp - bm)
        # one-sided stencil at the interval ends keeps evaluations feasible
        d2 = (fp - 2 * fb + fm) / (0.5 * (bp - bm)) ** 2 if bp - b == b - bm else None
        if abs(d1) < opts.tolerance and (d2 is None or d2 <= 0):
            converged = True
            break
        if d2 is None or d2 >= 0:
            break
        b_new = b - d1 / d2
        if not lo <= b_new <= hi:
            break
        f_new = f(b_new)
        if f_new < fb - 1e-15:
            break
        step = abs(b_new - b)
        b, fb = b_new, f_new
        if step < opts.tolerance:
            converged = True
            break

    if not converged and lo < hi:
        method = "golden"
        b, fb, n_gold = _golden_max(f, lo, hi, opts.tolerance, 200)
        iters += n_gold

    if fb < best_f:
        b, fb = best_b, best_f
    return BetaSearchResult(float(b), fb * scale, beta_irrelevant=False,
                            method=method, iterations=iters)


def design_smf_opt_beta(ch, budget: PowerBudget, p: DiodeParams,
                        opts: BetaSearchOptions = BetaSearchOptions()):
    res = optimize_beta(ch, budget, p, opts)
    return design_smf(ch, budget, res.beta), res


class _MatchedObjective:
    """``z_DC`` with every received phase aligned, as a function of ``s``.

    The 4th-order sum over balanced quadruples equals ``sum_k c_k^2`` with
    ``c = a * a`` (self-convolution of ``a = s * A``), which gives an
    ``O(N^2)`` value and gradient.
    """

    def __init__(self, gains: np.ndarray, p: DiodeParams):
        self.A = gains
        self.c2 = 0.5 * p.k2 * p.r_ant
        self.c4 = 0.375 * p.k4 * p.r_ant ** 2

    def value(self, s: np.ndarray) -> float:
        a = s * self.A
        c = np.convolve(a, a)
        return self.c2 * float(a @ a) + self.c4 * float(c @ c)

    def gradient(self, s: np.ndarray) -> np.ndarray:
        a = s * self.A
        c = np.convolve(a, a)
        # d/da_m sum_k c_k^2 = 4 sum_k c_k a_{k-m}
        dq = 4 * np.correlate(c, a, mode="valid")
        return self.A * (2 * self.c2 * a + self.c4 * dq)


def _ascend(obj: _MatchedObjective, s0: np.ndarray, radius: float,
            opts: OptSearchOptions) -> tuple[np.ndarray, float]:
    """Projected gradient ascent on the sphere ``||s|| = radius``, ``s >= 0``.

    Backtracking halves the step until the objective does not decrease, so the
    returned point is never worse than ``s0``.
    """
    s, fs = s0, obj.value(s0)
    step = opts.step_init
    for _ in range(opts.max_iterations):
        grad = obj.gradient(s)
        # keep only the component tangent to the sphere
        tangent = grad - (grad @ s) / (s @ s) * s
        gnorm = np.linalg.norm(tangent)
        if not gnorm > 0:
            break
        direction = tangent / gnorm
        improved = False
        while step > 1e-12:
            cand = np.maximum(s + step * radius * direction, 0.0)
            cn = np.linalg.norm(cand)
            if cn > 0:
                cand = cand * (radius / cn)
                fc = obj.value(cand)
                if fc >= fs:
                    improved = True
                    break
            step *= 0.5
        if not improved:
            break
        gain = fc - fs
        s, fs = cand, fc
        step = min(2 * step, 1.0)
        if gain <= opts.convergence_tol * abs(fs):
            break
    return s, fs


def design_opt_numeric(ch, budget: PowerBudget, p: DiodeParams,
                       opts: OptSearchOptions = OptSearchOptions(),
                       rng: np.random.Generator | None = None,
                       beta_opts: BetaSearchOptions = BetaSearchOptions()) -> Waveform:
    """Numerical maximiser of ``z_DC`` over amplitudes with matched phases.

    Starts from the best SMF design and from ``opts.restarts`` random
    nonnegative points; returns the best local optimum found.  Ties go to the
    earliest start.
    """
    A = np.asarray(ch.gains, dtype=float)
    if not A.max(initial=0.0) > 0:
        raise ValueError("degenerate channel: all gains are zero")
    phases = optimal_phases(ch)
    radius = math.sqrt(2 * budget.p_watts)
    obj = _MatchedObjective(A, p)

    start = design_smf_opt_beta(ch, budget, p, beta_opts)[0].amplitudes
    starts = [start]
    if opts.restarts:
        rng = rng if rng is not None else np.random.default_rng(0)
        for _ in range(opts.restarts):
            u = np.abs(rng.standard_normal(A.size)) * (A > 0)
            if not u.any():
                u = (A > 0).astype(float)
            starts.append(power_normalized(u, budget.p_watts))

    best_s, best_f = None, -np.inf
    for s0 in starts:
        s, fs = _ascend(obj, s0, radius, opts)
        if best_s is None or fs > best_f + 1e-12 * abs(best_f):
            best_s, best_f = s, fs

    result = Waveform(best_s, phases)
    smf = Waveform(start, phases)
    # guard against round-off between the convolution and enumeration routes
    if z_dc(result, ch, p) < z_dc(smf, ch, p):
        return smf
    return result
