import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wptwave.channel import ChannelResponse
from wptwave.designers import design_smf, optimal_phases
from wptwave.metrics import (DiodeParams, diode_k, enumerate_quadruples, quadruple_count, z_dc,
                             z_dc_smf_closed_form, z_dc_time_domain_oracle)
from wptwave.signal_model import FrequencyGrid, PowerBudget, Waveform

from .conftest import random_response


def naive_quadruples(n):
    return {q for q in itertools.product(range(n), repeat=4) if q[0] + q[1] == q[2] + q[3]}


def test_diode_k_paper_values():
    p = DiodeParams(i_s=5e-6, ideality=1.05, v_t=25.86e-3)
    assert diode_k(2, p) == pytest.approx(0.0034, rel=5e-3)
    assert diode_k(4, p) == pytest.approx(0.3829, rel=5e-3)
    assert p.k2 == diode_k(2, p) and p.k4 == diode_k(4, p)


def test_diode_k_unit():
    p = DiodeParams(i_s=1.0, ideality=1.0, v_t=1.0)
    assert diode_k(2, p) == 0.5
    assert diode_k(4, p) == 1 / 24
    with pytest.raises(ValueError):
        diode_k(3, p)


def test_diode_rejects_nonpositive():
    with pytest.raises(ValueError):
        DiodeParams(r_ant=0)


def test_quadruples_small():
    assert [tuple(q) for q in enumerate_quadruples(1).tuples] == [(0, 0, 0, 0)]
    q2 = {tuple(q) for q in enumerate_quadruples(2).tuples}
    assert q2 == {(0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 1), (1, 0, 1, 0)}
    assert len(enumerate_quadruples(16)) == 2736


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13])
def test_quadruples_match_naive(n):
    got = [tuple(q) for q in enumerate_quadruples(n).tuples]
    assert len(got) == len(set(got)) == quadruple_count(n)
    assert set(got) == naive_quadruples(n)


def test_quadruple_count_formula_to_64():
    for n in range(1, 65):
        assert len(enumerate_quadruples(n)) == (2 * n ** 3 + n) // 3


def test_z_dc_single_tone(paper_diode):
    w = Waveform([math.sqrt(2)], [0.4])
    ch = ChannelResponse([1.0], [1.1])
    # k2 + (3 k4 / 8) * 4
    assert z_dc(w, ch, paper_diode) == pytest.approx(0.57775, abs=1e-9)


def test_z_dc_two_flat_tones(paper_diode):
    w = Waveform([1, 1], [0, 0])
    ch = ChannelResponse.flat(2)
    assert z_dc(w, ch, paper_diode) == pytest.approx(0.0034 + 0.375 * 0.3829 * 6, abs=1e-12)


def test_z_dc_zero_and_mismatch(paper_diode):
    assert z_dc(Waveform([0, 0, 0], [1, 2, 3]), ChannelResponse.flat(3), paper_diode) == 0.0
    with pytest.raises(ValueError):
        z_dc(Waveform([1], [0]), ChannelResponse.flat(2), paper_diode)


def test_z_dc_matches_complex_form():
    # sum over balanced quadruples of c0 c1 conj(c2 c3) = sum_k |(c*c)_k|^2
    rng = np.random.default_rng(8)
    p = DiodeParams(r_ant=1.0, k2=0.0, k4=1.0)
    for n in (1, 3, 7, 12):
        ch = random_response(rng, n)
        w = Waveform(rng.uniform(0, 1, n), rng.uniform(-3, 3, n))
        c = w.amplitudes * ch.gains * np.exp(1j * (w.phases + ch.phases))
        expected = 0.375 * np.sum(np.abs(np.convolve(c, c)) ** 2)
        assert z_dc(w, ch, p) == pytest.approx(expected, rel=1e-12)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1), st.floats(-10, 10))
def test_common_phase_shift_invariance(n, seed, delta):
    rng = np.random.default_rng(seed)
    ch = random_response(rng, n)
    w = Waveform(rng.uniform(0, 1, n), rng.uniform(-3, 3, n))
    shifted = Waveform(w.amplitudes, w.phases + delta)
    p = DiodeParams()
    assert z_dc(shifted, ch, p) == pytest.approx(z_dc(w, ch, p), rel=1e-12)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_second_order_only(n, seed):
    rng = np.random.default_rng(seed)
    ch = random_response(rng, n)
    w = Waveform(rng.uniform(0, 1, n), rng.uniform(-3, 3, n))
    p = DiodeParams(r_ant=7.0, k4=0.0)
    expected = 0.5 * p.k2 * 7.0 * np.sum(w.amplitudes ** 2 * ch.gains ** 2)
    assert z_dc(w, ch, p) == pytest.approx(expected, rel=1e-14)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.floats(0.01, 1))
def test_matched_phases_positive_and_monotone(n, seed, bump):
    rng = np.random.default_rng(seed)
    ch = random_response(rng, n)
    s = rng.uniform(0, 1, n)
    phi = optimal_phases(ch)
    p = DiodeParams()
    base = z_dc(Waveform(s, phi), ch, p)
    assert base >= 0
    for i in range(n):
        up = s.copy()
        up[i] += bump
        assert z_dc(Waveform(up, phi), ch, p) >= base


def test_smf_closed_form_single_tone(paper_diode):
    for beta in (1, 2.5, 9):
        val = z_dc_smf_closed_form(beta, ChannelResponse([1.0], [0.3]), PowerBudget(1.0), paper_diode)
        assert val == pytest.approx(0.57775, abs=1e-9)


def test_smf_closed_form_flat_is_beta_free():
    p = DiodeParams()
    ch = ChannelResponse.flat(6, 0.003, 0.2)
    vals = [z_dc_smf_closed_form(b, ch, PowerBudget(1.0), p) for b in (1, 2, 3.3, 12)]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-13)


def test_smf_closed_form_degenerate():
    with pytest.raises(ValueError, match="degenerate channel"):
        z_dc_smf_closed_form(2, ChannelResponse.flat(3, 0.0), PowerBudget(1.0), DiodeParams())


@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.floats(1, 12))
def test_smf_closed_form_matches_eq4(n, seed, beta):
    rng = np.random.default_rng(seed)
    ch = random_response(rng, n, scale=3e-3)
    budget = PowerBudget(1.0)
    p = DiodeParams()
    ref = z_dc(design_smf(ch, budget, beta), ch, p)
    assert z_dc_smf_closed_form(beta, ch, budget, p) == pytest.approx(ref, rel=1e-10)


def oracle_grid(n, extra=0):
    return FrequencyGrid((2 * n + extra) * 1e3, 1e3, n)


def test_oracle_examples(paper_diode):
    grid = FrequencyGrid(4.0, 1.0, 1)
    w = Waveform([math.sqrt(2)], [0.0])
    ch = ChannelResponse([1.0], [0.0])
    assert z_dc_time_domain_oracle(w, ch, grid, paper_diode, 512) == pytest.approx(0.57775, rel=1e-6)
    zero = Waveform([0.0], [0.0])
    assert z_dc_time_domain_oracle(zero, ch, grid, paper_diode, 512) == 0.0


def test_oracle_preconditions(paper_diode):
    w = Waveform([1, 1], [0, 0])
    ch = ChannelResponse.flat(2)
    with pytest.raises(ValueError):  # K < 2N
        z_dc_time_domain_oracle(w, ch, FrequencyGrid(3.0, 1.0, 2), paper_diode, 1000)
    with pytest.raises(ValueError):  # non-integer ratio
        z_dc_time_domain_oracle(w, ch, FrequencyGrid(4.5, 1.0, 2), paper_diode, 1000)
    with pytest.raises(ValueError):  # too few samples
        z_dc_time_domain_oracle(w, ch, FrequencyGrid(4.0, 1.0, 2), paper_diode, 95)


@given(st.integers(1, 8), st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_oracle_equivalence(n, extra, seed):
    rng = np.random.default_rng(seed)
    ch = random_response(rng, n)
    w = Waveform(rng.uniform(0, 1, n), rng.uniform(-np.pi, np.pi, n))
    grid = oracle_grid(n, extra)
    k = 2 * n + extra
    p = DiodeParams(r_ant=1.0)
    ref = z_dc(w, ch, p)
    got = z_dc_time_domain_oracle(w, ch, grid, p, 16 * (k + n))
    assert got == pytest.approx(ref, rel=1e-6)
