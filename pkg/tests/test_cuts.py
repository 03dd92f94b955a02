import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mldecode.code import LinearCode, hamming
from mldecode.cuts import (
    ZsParams,
    find_cut,
    find_cuts,
    fractionality_order,
    is_integral,
    redundant_cut_round,
    violation,
    zs_decode,
)
from mldecode.lp import LpStatus
from oracles import brute_ml, max_violation


def test_find_cut_examples():
    cut = find_cut({0, 1, 2}, np.array([0.8, 0.8, 0.8]), 0.2)
    assert cut is not None and set(cut.odd_subset) == {0, 1, 2}
    assert violation(cut, [0.8, 0.8, 0.8]) == pytest.approx(0.4)
    assert find_cut({0, 1, 2}, np.array([1.0, 1.0, 0.0]), 0.2) is None
    assert find_cut({0, 1, 2}, np.array([0.5, 0.5, 0.5]), 0.0) is None


def test_cutoff_metrics():
    p = np.array([0.8, 0.8, 0.8])
    # violation 0.4, distance 0.4 / sqrt(3) = 0.231
    assert find_cut({0, 1, 2}, p, 0.3, metric="distance") is None
    assert find_cut({0, 1, 2}, p, 0.3, metric="violation") is not None
    assert find_cut({0, 1, 2}, p, 0.45, metric="violation") is None


def test_separation_is_maximal_and_sound():
    rng = np.random.default_rng(3)
    for _ in range(500):
        d = int(rng.integers(1, 11))
        n = d + int(rng.integers(0, 4))
        N = sorted(rng.choice(n, d, replace=False).tolist())
        p = rng.random(n)
        if rng.random() < 0.3:
            # some integral coordinates
            mask = rng.random(n) < 0.5
            p[mask] = np.round(p[mask])
        best = max_violation(N, p)
        cut = find_cut(N, p, 0.0)
        if best > 1e-9:
            assert cut is not None
            assert violation(cut, p) == pytest.approx(best, abs=1e-12)
            assert len(cut.odd_subset) % 2 == 1
            # every even-weight pattern on N satisfies the inequality
            coef = cut.coefficients(n)
            for bits in itertools.product((0, 1), repeat=d):
                if sum(bits) % 2 == 0:
                    x = np.zeros(n)
                    x[N] = bits
                    assert coef @ x <= cut.rhs + 1e-12
        else:
            assert cut is None


@given(st.lists(st.floats(0, 1), min_size=1, max_size=10), st.floats(0, 1))
def test_returned_cut_passes_cutoff(p, gamma):
    p = np.array(p)
    N = list(range(len(p)))
    cut = find_cut(N, p, gamma)
    if cut is not None:
        assert violation(cut, p) / np.sqrt(len(N)) >= gamma - 1e-12
    elif gamma == 0:
        assert max_violation(N, p) <= 1e-9


def test_fractionality_order_ties_by_index():
    assert fractionality_order([0.4, 0.6, 0.5, 1.0, 0.0]).tolist() == [2, 0, 1, 3, 4]


def test_redundant_round_integral_point_gives_nothing():
    code = hamming(3)
    assert redundant_cut_round(code, np.array([1, 1, 1, 0, 0, 0, 0], dtype=float), 0.0) == []


def test_redundant_round_single_check_matches_find_cut():
    code = LinearCode([[1, 1, 1, 1]])
    rng = np.random.default_rng(4)
    for _ in range(50):
        p = rng.random(4)
        a = redundant_cut_round(code, p, 0.1)
        b = find_cut(range(4), p, 0.1)
        assert (a[0] if a else None) == b


@pytest.mark.parametrize("metric", ["distance", "violation"])
def test_redundant_cuts_are_valid(codes_with_words, metric):
    rng = np.random.default_rng(6)
    gamma = 0.05
    for code, words in codes_with_words:
        for _ in range(40):
            llr = rng.normal(0.7, 1.2, code.n)
            z = zs_decode(code, llr, {}, ZsParams(max_rounds=0, max_rounds_best_bound=0))
            for cut in redundant_cut_round(code, z.point, gamma, metric):
                coef = cut.coefficients(code.n)
                assert (words @ coef <= cut.rhs + 1e-12).all()
                v = violation(cut, z.point)
                need = gamma * np.sqrt(len(cut.neighborhood)) if metric == "distance" else gamma
                assert v >= need - 1e-12


def test_find_cuts_scans_every_row():
    code = hamming(3)
    p = np.zeros(7)
    p[[0, 1]] = 0.9
    cuts = find_cuts(code, p, 0.0)
    rows = {c.neighborhood for c in cuts}
    for nb in code.neighborhoods:
        expect = find_cut(nb, p, 0.0)
        assert (tuple(nb.tolist()) in rows) == (expect is not None)


def test_params_validation():
    with pytest.raises(ValueError):
        ZsParams(purge_threshold=0)
    with pytest.raises(ValueError):
        ZsParams(max_rounds=5, max_rounds_best_bound=4)
    with pytest.raises(ValueError):
        ZsParams(cutoff=-0.1)
    with pytest.raises(ValueError):
        ZsParams(integrality_tol=0.5)
    with pytest.raises(ValueError):
        ZsParams(cutoff_metric="angle")


def test_all_positive_llr():
    code = hamming(4)
    z = zs_decode(code, np.ones(15), {}, ZsParams())
    assert z.integral and z.status is LpStatus.OPTIMAL
    assert z.value == 0 and not z.point.any()
    assert z.lp_solves == 1


def test_lower_bound_and_certificate(codes_with_words):
    rng = np.random.default_rng(10)
    for code, words in codes_with_words:
        for t in range(60):
            llr = rng.normal(1.0, 1.5, code.n)
            fixed = {}
            if t % 3 == 0:
                for p in rng.choice(code.n, int(rng.integers(1, 4)), replace=False):
                    fixed[int(p)] = int(rng.integers(0, 2))
            best, argmins = brute_ml(words, llr, fixed)
            z = zs_decode(code, llr, fixed, ZsParams(max_rounds=int(t % 4)))
            if z.status is LpStatus.INFEASIBLE:
                assert best == np.inf
                continue
            assert z.value <= best + 1e-9
            assert all(b >= a - 1e-9 for a, b in zip(z.history, z.history[1:]))
            assert z.integral == is_integral(z.point, 1e-5)
            if z.integral:
                word = np.round(z.point).astype(np.uint8)
                assert any(np.array_equal(word, w) for w in argmins)


def test_gap_exists_on_tanner_at_low_snr():
    from mldecode.channel import ChannelConfig, transmit
    from mldecode.code import tanner_155_64

    code = tanner_155_64()
    cfg = ChannelConfig(1.0, code.k / code.n, seed=0)
    fractional = 0
    for f in range(20):
        z = zs_decode(code, transmit(np.zeros(code.n, dtype=np.uint8), cfg, f), {}, ZsParams())
        fractional += not z.integral
    assert fractional > 0
