import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mldecode.code import hamming, is_codeword
from mldecode.cuts import ZsParams
from mldecode.sp_osd import SpConfig, constrained_llr, lubd, osd_reencode, reliability_order, sp_decode
from oracles import brute_ml


def test_config_validation():
    with pytest.raises(ValueError):
        SpConfig(max_iterations=0)
    with pytest.raises(ValueError):
        SpConfig(llr_clamp=0)
    with pytest.raises(ValueError):
        SpConfig(reencode_order=-1)


def test_strong_positive_llrs_decode_in_one_iteration():
    post, hard, iters = sp_decode(hamming(3), np.full(7, 8.0))
    assert iters == 1 and not hard.any()


def test_single_flip_is_corrected():
    code = hamming(3)
    for pos in range(7):
        llr = np.full(7, 4.0)
        llr[pos] = -1.0
        _, hard, _ = sp_decode(code, llr)
        assert not code.syndrome(hard).any()
        assert not hard.any()


def test_frozen_positions_keep_their_value():
    code = hamming(4)
    rng = np.random.default_rng(1)
    for _ in range(30):
        llr = rng.normal(0, 2, 15)
        llr[3] = np.inf
        llr[9] = -np.inf
        post, hard, _ = sp_decode(code, llr)
        assert hard[3] == 0 and hard[9] == 1
        assert post[3] == 50.0 and post[9] == -50.0


def test_length_mismatch():
    with pytest.raises(ValueError):
        sp_decode(hamming(3), np.ones(6))


@given(st.lists(st.floats(-6, 6), min_size=15, max_size=15))
def test_posterior_is_odd_in_llr(llr):
    code = hamming(4)
    llr = np.array(llr)
    cfg = SpConfig(max_iterations=5)
    a, _, ia = sp_decode(code, llr, cfg)
    b, _, ib = sp_decode(code, -llr, cfg)
    # negation is not a symmetry of the stopping rule, so compare equal runs only
    if ia == ib == cfg.max_iterations:
        assert np.allclose(a, -b, atol=1e-9)


def test_order_zero_reencodes_a_codeword():
    code = hamming(3)
    c = code.G[1]
    post = np.where(c == 1, -3.0, 3.0)
    cand = osd_reencode(code, post, post, 0)
    assert np.array_equal(cand.codeword, c)


def test_order_two_never_worse_than_order_zero(hamming7):
    code, words = hamming7
    rng = np.random.default_rng(2)
    for _ in range(200):
        llr = rng.normal(0.5, 1.5, 7)
        post, _, _ = sp_decode(code, llr)
        c0 = osd_reencode(code, llr, post, 0)
        c2 = osd_reencode(code, llr, post, 2)
        assert c2.objective <= c0.objective + 1e-12
        assert is_codeword(code, c2.codeword)
        assert c2.objective == pytest.approx(float(llr @ c2.codeword))


def test_exclusion_gives_minimum_weight_word(hamming7):
    code, _ = hamming7
    ones = np.ones(7)
    cand = osd_reencode(code, ones, ones, 2, exclude=np.zeros(7, dtype=np.uint8))
    assert cand.codeword.any()
    assert cand.objective == 3


def test_order_above_k_rejected():
    with pytest.raises(ValueError):
        osd_reencode(hamming(3), np.ones(7), np.ones(7), 5)


def test_reliability_order_puts_constraints_first():
    post = np.array([0.1, -5.0, 2.0, 0.0, -2.0])
    assert reliability_order(post, {3: 1}).tolist() == [3, 1, 2, 4, 0]


def test_osd_respects_constraints(codes_with_words):
    rng = np.random.default_rng(3)
    for code, words in codes_with_words:
        for _ in range(40):
            w = words[rng.integers(len(words))]
            pos = rng.choice(code.n, int(rng.integers(1, code.n)), replace=False)
            fixed = {int(p): int(w[p]) for p in pos}
            llr = rng.normal(0, 2, code.n)
            post, _, _ = sp_decode(code, constrained_llr(llr, fixed))
            cand = osd_reencode(code, llr, post, 2, fixed=fixed)
            assert is_codeword(code, cand.codeword)
            assert all(cand.codeword[p] == v for p, v in fixed.items())


def test_sandwich(codes_with_words):
    rng = np.random.default_rng(4)
    for code, words in codes_with_words:
        for _ in range(200 if code.n <= 7 else 60):
            llr = rng.normal(0.8, 1.5, code.n)
            cand, z = lubd(code, llr, {}, SpConfig(), ZsParams())
            best, _ = brute_ml(words, llr)
            assert z.value <= best + 1e-9 <= cand.objective + 2e-9


def test_lubd_examples(hamming7):
    code, words = hamming7
    cand, z = lubd(code, np.ones(7), {}, SpConfig(), ZsParams())
    assert not cand.codeword.any() and cand.objective == 0
    assert z.integral and not z.point.any()
    c = words[5]
    fixed = {i: int(b) for i, b in enumerate(c)}
    llr = np.random.default_rng(0).normal(size=7)
    cand, z = lubd(code, llr, fixed, SpConfig(), ZsParams())
    assert np.array_equal(cand.codeword, c)
    assert np.array_equal(np.round(z.point), c)
    assert z.value <= cand.objective + 1e-9
