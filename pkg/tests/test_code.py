import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mldecode.code import (
    LinearCode,
    bch,
    bch_127_85,
    bch_generator_poly,
    check_constraints,
    derive_generator,
    hamming,
    is_codeword,
    is_valid,
    tanner_155_64,
)
from mldecode.gf2 import matmul, rank
from oracles import all_codewords, random_code
from conftest import small_codes


@pytest.fixture(scope="module")
def tanner():
    return tanner_155_64()


def test_repetition_generator():
    assert np.array_equal(derive_generator([[1, 1]]), [[1, 1]])


def test_hamming_generator():
    G = derive_generator(hamming(3).H_dense)
    assert G.shape == (4, 7)
    assert rank_of(G) == 4
    assert not matmul(G, hamming(3).H_dense.T).any()


def rank_of(M):
    from mldecode.gf2 import BitMatrix

    return rank(BitMatrix.from_dense(M))


def test_generator_of_full_rank_h_fails():
    with pytest.raises(ValueError):
        derive_generator(np.eye(3, dtype=np.uint8))


def test_code_invariants_small_codes():
    for code in small_codes():
        assert not matmul(code.G, code.H_dense.T).any()
        assert rank_of(code.G) == code.k
        words = all_codewords(code.H_dense)
        assert len(words) == 2**code.k
        mine = {tuple(w) for w in code.codewords().tolist()}
        assert mine == {tuple(w) for w in words.tolist()}
        for j, nb in enumerate(code.neighborhoods):
            assert np.array_equal(nb, np.flatnonzero(code.H_dense[j]))


def test_is_codeword_examples():
    code = hamming(3)
    assert is_codeword(code, np.zeros(7, dtype=np.uint8))
    for row in code.G:
        assert is_codeword(code, row)
    e0 = np.zeros(7, dtype=np.uint8)
    e0[0] = 1
    assert not is_codeword(code, e0)
    with pytest.raises(ValueError):
        is_codeword(code, np.zeros(6, dtype=np.uint8))


def test_is_valid_examples():
    code = hamming(3)
    assert is_valid(code, {})
    assert not is_valid(LinearCode([[1, 1]]), {0: 1, 1: 0})
    # the pivots of G's systematic form are an information set
    from mldecode.gf2 import BitMatrix, rref

    _, info = rref(BitMatrix.from_dense(code.G))
    for bits in range(16):
        fixed = {p: (bits >> t) & 1 for t, p in enumerate(info)}
        assert is_valid(code, fixed)


def _brute_valid(words, fixed, exclude_zero):
    keep = np.ones(len(words), dtype=bool)
    for p, v in fixed.items():
        keep &= words[:, p] == v
    if exclude_zero:
        keep &= words.any(axis=1)
    return bool(keep.any())


@pytest.mark.parametrize("exclude_zero", [False, True])
def test_is_valid_matches_enumeration(exclude_zero):
    rng = np.random.default_rng(11)
    for code in small_codes():
        words = all_codewords(code.H_dense)
        for _ in range(100):
            size = rng.integers(0, code.n + 1)
            pos = rng.choice(code.n, size, replace=False)
            fixed = {int(p): int(rng.integers(0, 2)) for p in pos}
            if rng.random() < 0.3 and size:
                # bias toward consistent sets: copy a random codeword
                w = words[rng.integers(len(words))]
                fixed = {p: int(w[p]) for p in fixed}
            assert is_valid(code, fixed, exclude_zero) == _brute_valid(words, fixed, exclude_zero)


def test_check_constraints_rejects_bad_sets():
    code = hamming(3)
    check_constraints(code, {0: 1, 6: 0})
    with pytest.raises(ValueError):
        check_constraints(code, {7: 1})
    with pytest.raises(ValueError):
        check_constraints(code, {0: 2})


def test_tanner_structure(tanner):
    assert tanner.H.shape == (93, 155)
    assert rank(tanner.H) == 91
    assert (tanner.n, tanner.k) == (155, 64)
    assert tanner.G.shape == (64, 155)
    assert set(tanner.H_dense.sum(axis=0)) == {3}
    assert set(tanner.H_dense.sum(axis=1)) == {5}
    assert not matmul(tanner.G, tanner.H_dense.T).any()


def test_bch_127_85():
    code = bch_127_85()
    assert (code.n, code.k, code.m) == (127, 85, 42)
    assert not matmul(code.G, code.H_dense.T).any()
    g = bch_generator_poly(7, 6)
    assert g.bit_length() - 1 == 42
    gw = np.array([(g >> d) & 1 for d in range(127)], dtype=np.uint8)
    assert is_codeword(code, gw)
    # cyclic: every shift of a codeword is a codeword
    rng = np.random.default_rng(0)
    c = matmul(rng.integers(0, 2, code.k), code.G).astype(np.uint8)
    for s in (1, 5, 64):
        assert is_codeword(code, np.roll(c, s))


def test_small_bch_matches_known_parameters():
    # (15,7) BCH, t=2: d = 5
    code = bch(4, 2)
    assert (code.n, code.k) == (15, 7)
    w = all_codewords(code.H_dense).sum(axis=1)
    assert w[w > 0].min() == 5


@given(st.integers(4, 14), st.data())
def test_random_codes_have_requested_dimension(n, data):
    k = data.draw(st.integers(1, n - 1))
    H = random_code(n, k, np.random.default_rng(data.draw(st.integers(0, 2**31))))
    code = LinearCode(H)
    assert code.k == k
    assert not matmul(code.G, H.T).any()
