"""Binary linear codes given by a parity-check matrix, and constraint sets."""

from __future__ import annotations

from collections.abc import Mapping
from functools import cached_property

import numpy as np

from .gf2 import BitMatrix, _rref_inplace, matmul, null_space, rank

# A constraint set maps codeword positions to the bit they are committed to.
ConstraintSet = Mapping[int, int]


class LinearCode:
    """Binary linear code of length ``n`` with parity-check matrix ``H``.

    ``H`` may carry redundant rows; ``k = n - rank(H)``.  The generator matrix
    is derived once at construction time.
    """

    def __init__(self, H, name: str = ""):
        if not isinstance(H, BitMatrix):
            H = BitMatrix.from_dense(H)
        self.H = H
        self.name = name
        self.m, self.n = H.shape
        self.H_dense = H.to_dense()
        self.H_dense.setflags(write=False)
        self.k = self.n - rank(H)
        if self.k > 0:
            self.G = null_space(H)
        else:
            self.G = np.zeros((0, self.n), dtype=np.uint8)
        self.G.setflags(write=False)

    @cached_property
    def neighborhoods(self) -> list[np.ndarray]:
        """``N(j)``: positions taking part in check ``j``."""
        return [np.flatnonzero(row) for row in self.H_dense]

    @cached_property
    def check_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Check neighborhoods flattened as (indptr, indices) for the kernels."""
        sizes = np.array([len(nb) for nb in self.neighborhoods], dtype=np.int64)
        indptr = np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)
        indices = (
            np.concatenate(self.neighborhoods).astype(np.int64)
            if indptr[-1]
            else np.zeros(0, dtype=np.int64)
        )
        return indptr, indices

    def syndrome(self, c) -> np.ndarray:
        return matmul(self.H_dense, np.asarray(c)).astype(np.uint8)

    def codewords(self) -> np.ndarray:
        """All ``2**k`` codewords (only sensible for small ``k``)."""
        if self.k > 24:
            raise ValueError(f"refusing to enumerate 2**{self.k} codewords")
        msgs = (np.arange(2**self.k)[:, None] >> np.arange(self.k)[None, :]) & 1
        return matmul(msgs, self.G).astype(np.uint8)

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"LinearCode({label}n={self.n}, k={self.k}, m={self.m})"


def derive_generator(H) -> np.ndarray:
    """Generator matrix (``k x n``, full rank) of the code with check matrix ``H``."""
    if not isinstance(H, BitMatrix):
        H = BitMatrix.from_dense(H)
    G = null_space(H)
    if G.shape[0] == 0:
        raise ValueError("H has full column rank; the code is {0}")
    return G


def is_codeword(code: LinearCode, c) -> bool:
    c = np.asarray(c)
    if c.shape != (code.n,):
        raise ValueError(f"expected a vector of length {code.n}, got shape {c.shape}")
    return not code.syndrome(c).any()


def check_constraints(code: LinearCode, fixed: ConstraintSet) -> None:
    for pos, val in fixed.items():
        if not 0 <= pos < code.n:
            raise ValueError(f"constrained position {pos} out of range for n={code.n}")
        if val not in (0, 1):
            raise ValueError(f"position {pos} constrained to non-binary value {val!r}")


def is_valid(code: LinearCode, fixed: ConstraintSet, exclude_zero: bool = False) -> bool:
    """Whether some codeword agrees with ``fixed``.

    With ``exclude_zero`` the all-zero word does not count, which is what the
    minimum-distance search needs.
    """
    if not fixed:
        return code.k > 0 if exclude_zero else True
    positions = np.fromiter(fixed.keys(), dtype=np.int64, count=len(fixed))
    values = np.fromiter(fixed.values(), dtype=np.int64, count=len(fixed))
    mask = np.ones(code.n, dtype=bool)
    mask[positions] = False
    free = np.flatnonzero(mask)
    H = code.H_dense
    target = (H[:, positions[values == 1]].sum(axis=1) % 2).astype(np.uint8)
    aug = np.concatenate([H[:, free], target[:, None]], axis=1)
    words = BitMatrix.from_dense(aug).words.copy()
    pivots = _rref_inplace(words, np.arange(len(free), dtype=np.int64))
    r = len(pivots)
    last = len(free)
    w, b = last >> 6, np.uint64(1) << np.uint64(last & 63)
    if (words[r:, w] & b).any():
        return False
    if exclude_zero and not values.any():
        # only zero-constraints: need a nonzero solution of the shortened code
        return len(free) - r > 0
    return True


def hamming(r: int) -> LinearCode:
    """The ``(2**r - 1, 2**r - 1 - r)`` Hamming code; column j is j+1 in binary."""
    n = 2**r - 1
    H = ((np.arange(1, n + 1)[None, :] >> np.arange(r)[:, None]) & 1).astype(np.uint8)
    return LinearCode(H, name=f"hamming({n},{n - r})")


def tanner_155_64() -> LinearCode:
    """The (155,64) Tanner code: 3x5 array of shifted 31x31 identities.

    Block (i, j) is the identity shifted cyclically by ``5**i * 2**j mod 31``.
    """
    p = 31
    H = np.zeros((3 * p, 5 * p), dtype=np.uint8)
    eye = np.eye(p, dtype=np.uint8)
    for i in range(3):
        for j in range(5):
            shift = (5**i * 2**j) % p
            H[i * p : (i + 1) * p, j * p : (j + 1) * p] = np.roll(eye, shift, axis=1)
    return LinearCode(H, name="tanner(155,64)")


# primitive polynomials, bit t = coefficient of x**t
_PRIMITIVE = {3: 0b1011, 4: 0b10011, 5: 0b100101, 6: 0b1000011, 7: 0b10001001, 8: 0b100011101}


def _poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_divmod(a: int, b: int) -> tuple[int, int]:
    q = 0
    db = b.bit_length()
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q |= 1 << s
        a ^= b << s
    return q, a


def bch_generator_poly(m: int, t: int) -> int:
    """Generator polynomial of the narrow-sense binary BCH code of length 2**m - 1."""
    n = 2**m - 1
    prim = _PRIMITIVE[m]
    exp = [0] * (2 * n)
    x = 1
    for i in range(n):
        exp[i] = x
        x <<= 1
        if x >> m:
            x ^= prim
    for i in range(n, 2 * n):
        exp[i] = exp[i - n]
    log = {v: i for i, v in enumerate(exp[:n])}

    def gf_mul(a, b):
        if a == 0 or b == 0:
            return 0
        return exp[log[a] + log[b]]

    g = 1
    seen: set[int] = set()
    for s in range(1, 2 * t + 1):
        if s in seen:
            continue
        coset = []
        e = s
        while e not in coset:
            coset.append(e)
            e = (2 * e) % n
        seen.update(coset)
        # minimal polynomial: prod (x + alpha**e), coefficients low degree first
        poly = [1]
        for e in coset:
            root = exp[e]
            nxt = [0] * (len(poly) + 1)
            for d, coef in enumerate(poly):
                nxt[d + 1] ^= coef
                nxt[d] ^= gf_mul(coef, root)
            poly = nxt
        if any(c not in (0, 1) for c in poly):
            raise AssertionError("minimal polynomial is not binary")
        mp = sum(c << d for d, c in enumerate(poly))
        g = _poly_mul(g, mp)
    return g


def bch(m: int, t: int) -> LinearCode:
    """Narrow-sense primitive BCH code with designed distance ``2t+1``.

    The parity-check matrix holds the ``n - k`` cyclic shifts of the
    reciprocal check polynomial, so it is dense with no redundant rows.
    """
    n = 2**m - 1
    g = bch_generator_poly(m, t)
    h, rem = _poly_divmod((1 << n) | 1, g)
    assert rem == 0
    k = h.bit_length() - 1
    recip = [(h >> (k - d)) & 1 for d in range(k + 1)]
    H = np.zeros((n - k, n), dtype=np.uint8)
    for i in range(n - k):
        H[i, i : i + k + 1] = recip
    return LinearCode(H, name=f"bch({n},{k})")


def bch_127_85() -> LinearCode:
    return bch(7, 6)
