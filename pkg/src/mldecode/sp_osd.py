"""Upper bounds: sum-product decoding followed by order-i re-encoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .code import ConstraintSet, LinearCode
from .cuts import ZsParams, ZsResult, zs_decode
from .lp import CutLP


@dataclass(frozen=True)
class SpConfig:
    max_iterations: int = 50
    llr_clamp: float = 50.0
    reencode_order: int = 2

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.llr_clamp <= 0:
            raise ValueError("llr_clamp must be positive")
        if self.reencode_order < 0:
            raise ValueError("reencode_order must be >= 0")


@dataclass
class Candidate:
    codeword: np.ndarray
    objective: float


@njit(cache=True)
def _sum_product(indptr, indices, llr, frozen, max_iter, clamp):
    """Flooding sum-product with saturated messages.

    ``frozen`` positions always send ``llr`` (already +-clamp) and keep it as
    posterior.  Returns (posterior, hard decision, iterations run).
    """
    m = indptr.shape[0] - 1
    n = llr.shape[0]
    E = indices.shape[0]
    r = np.zeros(E)
    q = np.zeros(E)
    t = np.zeros(E)
    post = llr.copy()
    hard = np.zeros(n, dtype=np.uint8)
    limit = 1.0 - 1e-15
    it = 0
    while it < max_iter:
        it += 1
        for e in range(E):
            i = indices[e]
            if frozen[i]:
                v = llr[i]
            else:
                v = post[i] - r[e]
            if v > clamp:
                v = clamp
            elif v < -clamp:
                v = -clamp
            q[e] = v
            t[e] = np.tanh(0.5 * v)
        for j in range(m):
            s, e_end = indptr[j], indptr[j + 1]
            # product over the other edges via prefix/suffix products
            prod = 1.0
            for e in range(s, e_end):
                r[e] = prod
                prod *= t[e]
            prod = 1.0
            for e in range(e_end - 1, s - 1, -1):
                x = r[e] * prod
                prod *= t[e]
                if x > limit:
                    x = limit
                elif x < -limit:
                    x = -limit
                v = 2.0 * np.arctanh(x)
                if v > clamp:
                    v = clamp
                elif v < -clamp:
                    v = -clamp
                r[e] = v
        for i in range(n):
            post[i] = llr[i]
        for e in range(E):
            i = indices[e]
            if not frozen[i]:
                post[i] += r[e]
        for i in range(n):
            hard[i] = 1 if post[i] < 0.0 else 0
        ok = True
        for j in range(m):
            par = 0
            for e in range(indptr[j], indptr[j + 1]):
                par ^= hard[indices[e]]
            if par:
                ok = False
                break
        if ok:
            break
    return post, hard, it


def sp_decode(code: LinearCode, llr, cfg: SpConfig = SpConfig()):
    """Sum-product decoding; returns (posterior LLRs, hard decision, iterations).

    Infinite entries of ``llr`` mark constrained positions: they are saturated
    to ``+-llr_clamp`` and never change.
    """
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llr.shape}")
    frozen = np.isinf(llr)
    inp = np.clip(llr, -cfg.llr_clamp, cfg.llr_clamp)
    indptr, indices = code.check_csr
    return _sum_product(indptr, indices, inp, frozen, cfg.max_iterations, cfg.llr_clamp)


@njit(cache=True)
def _next_combination(idx, k):
    """Advance ``idx`` to the next lexicographic combination of range(k)."""
    w = idx.shape[0]
    i = w - 1
    while i >= 0 and idx[i] == k - w + i:
        i -= 1
    if i < 0:
        return False
    idx[i] += 1
    for j in range(i + 1, w):
        idx[j] = idx[j - 1] + 1
    return True


@njit(cache=True)
def _osd(G, order, fixed_mask, bits, llr, max_order, exclude, use_exclude):
    """Order-i re-encoding on the most reliable basis.

    ``order`` lists positions by decreasing reliability (constrained first);
    ``bits`` holds the hard decisions.  Returns (found, codeword, objective).
    """
    k, n = G.shape
    M = G.copy()
    piv = np.empty(k, dtype=np.int64)
    r = 0
    for c in order:
        if r == k:
            break
        p = -1
        for i in range(r, k):
            if M[i, c]:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for t in range(n):
                tmp = M[r, t]
                M[r, t] = M[p, t]
                M[p, t] = tmp
        for i in range(k):
            if i != r and M[i, c]:
                for t in range(n):
                    M[i, t] ^= M[r, t]
        piv[r] = c
        r += 1
    base = np.zeros(n, dtype=np.uint8)
    for row in range(r):
        if bits[piv[row]]:
            for t in range(n):
                base[t] ^= M[row, t]
    flip_rows = np.empty(r, dtype=np.int64)
    nf = 0
    for row in range(r):
        if not fixed_mask[piv[row]]:
            flip_rows[nf] = row
            nf += 1
    best = np.zeros(n, dtype=np.uint8)
    best_obj = np.inf
    found = False
    cand = np.empty(n, dtype=np.uint8)
    top = min(max_order, nf)
    for w in range(top + 1):
        idx = np.arange(w)
        while True:
            for t in range(n):
                cand[t] = base[t]
            for a in range(w):
                row = flip_rows[idx[a]]
                for t in range(n):
                    cand[t] ^= M[row, t]
            skip = False
            if use_exclude:
                skip = True
                for t in range(n):
                    if cand[t] != exclude[t]:
                        skip = False
                        break
            if not skip:
                obj = 0.0
                for t in range(n):
                    if cand[t]:
                        obj += llr[t]
                if obj < best_obj:
                    best_obj = obj
                    found = True
                    for t in range(n):
                        best[t] = cand[t]
            if w == 0 or not _next_combination(idx, nf):
                break
    return found, best, best_obj


def reliability_order(posterior, fixed: ConstraintSet = {}) -> np.ndarray:
    """Constrained positions first, then by |posterior| descending (ties by index)."""
    posterior = np.asarray(posterior, dtype=float)
    head = np.array(sorted(fixed), dtype=np.int64)
    mask = np.ones(len(posterior), dtype=bool)
    mask[head] = False
    rest = np.flatnonzero(mask)
    rest = rest[np.argsort(-np.abs(posterior[rest]), kind="stable")]
    return np.concatenate([head, rest]).astype(np.int64)


def osd_reencode(
    code: LinearCode,
    llr,
    posterior,
    order: int,
    exclude=None,
    fixed: ConstraintSet = {},
) -> Candidate | None:
    """Best codeword among all re-encodings with at most ``order`` basis flips.

    Candidates are scored with the channel ``llr``.  Positions in ``fixed``
    take their constrained values and are never flipped, so every candidate
    agrees with ``fixed`` when it is valid.  Returns None when every candidate
    equals ``exclude``.
    """
    if order > code.k:
        raise ValueError(f"re-encoding order {order} exceeds k={code.k}")
    posterior = np.asarray(posterior, dtype=float)
    llr = np.asarray(llr, dtype=float)
    bits = (posterior < 0).astype(np.uint8)
    fixed_mask = np.zeros(code.n, dtype=np.bool_)
    for pos, val in fixed.items():
        bits[pos] = val
        fixed_mask[pos] = True
    perm = reliability_order(posterior, fixed)
    ex = np.zeros(code.n, dtype=np.uint8) if exclude is None else np.asarray(exclude, dtype=np.uint8)
    found, word, obj = _osd(
        np.ascontiguousarray(code.G, dtype=np.uint8), perm, fixed_mask, bits, llr, order, ex, exclude is not None
    )
    if not found:
        return None
    return Candidate(word.copy(), float(llr @ word))


def constrained_llr(llr, fixed: ConstraintSet) -> np.ndarray:
    """Channel LLRs with +inf on 0-constrained and -inf on 1-constrained positions."""
    out = np.array(llr, dtype=float)
    for pos, val in fixed.items():
        out[pos] = -np.inf if val else np.inf
    return out


def lubd(
    code: LinearCode,
    llr,
    fixed: ConstraintSet,
    sp_cfg: SpConfig,
    zs_params: ZsParams,
    tau: float = np.inf,
    best_bound: bool = False,
    lp: CutLP | None = None,
    exclude_zero: bool = False,
    threshold=None,
) -> tuple[Candidate | None, ZsResult]:
    """Paired upper/lower bound for the codewords agreeing with ``fixed``.

    The LP stops early once its bound reaches ``threshold(min(tau, candidate))``
    (identity by default): past that level the node cannot improve on the
    incumbent.
    """
    post, _, _ = sp_decode(code, constrained_llr(llr, fixed), sp_cfg)
    exclude = np.zeros(code.n, dtype=np.uint8) if exclude_zero else None
    cand = osd_reencode(code, llr, post, min(sp_cfg.reencode_order, code.k), exclude, fixed)
    ub = tau if cand is None else min(tau, cand.objective)
    if ub == np.inf:
        bound = None
    else:
        bound = ub if threshold is None else threshold(ub)
    lower = zs_decode(code, llr, fixed, zs_params, bound=bound, lp=lp, best_bound=best_bound)
    return cand, lower
