"""Parity-inequality separation and adaptive LP decoding with redundant-check cuts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .code import ConstraintSet, LinearCode
from .gf2 import BitMatrix, _rref_inplace
from .lp import CutInequality, CutLP, LpStatus

MAX_LP_SOLVES = 2000


@dataclass(frozen=True)
class ZsParams:
    purge_threshold: int = 100
    max_rounds: int = 5
    max_rounds_best_bound: int = 100
    cutoff: float = 0.2
    integrality_tol: float = 1e-5
    # "distance": violation / sqrt(|N(j)|); "violation": the raw violation
    cutoff_metric: str = "violation"

    def __post_init__(self):
        if self.purge_threshold < 1:
            raise ValueError("purge_threshold must be >= 1")
        if self.max_rounds < 0 or self.max_rounds_best_bound < self.max_rounds:
            raise ValueError("need 0 <= max_rounds <= max_rounds_best_bound")
        if self.cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        if not 0 < self.integrality_tol < 0.5:
            raise ValueError("integrality_tol must lie in (0, 0.5)")
        if self.cutoff_metric not in ("distance", "violation"):
            raise ValueError(f"unknown cutoff metric {self.cutoff_metric!r}")


@dataclass
class ZsResult:
    point: np.ndarray
    value: float
    integral: bool
    status: LpStatus
    lp_solves: int = 0
    history: list[float] = field(default_factory=list)


@njit(cache=True)
def _separate(indptr, indices, p, gamma, tol, normalize):
    """Most violated odd subset per row; keeps rows whose cutoff reaches gamma.

    Returns (row mask, membership flags aligned with ``indices``).
    """
    nrows = indptr.shape[0] - 1
    found = np.zeros(nrows, dtype=np.bool_)
    in_v = np.zeros(indices.shape[0], dtype=np.bool_)
    for r in range(nrows):
        s, e = indptr[r], indptr[r + 1]
        deg = e - s
        if deg == 0:
            continue
        cnt = 0
        viol = 0.0
        near = -1
        near_dist = np.inf
        for t in range(s, e):
            v = p[indices[t]]
            if v > 0.5:
                in_v[t] = True
                cnt += 1
                viol += v
            else:
                in_v[t] = False
                viol -= v
            dist = abs(v - 0.5)
            if dist < near_dist:
                near_dist = dist
                near = t
        if cnt % 2 == 0:
            v = p[indices[near]]
            if in_v[near]:
                in_v[near] = False
                cnt -= 1
                viol -= 2.0 * v
            else:
                in_v[near] = True
                cnt += 1
                viol += 2.0 * v
        viol -= cnt - 1
        cutoff = viol / np.sqrt(deg) if normalize else viol
        if viol > tol and cutoff >= gamma:
            found[r] = True
    return found, in_v


def violation(cut: CutInequality, p) -> float:
    p = np.asarray(p, dtype=float)
    v = list(cut.odd_subset)
    rest = [i for i in cut.neighborhood if i not in set(v)]
    return float(p[v].sum() - p[rest].sum() - (len(v) - 1))


def _cuts_from_csr(indptr, indices, p, gamma, metric="distance") -> list[CutInequality]:
    found, in_v = _separate(indptr, indices, np.asarray(p, dtype=float), float(gamma), 1e-9, metric == "distance")
    cuts = []
    for r in np.flatnonzero(found):
        s, e = indptr[r], indptr[r + 1]
        nb = indices[s:e]
        cuts.append(CutInequality(tuple(nb.tolist()), tuple(nb[in_v[s:e]].tolist())))
    return cuts


def find_cut(neighborhood, p, gamma: float, metric: str = "distance") -> CutInequality | None:
    """Most violated parity inequality of one check, if its cutoff reaches gamma.

    With the default metric the cutoff is the Euclidean distance from ``p`` to
    the cutting hyperplane, ``violation / sqrt(|N|)``.
    """
    nb = np.asarray(sorted(neighborhood), dtype=np.int64)
    cuts = _cuts_from_csr(np.array([0, len(nb)], dtype=np.int64), nb, p, gamma, metric)
    return cuts[0] if cuts else None


def find_cuts(code: LinearCode, p, gamma: float, metric: str = "distance") -> list[CutInequality]:
    """Separate over every row of the code's parity-check matrix."""
    indptr, indices = code.check_csr
    return _cuts_from_csr(indptr, indices, p, gamma, metric)


def fractionality_order(p) -> np.ndarray:
    """Positions sorted by |p_i - 1/2| ascending, ties by index."""
    return np.argsort(np.abs(np.asarray(p, dtype=float) - 0.5), kind="stable")


def redundant_cut_round(code: LinearCode, p, gamma: float, metric: str = "distance") -> list[CutInequality]:
    """One Gaussian elimination of H (most fractional columns first) plus a scan of its rows."""
    words = code.H.words.copy()
    _rref_inplace(words, fractionality_order(p).astype(np.int64))
    dense = BitMatrix(code.m, code.n, words).to_dense()
    rows, cols = np.nonzero(dense)
    indptr = np.zeros(code.m + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr)
    return _cuts_from_csr(indptr, cols.astype(np.int64), p, gamma, metric)


def is_integral(p, tol: float) -> bool:
    p = np.asarray(p)
    return bool(np.all(np.abs(p - np.round(p)) <= tol))


def zs_decode(
    code: LinearCode,
    llr,
    fixed: ConstraintSet,
    params: ZsParams,
    bound: float | None = None,
    lp: CutLP | None = None,
    best_bound: bool = False,
) -> ZsResult:
    """Adaptive LP decoding under the fixings ``fixed``.

    Cuts from the rows of H are searched first; only when those are exhausted
    is a redundant-check round spent (at most ``max_rounds`` per call, or
    ``max_rounds_best_bound`` when ``best_bound`` is set).  The returned value
    is a lower bound on the best objective of any codeword agreeing with
    ``fixed``.  Passing ``lp`` reuses its cut pool and basis.
    """
    if lp is None:
        lp = CutLP(llr, purge_threshold=params.purge_threshold)
    lp.set_fixings(fixed)
    limit = params.max_rounds_best_bound if best_bound else params.max_rounds
    rounds = 0
    history: list[float] = []
    tol = params.integrality_tol
    while True:
        sol = lp.solve(bound=bound)
        history.append(sol.value)
        if sol.status is not LpStatus.OPTIMAL:
            return ZsResult(sol.point, sol.value, False, sol.status, len(history), history)
        p = sol.point
        integral = is_integral(p, tol)
        if integral and not code.syndrome(np.round(p).astype(np.uint8)).any():
            return ZsResult(np.round(p), sol.value, True, sol.status, len(history), history)
        # an integral non-codeword must always be cut off, whatever its cutoff
        gamma = 0.0 if integral else params.cutoff
        cuts = find_cuts(code, p, gamma, params.cutoff_metric)
        if not cuts and not integral and rounds < limit and len(history) < MAX_LP_SOLVES:
            rounds += 1
            cuts = redundant_cut_round(code, p, gamma, params.cutoff_metric)
        if not cuts or len(history) >= MAX_LP_SOLVES:
            return ZsResult(p, sol.value, False, sol.status, len(history), history)
        lp.purge_inactive(sol)
        lp.add_cuts(cuts)
