"""Bounded-variable dual simplex for the box-plus-cuts LPs of adaptive LP decoding.

The LP is

    minimize  c x   subject to   A x + s = b,  lo <= x <= hi,  s >= 0

where every row of ``A`` is a parity inequality.  The all-slack basis is dual
feasible for any ``c`` (each ``x_j`` is boxed), so a cold start never needs a
phase one, appended rows keep the basis dual feasible, and changing variable
bounds only moves nonbasic variables between their bounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-10
ACTIVE_TOL = 1e-7
REFACTOR_EVERY = 64

_OPTIMAL, _INFEASIBLE, _BOUND, _NUMERIC, _DUAL_INFEASIBLE = 0, 1, 2, 3, 4


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    BOUND_EXCEEDED = "boundExceeded"


class LpNumericalError(RuntimeError):
    """The simplex lost numerical stability; callers may retry from a cold start."""


@dataclass(frozen=True)
class CutInequality:
    """Parity inequality sum_{V} x - sum_{N \\ V} x <= |V| - 1 for odd V in N."""

    neighborhood: tuple[int, ...]
    odd_subset: tuple[int, ...]

    def __post_init__(self):
        if len(self.odd_subset) % 2 != 1:
            raise ValueError("odd_subset must have odd size")
        if not set(self.odd_subset) <= set(self.neighborhood):
            raise ValueError("odd_subset must lie inside the neighborhood")

    @property
    def rhs(self) -> float:
        return float(len(self.odd_subset) - 1)

    def coefficients(self, n: int) -> np.ndarray:
        row = np.zeros(n)
        row[list(self.neighborhood)] = -1.0
        row[list(self.odd_subset)] = 1.0
        return row

    def slack(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return self.rhs - float(self.coefficients(len(x)) @ x)


@dataclass(frozen=True)
class Basis:
    """Warm-start token: basic column indices and which nonbasic x sit at upper."""

    basic: np.ndarray
    at_upper: np.ndarray
    n_rows: int


@dataclass
class LpSolution:
    point: np.ndarray
    value: float
    status: LpStatus
    active_cuts: list[int]
    basis: Basis | None
    iterations: int = 0


@njit(cache=True)
def _invert(M):
    """LAPACK inverse plus a residual check; returns (inverse, ok)."""
    m = M.shape[0]
    try:
        inv = np.linalg.inv(M)
    except Exception:
        return np.eye(m), False
    return inv, bool(np.isfinite(inv).all() and np.abs(inv).max() < 1e12)


@njit(cache=True)
def _refactor(A, basic, n):
    m = A.shape[0]
    B = np.zeros((m, m))
    for t in range(m):
        j = basic[t]
        if j < n:
            for i in range(m):
                B[i, t] = A[i, j]
        else:
            B[j - n, t] = 1.0
    return _invert(B)


@njit(cache=True)
def _primal_values(A, b, lo, hi, basic, is_basic, at_upper, Binv, n):
    m = A.shape[0]
    x = np.zeros(n + m)
    for j in range(n):
        if not is_basic[j]:
            x[j] = hi[j] if at_upper[j] else lo[j]
    rhs = b.copy()
    for i in range(m):
        acc = 0.0
        for j in range(n):
            if not is_basic[j] and x[j] != 0.0:
                acc += A[i, j] * x[j]
        rhs[i] -= acc
    for t in range(m):
        acc = 0.0
        for i in range(m):
            acc += Binv[t, i] * rhs[i]
        x[basic[t]] = acc
    return x


@njit(cache=True)
def _reduced_costs(A, c, basic, Binv, n):
    m = A.shape[0]
    y = np.zeros(m)
    for t in range(m):
        j = basic[t]
        if j < n and c[j] != 0.0:
            for i in range(m):
                y[i] += c[j] * Binv[t, i]
    d = np.zeros(n + m)
    for j in range(n):
        acc = c[j]
        for i in range(m):
            acc -= y[i] * A[i, j]
        d[j] = acc
    for i in range(m):
        d[n + i] = -y[i]
    for t in range(m):
        d[basic[t]] = 0.0
    return d


@njit(cache=True)
def _dual_simplex(A, b, c, lo, hi, basic, at_upper, Binv, refactor, bound, max_iter):
    """Run dual simplex iterations in place.

    Returns (status, x, objective, iterations, Binv).  ``basic`` and
    ``at_upper`` are updated in place.
    """
    m, n = A.shape
    is_basic = np.zeros(n + m, dtype=np.bool_)
    for t in range(m):
        is_basic[basic[t]] = True
    if refactor and m > 0:
        Binv, ok = _refactor(A, basic, n)
        if not ok:
            return _NUMERIC, np.zeros(n + m), 0.0, 0, Binv
    d = _reduced_costs(A, c, basic, Binv, n)
    for j in range(n):
        if not is_basic[j] and hi[j] > lo[j]:
            if d[j] < -DUAL_TOL:
                at_upper[j] = True
            elif d[j] > DUAL_TOL:
                at_upper[j] = False
    for i in range(m):
        if not is_basic[n + i] and d[n + i] < -1e-7:
            return _DUAL_INFEASIBLE, np.zeros(n + m), 0.0, 0, Binv
    x = _primal_values(A, b, lo, hi, basic, is_basic, at_upper, Binv, n)

    degenerate = 0
    bland = False
    since_refactor = 0
    alpha = np.zeros(n + m)
    w = np.zeros(m)
    col = np.zeros(m)
    it = 0
    while True:
        z = 0.0
        for j in range(n):
            z += c[j] * x[j]
        # pick the leaving row
        r = -1
        best = PRIMAL_TOL
        for t in range(m):
            j = basic[t]
            if j < n:
                low, up = lo[j], hi[j]
            else:
                low, up = 0.0, np.inf
            v = x[j]
            infeas = 0.0
            if v < low - PRIMAL_TOL:
                infeas = low - v
            elif v > up + PRIMAL_TOL:
                infeas = v - up
            if infeas > 0.0:
                if bland:
                    if r < 0 or j < basic[r]:
                        r = t
                elif infeas > best:
                    best = infeas
                    r = t
        if r < 0:
            return _OPTIMAL, x, z, it, Binv
        if z >= bound:
            return _BOUND, x, z, it, Binv
        if it >= max_iter:
            return _NUMERIC, x, z, it, Binv
        it += 1

        leave = basic[r]
        if leave < n:
            low_r, up_r = lo[leave], hi[leave]
        else:
            low_r, up_r = 0.0, np.inf
        to_lower = x[leave] < low_r
        target = low_r if to_lower else up_r

        # pivot row alpha_j = (row r of B^-1) . a_j over nonbasic columns
        for j in range(n):
            alpha[j] = 0.0
        for i in range(m):
            f = Binv[r, i]
            if f != 0.0:
                for j in range(n):
                    alpha[j] += f * A[i, j]
        for j in range(n):
            if is_basic[j]:
                alpha[j] = 0.0
        for i in range(m):
            alpha[n + i] = 0.0 if is_basic[n + i] else Binv[r, i]

        # ratio test (Harris two-pass, or plain min-ratio under Bland)
        theta_max = np.inf
        for j in range(n + m):
            if is_basic[j]:
                continue
            a = alpha[j]
            if j < n:
                if hi[j] <= lo[j]:
                    continue
                upper = at_upper[j]
            else:
                upper = False
            if to_lower:
                ok = (a < -PIVOT_TOL and not upper) or (a > PIVOT_TOL and upper)
            else:
                ok = (a > PIVOT_TOL and not upper) or (a < -PIVOT_TOL and upper)
            if not ok:
                continue
            if bland:
                ratio = abs(d[j]) / abs(a)
            else:
                ratio = (abs(d[j]) + DUAL_TOL) / abs(a)
            if ratio < theta_max:
                theta_max = ratio
        if theta_max == np.inf:
            return _INFEASIBLE, x, z, it, Binv
        q = -1
        best_a = 0.0
        for j in range(n + m):
            if is_basic[j]:
                continue
            a = alpha[j]
            if j < n:
                if hi[j] <= lo[j]:
                    continue
                upper = at_upper[j]
            else:
                upper = False
            if to_lower:
                ok = (a < -PIVOT_TOL and not upper) or (a > PIVOT_TOL and upper)
            else:
                ok = (a > PIVOT_TOL and not upper) or (a < -PIVOT_TOL and upper)
            if not ok:
                continue
            ratio = abs(d[j]) / abs(a)
            if bland:
                if ratio <= theta_max + 1e-12:
                    q = j
                    break
            elif ratio <= theta_max and abs(a) > best_a:
                best_a = abs(a)
                q = j
        if q < 0:
            return _NUMERIC, x, z, it, Binv

        # pivot column w = B^-1 a_q
        if q < n:
            for i in range(m):
                col[i] = A[i, q]
            for t in range(m):
                acc = 0.0
                for i in range(m):
                    acc += Binv[t, i] * col[i]
                w[t] = acc
        else:
            for t in range(m):
                w[t] = Binv[t, q - n]
        if abs(w[r] - alpha[q]) > 1e-7 * (1.0 + abs(w[r])):
            if since_refactor == 0:
                return _NUMERIC, x, z, it, Binv
            Binv, ok = _refactor(A, basic, n)
            if not ok:
                return _NUMERIC, x, z, it, Binv
            d = _reduced_costs(A, c, basic, Binv, n)
            x = _primal_values(A, b, lo, hi, basic, is_basic, at_upper, Binv, n)
            since_refactor = 0
            continue

        theta_d = d[q] / alpha[q]
        if abs(theta_d) <= 1e-12:
            degenerate += 1
            if degenerate > 10 * (m + n):
                bland = True
        else:
            degenerate = 0
        for j in range(n + m):
            if not is_basic[j]:
                d[j] -= theta_d * alpha[j]
        d[q] = 0.0
        d[leave] = -theta_d

        # primal step: entering moves until the leaving variable hits target
        theta_p = (x[leave] - target) / w[r]
        for t in range(m):
            x[basic[t]] -= theta_p * w[t]
        x[q] += theta_p
        x[leave] = target

        is_basic[q] = True
        is_basic[leave] = False
        basic[r] = q
        if leave < n:
            at_upper[leave] = not to_lower

        # product-form update of B^-1
        wr = w[r]
        for i in range(m):
            Binv[r, i] /= wr
        for t in range(m):
            if t != r and w[t] != 0.0:
                f = w[t]
                for i in range(m):
                    Binv[t, i] -= f * Binv[r, i]

        since_refactor += 1
        # refactoring costs O(m^3), so amortize it over at least m pivots
        if since_refactor >= max(REFACTOR_EVERY, m):
            Binv, ok = _refactor(A, basic, n)
            if not ok:
                return _NUMERIC, x, z, it, Binv
            d = _reduced_costs(A, c, basic, Binv, n)
            for j in range(n):
                if not is_basic[j] and hi[j] > lo[j]:
                    if d[j] < -DUAL_TOL and not at_upper[j]:
                        at_upper[j] = True
                    elif d[j] > DUAL_TOL and at_upper[j]:
                        at_upper[j] = False
            x = _primal_values(A, b, lo, hi, basic, is_basic, at_upper, Binv, n)
            since_refactor = 0


class CutLP:
    """LP over the box ``[0,1]^n`` with variable fixings and parity cuts.

    The simplex basis persists between calls, so re-solving after
    :meth:`add_cuts` or after changing fixings is a warm start.
    """

    def __init__(self, objective, purge_threshold: int = 100):
        c = np.asarray(objective, dtype=float)
        if c.ndim != 1 or not np.isfinite(c).all():
            raise ValueError("objective must be a finite vector")
        if purge_threshold < 1:
            raise ValueError("purge threshold must be positive")
        self.n = c.shape[0]
        self.c = c.copy()
        self.purge_threshold = purge_threshold
        self.lo = np.zeros(self.n)
        self.hi = np.ones(self.n)
        self.fixings: dict[int, int] = {}
        self.cuts: list[CutInequality] = []
        self._keys: set[tuple] = set()
        self._A = np.zeros((16, self.n))
        self._b = np.zeros(16)
        self._reset_basis()
        self.solves = 0

    # -- structure -------------------------------------------------------

    @property
    def num_cuts(self) -> int:
        return len(self.cuts)

    def _reset_basis(self):
        m = len(self.cuts)
        self._basic = np.arange(self.n, self.n + m, dtype=np.int64)
        self._at_upper = self.c < 0
        self._Binv = np.eye(m)
        self._basis_ok = True

    def set_fixings(self, fixings) -> None:
        """Pin variables to 0/1; variables not listed return to ``[0, 1]``."""
        for pos, val in fixings.items():
            if not 0 <= pos < self.n or val not in (0, 1):
                raise ValueError(f"bad fixing {pos} -> {val}")
        self.fixings = dict(fixings)
        self.lo[:] = 0.0
        self.hi[:] = 1.0
        for pos, val in self.fixings.items():
            self.lo[pos] = self.hi[pos] = float(val)

    def add_cuts(self, cuts) -> int:
        """Append cuts (duplicates are skipped).  Returns the number added."""
        fresh = []
        for cut in cuts:
            key = (cut.neighborhood, cut.odd_subset)
            if key not in self._keys:
                self._keys.add(key)
                fresh.append(cut)
        if not fresh:
            return 0
        m0, t = len(self.cuts), len(fresh)
        if m0 + t > self._A.shape[0]:
            cap = max(2 * self._A.shape[0], m0 + t)
            A = np.zeros((cap, self.n))
            A[:m0] = self._A[:m0]
            b = np.zeros(cap)
            b[:m0] = self._b[:m0]
            self._A, self._b = A, b
        for i, cut in enumerate(fresh):
            self._A[m0 + i] = cut.coefficients(self.n)
            self._b[m0 + i] = cut.rhs
        self.cuts.extend(fresh)
        if self._basis_ok:
            # new slacks enter the basis: B' = [[B, 0], [N, I]]
            new_rows = self._A[m0 : m0 + t]
            basic = self._basic
            N = np.zeros((t, m0))
            xcols = basic < self.n
            N[:, xcols] = new_rows[:, basic[xcols]]
            Binv = np.zeros((m0 + t, m0 + t))
            Binv[:m0, :m0] = self._Binv
            Binv[m0:, :m0] = -N @ self._Binv
            Binv[m0:, m0:] = np.eye(t)
            self._Binv = Binv
            self._basic = np.concatenate([basic, np.arange(self.n + m0, self.n + m0 + t)])
        return t

    def purge_inactive(self, solution: LpSolution) -> bool:
        """Drop cuts inactive at ``solution`` once there are more than T of them.

        Returns True if anything was removed.  An inactive cut has its slack in
        the basis, so deleting the row together with that slack leaves a valid
        basis whose inverse is a submatrix of the old one: the next solve stays
        warm.
        """
        if len(self.cuts) <= self.purge_threshold:
            return False
        m = len(self.cuts)
        keep = sorted(solution.active_cuts)
        if len(keep) == m:
            return False
        drop = np.ones(m, dtype=bool)
        drop[keep] = False
        self.cuts = [self.cuts[i] for i in keep]
        self._keys = {(c.neighborhood, c.odd_subset) for c in self.cuts}
        A = np.zeros((max(16, 2 * len(keep)), self.n))
        b = np.zeros(A.shape[0])
        A[: len(keep)] = self._A[keep]
        b[: len(keep)] = self._b[keep]
        self._A, self._b = A, b
        basic = self._basic
        pos = np.flatnonzero(basic >= self.n)
        gone_pos = pos[drop[basic[pos] - self.n]]
        if self._basis_ok and len(gone_pos) == int(drop.sum()):
            rows = np.setdiff1d(np.arange(m), gone_pos)
            self._Binv = np.ascontiguousarray(self._Binv[np.ix_(rows, keep)])
            kept = basic[rows]
            slack = kept >= self.n
            renumber = np.cumsum(~drop) - 1
            kept[slack] = self.n + renumber[kept[slack] - self.n]
            self._basic = kept.astype(np.int64)
        else:
            self._reset_basis()
        return True

    def basis(self) -> Basis:
        return Basis(self._basic.copy(), self._at_upper.copy(), len(self.cuts))

    # -- solving ---------------------------------------------------------

    def solve(self, bound: float | None = None, warm=True) -> LpSolution:
        """Optimize the current LP.

        ``warm`` is True (reuse the internal basis), False (cold start from
        the slack basis) or a :class:`Basis` token from an earlier solve on
        the same rows.  With ``bound``, the solve stops early as soon as the
        dual objective reaches it; the reported value is then a certified
        lower bound that is at least ``bound``.
        """
        self.solves += 1
        refactor = False
        if isinstance(warm, Basis):
            if warm.n_rows != len(self.cuts):
                raise ValueError("basis token does not match the current rows")
            self._basic = warm.basic.copy()
            self._at_upper = warm.at_upper.copy()
            refactor = True
        elif not warm or not self._basis_ok:
            self._reset_basis()
        try:
            return self._run(bound, refactor)
        except LpNumericalError:
            if refactor or warm is not False:
                self._reset_basis()
                return self._run(bound, False)
            raise

    def _run(self, bound, refactor) -> LpSolution:
        m = len(self.cuts)
        A = self._A[:m]
        b = self._b[:m]
        bnd = np.inf if bound is None else float(bound)
        max_iter = 50 * (m + self.n) + 1000
        status, x, z, iters, Binv = _dual_simplex(
            A, b, self.c, self.lo, self.hi, self._basic, self._at_upper, self._Binv, refactor, bnd, max_iter
        )
        self._Binv = Binv
        if status == _NUMERIC:
            self._basis_ok = False
            raise LpNumericalError("dual simplex failed to converge")
        if status == _DUAL_INFEASIBLE:
            self._basis_ok = False
            raise LpNumericalError("warm basis is not dual feasible")
        self._basis_ok = True
        point = np.clip(x[: self.n], self.lo, self.hi)
        if status == _INFEASIBLE:
            return LpSolution(point, np.inf, LpStatus.INFEASIBLE, [], self.basis(), iters)
        if status == _BOUND:
            return LpSolution(point, float(z), LpStatus.BOUND_EXCEEDED, [], self.basis(), iters)
        value = float(self.c @ point)
        slacks = x[self.n :]
        active = [i for i in range(m) if slacks[i] <= ACTIVE_TOL]
        return LpSolution(point, value, LpStatus.OPTIMAL, active, self.basis(), iters)
