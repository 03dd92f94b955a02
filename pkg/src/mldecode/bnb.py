"""Branch-and-bound maximum-likelihood decoding and minimum-distance search."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .code import ConstraintSet, LinearCode, check_constraints, is_valid
from .cuts import ZsParams, ZsResult
from .lp import CutLP, LpNumericalError, LpStatus
from .sp_osd import Candidate, SpConfig, lubd

NEG_INF = -np.inf
# slack on "bound < tau" tests; LP values carry round-off of order 1e-12
ML_TOL = 1e-9
MINDIST_EPS = 1e-5


@dataclass(frozen=True)
class BnbParams:
    best_bound_period: int = 30
    best_bound_margin: float = 2.0
    zs: ZsParams = field(default_factory=ZsParams)
    sp: SpConfig = field(default_factory=SpConfig)
    # seed a child's lower bound with its parent's (sound, off by default)
    inherit_bounds: bool = False
    # one LP (and cut pool) per decode instead of one per node
    reuse_lp: bool = True

    def __post_init__(self):
        if self.best_bound_period < 1:
            raise ValueError("best_bound_period must be >= 1")
        if self.best_bound_margin < 0:
            raise ValueError("best_bound_margin must be >= 0")

    @classmethod
    def for_min_distance(cls, **overrides) -> BnbParams:
        base = dict(
            best_bound_period=120,
            zs=ZsParams(max_rounds=1, max_rounds_best_bound=1, cutoff=0.3),
        )
        base.update(overrides)
        return cls(**base)


class NumericalFailure(RuntimeError):
    """The LP relaxation broke down even after a cold restart."""


class Node:
    """Search-tree node for one constraint set."""

    __slots__ = ("fixed", "parent", "child_bit", "bound", "child_bounds", "depth")

    def __init__(self, fixed: dict[int, int], parent: Node | None = None, child_bit: int | None = None):
        self.fixed = fixed
        self.parent = parent
        self.child_bit = child_bit
        self.bound = NEG_INF
        self.child_bounds = [NEG_INF, NEG_INF]
        self.depth = 0 if parent is None else parent.depth + 1

    def child(self, pos: int, bit: int) -> Node:
        fixed = dict(self.fixed)
        fixed[pos] = bit
        return Node(fixed, self, bit)

    def __repr__(self) -> str:
        return f"Node(depth={self.depth}, bound={self.bound:.4g})"


@dataclass
class DecodeOutcome:
    codeword: np.ndarray
    objective: float
    nodes_processed: int
    lp_solves: int
    wall_time: float
    certified: bool
    early_stopped: bool = False


def select_node(
    open_nodes: list[Node], iteration: int, previous_bound: float, tau: float, params: BnbParams
) -> tuple[Node, bool]:
    """Depth-first, except every M-th iteration switch to best-bound.

    The switch only happens if the previously processed node's bound was more
    than delta below the incumbent.  Best-bound ties go to the most recently
    added node.  Returns the node (removed from the list) and whether it was a
    best-bound pick.
    """
    if iteration % params.best_bound_period == 0 and previous_bound < tau - params.best_bound_margin:
        best = len(open_nodes) - 1
        for i in range(len(open_nodes) - 2, -1, -1):
            if open_nodes[i].bound < open_nodes[best].bound:
                best = i
        return open_nodes.pop(best), True
    return open_nodes.pop(), False


def branch_position(fixed: ConstraintSet, point, require_fractional: bool = True, tol: float = 1e-5) -> int:
    """Unconstrained position whose value is closest to 1/2 (ties: smallest index)."""
    dist = np.abs(np.asarray(point, dtype=float) - 0.5)
    if fixed:
        dist[list(fixed)] = np.inf
    pos = int(np.argmin(dist))
    if dist[pos] == np.inf:
        raise ValueError("every position is already constrained")
    if require_fractional and dist[pos] >= 0.5 - tol:
        raise ValueError("point has no fractional unconstrained coordinate")
    return pos


def propagate(node: Node) -> None:
    """Push a processed node's bound into its ancestors while they improve."""
    while node.parent is not None:
        par = node.parent
        i = node.child_bit
        if node.bound > par.child_bounds[i]:
            par.child_bounds[i] = node.bound
        lifted = min(par.child_bounds)
        if lifted > par.bound:
            par.bound = lifted
            node = par
        else:
            break


class _Search:
    """State of one branch-and-bound run."""

    def __init__(self, code: LinearCode, llr: np.ndarray, params: BnbParams, min_distance: bool):
        self.code = code
        self.llr = llr
        self.params = params
        self.min_distance = min_distance
        self.tau = np.inf
        self.incumbent: np.ndarray | None = None
        self.lp = CutLP(llr, params.zs.purge_threshold) if params.reuse_lp else None
        self.lp_solves = 0

    def threshold(self, tau: float) -> float:
        if self.min_distance:
            return tau - 1.0 + MINDIST_EPS
        return tau - ML_TOL * (1.0 + abs(tau)) if np.isfinite(tau) else tau

    def offer(self, word: np.ndarray) -> None:
        value = float(self.llr @ word)
        if value < self.tau:
            self.tau = value
            self.incumbent = word.astype(np.uint8)

    def bound_node(self, node: Node, best_bound: bool) -> tuple[Candidate | None, ZsResult]:
        for attempt in range(2):
            lp = self.lp if self.params.reuse_lp else None
            try:
                cand, zs = lubd(
                    self.code, self.llr, node.fixed, self.params.sp, self.params.zs,
                    tau=self.tau, best_bound=best_bound, lp=lp,
                    exclude_zero=self.min_distance, threshold=self.threshold,
                )
            except LpNumericalError:
                zs = None
            if zs is not None:
                self.lp_solves += zs.lp_solves
                # a valid node always has an LP-feasible point
                if zs.status is not LpStatus.INFEASIBLE:
                    return cand, zs
            if self.lp is not None:
                self.lp = CutLP(self.llr, self.params.zs.purge_threshold)
        raise NumericalFailure(f"LP relaxation failed at a node of depth {node.depth}")

    def run(
        self, root_fixed: ConstraintSet, early_stop: float | None, on_iteration=None, incumbent=None
    ) -> DecodeOutcome:
        start = time.perf_counter()
        params = self.params
        if incumbent is not None:
            self.offer(np.asarray(incumbent))
        root = Node(dict(root_fixed))
        open_nodes = [root]
        iteration = 0
        previous_bound = NEG_INF
        early = False
        while open_nodes and root.bound < self.threshold(self.tau):
            iteration += 1
            node, best_bound = select_node(open_nodes, iteration, previous_bound, self.tau, params)
            valid = is_valid(self.code, node.fixed, exclude_zero=self.min_distance)
            if valid and node.bound < self.threshold(self.tau):
                cand, zs = self.bound_node(node, best_bound)
                if cand is not None:
                    self.offer(cand.codeword)
                node.bound = max(node.bound, zs.value)
                accept = zs.integral and zs.status is LpStatus.OPTIMAL
                if accept and self.min_distance and not np.round(zs.point).any():
                    accept = False
                if accept:
                    self.offer(np.round(zs.point).astype(np.uint8))
                elif zs.status is LpStatus.OPTIMAL and zs.value < self.threshold(self.tau):
                    pos = branch_position(node.fixed, zs.point, require_fractional=not self.min_distance)
                    child0, child1 = node.child(pos, 0), node.child(pos, 1)
                    if params.inherit_bounds:
                        child0.bound = child1.bound = node.bound
                    open_nodes.append(child0)
                    open_nodes.append(child1)
            elif not valid:
                node.bound = np.inf
            propagate(node)
            previous_bound = node.bound
            if on_iteration is not None:
                on_iteration(self, node, open_nodes)
            if early_stop is not None and self.tau < early_stop:
                early = True
                break
        if self.incumbent is None:
            raise RuntimeError("search ended without any codeword")
        return DecodeOutcome(
            codeword=self.incumbent,
            objective=self.tau,
            nodes_processed=iteration,
            lp_solves=self.lp_solves,
            wall_time=time.perf_counter() - start,
            certified=not early,
            early_stopped=early,
        )


def ml_decode(
    code: LinearCode,
    llr,
    params: BnbParams | None = None,
    early_stop: float | None = None,
    on_iteration=None,
    incumbent=None,
) -> DecodeOutcome:
    """Maximum-likelihood codeword for the LLR vector ``llr``.

    With ``early_stop`` the search ends as soon as a codeword with objective
    below it is known; the result is then not certified optimal.  A known
    codeword passed as ``incumbent`` seeds the upper bound (the transmitted
    word in all-zero simulation, for instance).
    """
    params = params or BnbParams()
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {llr.shape}")
    if not np.isfinite(llr).all():
        raise ValueError("LLRs must be finite")
    if incumbent is not None:
        incumbent = np.asarray(incumbent, dtype=np.uint8)
        if incumbent.shape != (code.n,) or code.syndrome(incumbent).any():
            raise ValueError("incumbent must be a codeword")
    return _Search(code, llr, params, min_distance=False).run({}, early_stop, on_iteration, incumbent)


@dataclass
class MinDistanceResult:
    dmin: int
    witness: np.ndarray
    outcome: DecodeOutcome = field(repr=False)


def min_distance(
    code: LinearCode,
    params: BnbParams | None = None,
    fix_first_bit: bool = False,
    on_iteration=None,
) -> MinDistanceResult:
    """Minimum Hamming weight of a nonzero codeword.

    ``fix_first_bit`` commits position 0 to 1 before searching, which is only
    correct for codes whose automorphism group is transitive.
    """
    if code.k < 1:
        raise ValueError("the code {0} has no minimum distance")
    params = params or BnbParams.for_min_distance()
    root = {0: 1} if fix_first_bit else {}
    check_constraints(code, root)
    search = _Search(code, np.ones(code.n), params, min_distance=True)
    outcome = search.run(root, None, on_iteration)
    return MinDistanceResult(int(round(outcome.objective)), outcome.codeword, outcome)
