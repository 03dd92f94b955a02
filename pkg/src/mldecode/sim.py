"""Monte-Carlo frame-error simulation and minimum-distance runs."""

from __future__ import annotations

import csv
import io
import json
import multiprocessing as mp
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .bnb import BnbParams, MinDistanceResult, NumericalFailure, min_distance, ml_decode
from .channel import ChannelConfig, transmit
from .code import LinearCode

CSV_FIELDS = ("snr_db", "frames", "errors", "fer", "t_avg_s", "n_avg", "lp_avg")


@dataclass(frozen=True)
class SimConfig:
    snr_db: tuple[float, ...]
    target_errors: int = 100
    max_frames: int = 1_000_000
    seed: int = 0
    all_zero: bool = False
    params: BnbParams = field(default_factory=BnbParams)
    workers: int = 1
    batch: int = 64

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        if not self.snr_db:
            raise ValueError("need at least one SNR point")
        if self.target_errors < 1:
            raise ValueError("target_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1 or self.batch < 1:
            raise ValueError("workers and batch must be >= 1")


@dataclass
class FrameResult:
    frame: int
    error: bool
    nodes: int
    lp_solves: int
    seconds: float
    failed: bool = False


@dataclass
class SimPointResult:
    snr_db: float
    frames: int
    errors: int
    fer: float
    t_avg_s: float
    n_avg: float
    lp_avg: float
    numerical_failures: int = 0


def random_codeword(code: LinearCode, seed: int, frame: int) -> np.ndarray:
    """Uniform codeword for a frame, drawn from a stream separate from the noise."""
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(frame), 1])
    info = rng.integers(0, 2, code.k, dtype=np.uint8)
    return ((info.astype(np.int64) @ code.G) % 2).astype(np.uint8)


def decode_frame(code: LinearCode, params: BnbParams, ebn0_db: float, seed: int, frame: int, all_zero: bool) -> FrameResult:
    """Transmit and decode one frame.

    In all-zero mode the zero word seeds the incumbent and the search stops at
    the first codeword with negative objective, which already decides the frame
    as an ML error.
    """
    sent = np.zeros(code.n, dtype=np.uint8) if all_zero else random_codeword(code, seed, frame)
    cfg = ChannelConfig(ebn0_db, code.k / code.n, seed)
    llr = transmit(sent, cfg, frame)
    t0 = time.perf_counter()
    try:
        if all_zero:
            out = ml_decode(code, llr, params, early_stop=0.0, incumbent=sent)
        else:
            out = ml_decode(code, llr, params)
    except NumericalFailure:
        return FrameResult(frame, False, 0, 0, time.perf_counter() - t0, failed=True)
    error = out.early_stopped or bool(np.any(out.codeword != sent))
    return FrameResult(frame, error, out.nodes_processed, out.lp_solves, out.wall_time)


_worker_state: dict = {}


def _init_worker(code, params, all_zero):
    _worker_state.update(code=code, params=params, all_zero=all_zero)


def _work(task):
    ebn0_db, seed, frame = task
    s = _worker_state
    return decode_frame(s["code"], s["params"], ebn0_db, seed, frame, s["all_zero"])


def _summarize(ebn0_db: float, results: list[FrameResult]) -> SimPointResult:
    ok = [r for r in results if not r.failed]
    frames = len(ok)
    errors = sum(r.error for r in ok)
    if frames == 0:
        return SimPointResult(ebn0_db, 0, 0, float("nan"), float("nan"), float("nan"), float("nan"), len(results))
    return SimPointResult(
        snr_db=ebn0_db,
        frames=frames,
        errors=errors,
        fer=errors / frames,
        t_avg_s=sum(r.seconds for r in ok) / frames,
        n_avg=sum(r.nodes for r in ok) / frames,
        lp_avg=sum(r.lp_solves for r in ok) / frames,
        numerical_failures=len(results) - frames,
    )


def _run_point(code, cfg: SimConfig, ebn0_db: float, pool, progress) -> SimPointResult:
    kept: list[FrameResult] = []
    errors = 0
    next_frame = 0
    while next_frame < cfg.max_frames:
        stop = min(cfg.max_frames, next_frame + cfg.batch * cfg.workers)
        tasks = [(ebn0_db, cfg.seed, f) for f in range(next_frame, stop)]
        if pool is None:
            batch = []
            for t in tasks:
                r = _work(t)
                batch.append(r)
                if r.error and errors + sum(b.error for b in batch) >= cfg.target_errors:
                    break
        else:
            batch = pool.map(_work, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers)))
        # scan in frame order and cut at the error that reaches the target
        for r in sorted(batch, key=lambda r: r.frame):
            kept.append(r)
            errors += r.error
            if errors >= cfg.target_errors:
                break
        next_frame = stop
        if progress is not None:
            progress(_summarize(ebn0_db, kept))
        if errors >= cfg.target_errors:
            break
    return _summarize(ebn0_db, kept)


def simulate(code: LinearCode, cfg: SimConfig, progress=None) -> list[SimPointResult]:
    """FER, mean time, nodes and LP solves per SNR point.

    Frames are numbered from 0 at each point and every frame draws from its own
    random stream, so the counts do not depend on ``workers``.
    """
    _init_worker(code, cfg.params, cfg.all_zero)
    if cfg.workers == 1:
        return [_run_point(code, cfg, s, None, progress) for s in cfg.snr_db]
    ctx = mp.get_context("fork")
    with ctx.Pool(cfg.workers, initializer=_init_worker, initargs=(code, cfg.params, cfg.all_zero)) as pool:
        return [_run_point(code, cfg, s, pool, progress) for s in cfg.snr_db]


def results_csv(results: list[SimPointResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in results:
        w.writerow([repr(getattr(r, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def results_json(results: list[SimPointResult]) -> str:
    return json.dumps([asdict(r) for r in results], indent=2)


@dataclass
class MinDistanceReport:
    code: str
    n: int
    k: int
    dmin: int
    witness_weight: int
    witness_is_codeword: bool
    nodes: int
    wall_time_s: float
    witness: list[int]


def run_mindist(code: LinearCode, params: BnbParams | None = None, fix_first_bit: bool = False) -> MinDistanceReport:
    start = time.perf_counter()
    res: MinDistanceResult = min_distance(code, params, fix_first_bit=fix_first_bit)
    w = res.witness.astype(np.uint8)
    return MinDistanceReport(
        code=code.name,
        n=code.n,
        k=code.k,
        dmin=res.dmin,
        witness_weight=int(w.sum()),
        witness_is_codeword=bool(not code.syndrome(w).any()),
        nodes=res.outcome.nodes_processed,
        wall_time_s=time.perf_counter() - start,
        witness=np.flatnonzero(w).tolist(),
    )
