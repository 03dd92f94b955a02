"""Command-line entry point: ``decode``, ``simulate`` and ``mindist``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .alist import read_alist
from .bnb import BnbParams, NumericalFailure, ml_decode
from .code import LinearCode, bch_127_85, hamming, tanner_155_64
from .cuts import ZsParams
from .sim import SimConfig, results_csv, results_json, run_mindist, simulate
from .sp_osd import SpConfig

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

BUILTINS = {
    "tanner155": tanner_155_64,
    "bch127": bch_127_85,
    "hamming7": lambda: hamming(3),
    "hamming15": lambda: hamming(4),
}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_code(spec: str) -> LinearCode:
    """``builtin:NAME`` or a path to an alist file."""
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in BUILTINS:
            raise InputError(f"unknown builtin code {name!r}; choose from {', '.join(sorted(BUILTINS))}")
        return BUILTINS[name]()
    try:
        return read_alist(spec)
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise InputError(f"{spec}: {exc}") from None


def read_llr(path: str, n: int) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        llr = np.array([float(t) for t in text.split()])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if llr.shape != (n,):
        raise InputError(f"{path}: expected {n} LLR values, found {llr.size}")
    if not np.isfinite(llr).all():
        raise InputError(f"{path}: LLR values must be finite")
    return llr


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("decoder parameters")
    g.add_argument("--M", type=int, help="best-bound period")
    g.add_argument("--delta", type=float, help="best-bound margin below the incumbent")
    g.add_argument("--T", type=int, help="cut count above which inactive cuts are purged")
    g.add_argument("--R", type=int, help="redundant-cut rounds per LP decode")
    g.add_argument("--Rbb", type=int, help="redundant-cut rounds at best-bound nodes")
    g.add_argument("--gamma", type=float, help="minimum cutoff of an added cut")
    g.add_argument("--cutoff-metric", choices=("violation", "distance"), help="how the cutoff is measured")
    g.add_argument("--order", type=int, help="re-encoding order")
    g.add_argument("--sp-iters", type=int, help="sum-product iterations")


def decoder_params(args, base: BnbParams) -> BnbParams:
    zs, sp = base.zs, base.sp
    zs_kw = {
        k: v
        for k, v in dict(
            purge_threshold=args.T,
            max_rounds=args.R,
            max_rounds_best_bound=args.Rbb,
            cutoff=args.gamma,
            cutoff_metric=args.cutoff_metric,
        ).items()
        if v is not None
    }
    if "max_rounds" in zs_kw and "max_rounds_best_bound" not in zs_kw:
        zs_kw["max_rounds_best_bound"] = max(zs.max_rounds_best_bound, zs_kw["max_rounds"])
    sp_kw = {k: v for k, v in dict(reencode_order=args.order, max_iterations=args.sp_iters).items() if v is not None}
    top = {k: v for k, v in dict(best_bound_period=args.M, best_bound_margin=args.delta).items() if v is not None}
    return replace(base, zs=replace(zs, **zs_kw), sp=replace(sp, **sp_kw), **top)


def _snr_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty SNR list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mldecode", description="Exact ML decoding and minimum distance of binary linear codes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decode", help="ML-decode one LLR vector")
    d.add_argument("--code", required=True, help="alist file or builtin:NAME")
    d.add_argument("--llr", required=True, help="file with n whitespace-separated LLRs")
    _add_decoder_flags(d)

    s = sub.add_parser("simulate", help="Monte-Carlo frame error rate")
    s.add_argument("--code", required=True)
    s.add_argument("--snr", required=True, type=_snr_list, help="comma-separated Eb/N0 values in dB")
    s.add_argument("--errors", type=int, default=100, help="frame errors per point")
    s.add_argument("--max-frames", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0, help="master seed (MLD_SEED overrides)")
    s.add_argument("--all-zero", action="store_true", help="send the zero codeword and stop at the first better one")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="CSV output file (default: stdout)")
    s.add_argument("--json", help="also write the results as JSON here")
    s.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    _add_decoder_flags(s)

    m = sub.add_parser("mindist", help="minimum distance")
    m.add_argument("--code", required=True)
    m.add_argument("--fix-first-bit", action="store_true", help="fix position 0 to 1 (transitive automorphism group)")
    _add_decoder_flags(m)
    return p


def _cmd_decode(args) -> int:
    code = load_code(args.code)
    llr = read_llr(args.llr, code.n)
    out = ml_decode(code, llr, decoder_params(args, BnbParams()))
    print(
        json.dumps(
            {
                "codeword": "".join(map(str, out.codeword.tolist())),
                "objective": out.objective,
                "nodes": out.nodes_processed,
                "lp_solves": out.lp_solves,
                "certified": out.certified,
                "wall_time_s": out.wall_time,
            },
            indent=2,
        )
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    code = load_code(args.code)
    seed = args.seed
    env = os.environ.get("MLD_SEED")
    if env is not None:
        try:
            seed = int(env, 0)
        except ValueError:
            raise InputError(f"MLD_SEED is not an integer: {env!r}") from None
    cfg = SimConfig(
        snr_db=tuple(args.snr),
        target_errors=args.errors,
        max_frames=args.max_frames,
        seed=seed,
        all_zero=args.all_zero,
        params=decoder_params(args, BnbParams()),
        workers=args.workers,
    )

    def progress(r):
        if not args.quiet:
            print(
                f"snr={r.snr_db:g} frames={r.frames} errors={r.errors} n_avg={r.n_avg:.3g} t_avg={r.t_avg_s:.3g}s",
                file=sys.stderr,
            )

    results = simulate(code, cfg, progress)
    for r in results:
        if r.numerical_failures:
            print(f"snr={r.snr_db:g}: {r.numerical_failures} frame(s) hit a numerical failure", file=sys.stderr)
    text = results_csv(results)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(results_json(results) + "\n")
    return EXIT_NUMERIC if any(r.numerical_failures for r in results) else EXIT_OK


def _cmd_mindist(args) -> int:
    code = load_code(args.code)
    if code.k < 1:
        raise InputError("the code contains only the zero word")
    report = run_mindist(code, decoder_params(args, BnbParams.for_min_distance()), args.fix_first_bit)
    print(json.dumps(asdict(report), indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"decode": _cmd_decode, "simulate": _cmd_simulate, "mindist": _cmd_mindist}[args.command]
    try:
        return handler(args)
    except InputError as exc:
        print(f"mldecode: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"mldecode: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # parameter validation in the dataclasses
        print(f"mldecode: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
