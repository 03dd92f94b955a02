"""Exact maximum-likelihood decoding and minimum-distance computation for binary linear codes.

Branch-and-bound over partial assignments, with adaptive LP lower bounds
(parity-inequality cuts plus redundant-check cuts) and sum-product plus
order-i re-encoding upper bounds.
"""

from .alist import AlistError, emit_alist, parse_alist, read_alist
from .bnb import BnbParams, DecodeOutcome, MinDistanceResult, NumericalFailure, min_distance, ml_decode
from .channel import ChannelConfig, noise_variance, objective, transmit
from .code import LinearCode, bch_127_85, hamming, is_codeword, is_valid, tanner_155_64
from .cuts import ZsParams, zs_decode
from .gf2 import BitMatrix, rank, rref
from .sim import SimConfig, SimPointResult, run_mindist, simulate
from .sp_osd import SpConfig, lubd, osd_reencode, sp_decode

__all__ = [
    "AlistError", "BitMatrix", "BnbParams", "ChannelConfig", "DecodeOutcome", "LinearCode",
    "MinDistanceResult", "NumericalFailure", "SimConfig", "SimPointResult", "SpConfig", "ZsParams",
    "bch_127_85", "emit_alist", "hamming", "is_codeword", "is_valid", "lubd", "min_distance",
    "ml_decode", "noise_variance", "objective", "osd_reencode", "parse_alist", "rank", "read_alist",
    "rref", "run_mindist", "simulate", "sp_decode", "tanner_155_64", "transmit", "zs_decode",
]
