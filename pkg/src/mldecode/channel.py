"""BPSK over AWGN: noise variance, LLR generation and the ML objective."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def noise_variance(ebn0_db: float, rate: float) -> float:
    """sigma^2 for unit-energy BPSK at the given Eb/N0 (dB) and code rate."""
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float
    seed: int = 0
    noise_var: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"code rate must lie in (0, 1], got {self.rate}")
        object.__setattr__(self, "noise_var", noise_variance(self.ebn0_db, self.rate))


def objective(llr, x) -> float:
    """psi_lambda(x) = sum_i llr_i * x_i."""
    llr = np.asarray(llr, dtype=float)
    x = np.asarray(x, dtype=float)
    if llr.shape != x.shape:
        raise ValueError(f"length mismatch: {llr.shape} vs {x.shape}")
    return float(llr @ x)


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Independent stream per (seed, frame) so results do not depend on scheduling."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(frame)])


def transmit(codeword, cfg: ChannelConfig, frame: int) -> np.ndarray:
    """LLRs of ``codeword`` after BPSK (0 -> +1) and additive Gaussian noise.

    A positive LLR favours bit 0: ``llr = 2 r / sigma^2``.
    """
    c = np.asarray(codeword)
    rng = frame_rng(cfg.seed, frame)
    sigma2 = cfg.noise_var
    r = (1.0 - 2.0 * c) + rng.standard_normal(c.shape[0]) * np.sqrt(sigma2)
    return 2.0 * r / sigma2
