"""Monte Carlo sampling of Laguerre beta-ensembles with linear potential.

The bidiagonal model of Dumitriu and Edelman: with ``p = 1 + beta (n-1)/2``
and ``a > p - 1``,

    B = bidiag(chi_{2a}, chi_{2a - beta}, ..., chi_{2a - beta (n-1)};
               chi_{beta (n-1)}, ..., chi_beta),

the eigenvalues of ``B B^T`` have density proportional to

    prod lambda_i^(a - p) exp(-lambda_i / 2) |Delta(lambda)|^beta.

``x = lambda / (2 rate)`` then has weight ``x^a_param exp(-rate x)`` with
``a_param = a - p``.  For the ensembles with ``w_beta = x^gamma e^(-q x)``
(``beta = 1, 2``) or its square (``beta = 4``) use :func:`config_for`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BATCH = 1000


@dataclass(frozen=True)
class SamplerConfig:
    """Sampler parameters; the sampled weight is ``x**a_param * exp(-rate x)``."""

    n: int
    beta: int
    a_param: float
    seed: int
    n_samples: int = 10_000
    rate: float = 1.0

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise ValueError("beta must be 1, 2 or 4")
        if self.n < 1 or self.n_samples < 1:
            raise ValueError("n and n_samples must be positive")
        if not self.a_param > -1:
            raise ValueError("a_param must exceed -1")
        if not self.rate > 0:
            raise ValueError("rate must be positive")


def config_for(gamma: float, q: float, beta: int, n: int, seed: int,
               n_samples: int = 10_000) -> SamplerConfig:
    """Sampler for ``w_beta = x^gamma e^(-q x)`` (squared for ``beta = 4``)."""
    k = 2 if beta == 4 else 1
    return SamplerConfig(n, beta, k * gamma, seed, n_samples, k * q)


def _draw(rng: np.random.Generator, cfg: SamplerConfig, size: int) -> np.ndarray:
    n, b = cfg.n, cfg.beta
    a = cfg.a_param + 1.0 + 0.5 * b * (n - 1)
    B = np.zeros((size, n, n))
    i = np.arange(n)
    B[:, i, i] = np.sqrt(rng.chisquare(2 * a - b * i, size=(size, n)))
    if n > 1:
        j = np.arange(n - 1)
        B[:, j + 1, j] = np.sqrt(rng.chisquare(b * (n - 1 - j), size=(size, n - 1)))
    s = np.linalg.svd(B, compute_uv=False)
    lam = np.sort(s**2, axis=-1)
    return lam / (2.0 * cfg.rate)


def sample_batches(cfg: SamplerConfig) -> np.ndarray:
    """All ``n_samples`` draws, shape ``(n_samples, n)``, each row sorted.

    Batches use independent child seeds of ``cfg.seed`` so the result does
    not depend on the order in which batches are produced.
    """
    nb = -(-cfg.n_samples // BATCH)
    children = np.random.SeedSequence(cfg.seed).spawn(nb)
    out = []
    for k, ss in enumerate(children):
        size = min(BATCH, cfg.n_samples - k * BATCH)
        out.append(_draw(np.random.Generator(np.random.Philox(ss)), cfg, size))
    return np.concatenate(out)


def sample_eigenvalues(cfg: SamplerConfig) -> np.ndarray:
    """One draw of the ``n`` eigenvalues (sorted)."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed)))
    return _draw(rng, cfg, 1)[0]


def empirical_extreme_cdf(cfg: SamplerConfig, which: str, thresholds, samples=None):
    """Empirical ``P(lambda_min <= t)`` or ``P(lambda_max <= t)`` and binomial standard errors."""
    if which not in ("smallest", "largest"):
        raise ValueError("which must be 'smallest' or 'largest'")
    lam = sample_batches(cfg) if samples is None else samples
    ext = lam[:, 0] if which == "smallest" else lam[:, -1]
    t = np.atleast_1d(np.asarray(thresholds, dtype=float))
    p = (ext[:, None] <= t[None, :]).mean(axis=0)
    se = np.sqrt(p * (1 - p) / len(ext))
    return p, se


def empirical_density(cfg: SamplerConfig, edges, samples=None) -> np.ndarray:
    """Mean eigenvalue count per unit length in the bins ``edges``."""
    lam = sample_batches(cfg) if samples is None else samples
    counts, _ = np.histogram(lam.ravel(), bins=edges)
    return counts / (len(lam) * np.diff(edges))
