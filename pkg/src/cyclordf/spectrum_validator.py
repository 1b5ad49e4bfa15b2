"""Monte Carlo checks of the information-spectrum quantities behind the solver.

Verifies, by direct simulation from the optimal test channel, that the
information density has the computed rate as its mean, that its variance is
below 3/l (in squared bits), that the Chebyshev concentration bound holds,
and that the per-sample energy of the source satisfies the uniform
integrability moment bounds (first moment <= beta, second moment <= 3*beta^2).

Every operation draws from its own named random stream derived from
(seed, operation tag), so sweeps reproduce exactly regardless of execution
order.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BetaViolation, DegenerateCovariance, SingularCovariance
from .rdf_solver import RdfResult
from .sampling import PSD_TOL, CovarianceMatrix

#: raw statistics are always produced; bound-compliance flags need this many draws
MIN_DRAWS_FOR_BOUNDS = 1000

#: one-sided slack on Monte Carlo bound checks, in standard errors
MEAN_SLACK_SE = 4.0
EXCEEDANCE_SLACK_SE = 3.0


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run parameters."""

    n_draws: int
    seed: int
    blocklength_l: int

    def __post_init__(self):
        if self.n_draws < 1:
            raise ValueError(f"n_draws must be >= 1, got {self.n_draws}")
        if self.blocklength_l < 1:
            raise ValueError(f"blocklength_l must be >= 1, got {self.blocklength_l}")


@dataclass(frozen=True)
class McReport:
    """Statistics of one Monte Carlo check against its theoretical bound.

    `bound_satisfied` is None when there are too few draws for a compliance
    call (raw statistics only).
    """

    empirical_mean: float
    empirical_variance: float
    standard_error: float
    theoretical_target: float
    bound_value: float
    bound_satisfied: bool | None
    n_draws: int
    seed: int


def _stream(seed: int, tag: str) -> np.random.Generator:
    """Deterministic per-operation generator derived from (seed, tag)."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(tag.encode())]))


def sample_gaussian(
    C: CovarianceMatrix, config: McConfig, stream: str = "gaussian-draws"
) -> np.ndarray:
    """Draws from N(0, C), shape (n_draws, order).

    Uses the symmetric eigendecomposition square root of C applied to unit
    normals, so positive-semidefinite (including rank-deficient and zero)
    covariances are handled exactly.  Deterministic given (seed, stream).
    """
    w, v = scipy.linalg.eigh(C.entries)
    max_diag = float(np.max(np.diag(C.entries)))
    if w[0] < -PSD_TOL * max(max_diag, 1e-300):
        raise DegenerateCovariance(
            f"covariance eigenvalue {w[0]:.3e} below tolerance for sampling"
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    z = _stream(config.seed, stream).standard_normal((config.n_draws, C.order))
    return z @ root


def info_density_samples(
    C_X: CovarianceMatrix, rdf: RdfResult, config: McConfig
) -> np.ndarray:
    """Per-draw information density rate between the source and its optimal reconstruction.

    Draws the reconstruction and the noise independently (reconstruction
    covariance C_X - C_S, noise covariance C_S), forms the source as their
    sum, and evaluates, in bits per sample,

        Z = (1/l) * [ rate*l + (log2 e / 2) * (x' C_X^{-1} x - s' C_S^{-1} s) ].

    The expectation of Z is the fixed-block rate.
    """
    C_S = rdf.noise_covariance
    l = C_X.order
    recon_cov = CovarianceMatrix.from_dense(C_X.entries - C_S.entries)
    xhat = sample_gaussian(recon_cov, config, stream="info-density-reconstruction")
    noise = sample_gaussian(C_S, config, stream="info-density-noise")
    x = xhat + noise

    try:
        cx = scipy.linalg.cho_factor(C_X.entries)
        cs = scipy.linalg.cho_factor(C_S.entries)
    except scipy.linalg.LinAlgError as err:
        raise SingularCovariance(f"Cholesky factorization failed: {err}") from err
    qx = np.einsum("ij,ij->i", x, scipy.linalg.cho_solve(cx, x.T).T)
    qs = np.einsum("ij,ij->i", noise, scipy.linalg.cho_solve(cs, noise.T).T)

    log_det_ratio = 2.0 * l * rdf.rate  # sum log2(lambda_i / mu_i)
    return (0.5 * log_det_ratio + 0.5 * np.log2(np.e) * (qx - qs)) / l


def check_info_density_stats(samples, rdf: RdfResult, config: McConfig) -> McReport:
    """Compare the information density's mean and variance with their targets.

    The mean must match the computed rate to within 4 standard errors; the
    variance (in squared bits) must be below 3/l.  Both must hold for the
    report to be flagged compliant.
    """
    z = np.asarray(samples, dtype=float)
    n = z.size
    l = config.blocklength_l
    mean = float(z.mean())
    var = float(z.var(ddof=1)) if n > 1 else 0.0
    se = float(np.sqrt(var / n))
    bound = 3.0 / l
    ok = None
    if n >= MIN_DRAWS_FOR_BOUNDS:
        ok = bool(abs(mean - rdf.rate) <= MEAN_SLACK_SE * se and var < bound)
    return McReport(
        empirical_mean=mean,
        empirical_variance=var,
        standard_error=se,
        theoretical_target=rdf.rate,
        bound_value=bound,
        bound_satisfied=ok,
        n_draws=n,
        seed=config.seed,
    )


def chebyshev_concentration(samples, rdf: RdfResult, config: McConfig) -> McReport:
    """Empirical exceedance of |Z - rate| >= l^(-1/3) against the bound 3*l^(-1/3).

    Flagged compliant when the exceedance frequency plus 3 binomial standard
    errors stays below the bound (vacuously true when the bound exceeds 1).
    """
    z = np.asarray(samples, dtype=float)
    n = z.size
    l = config.blocklength_l
    threshold = l ** (-1.0 / 3.0)
    freq = float(np.mean(np.abs(z - rdf.rate) >= threshold))
    se = float(np.sqrt(freq * (1.0 - freq) / n))
    bound = 3.0 * threshold
    ok = None
    if n >= MIN_DRAWS_FOR_BOUNDS:
        ok = bool(freq + EXCEEDANCE_SLACK_SE * se < bound)
    return McReport(
        empirical_mean=freq,
        empirical_variance=freq * (1.0 - freq),
        standard_error=se,
        theoretical_target=threshold,
        bound_value=bound,
        bound_satisfied=ok,
        n_draws=n,
        seed=config.seed,
    )


def uniform_integrability_stats(
    C_X: CovarianceMatrix, beta: float, config: McConfig
) -> McReport:
    """Moment checks for the per-sample energy W = |x|^2 / l under N(0, C_X).

    Requires every diagonal entry of C_X to be at most beta.  Checks that
    the empirical mean of W agrees with the exact value trace/l (and stays
    below beta), and that the empirical second moment respects 3*beta^2,
    all with 4-standard-error slack.
    """
    diag = np.diag(C_X.entries)
    if np.any(diag > beta):
        raise BetaViolation(
            f"diagonal entry {diag.max():.6g} exceeds the variance bound beta={beta:.6g}"
        )
    x = sample_gaussian(C_X, config, stream="uniform-integrability")
    l = C_X.order
    w = np.einsum("ij,ij->i", x, x) / l
    n = w.size
    mean = float(w.mean())
    var = float(w.var(ddof=1)) if n > 1 else 0.0
    se = float(np.sqrt(var / n))
    target = float(np.trace(C_X.entries)) / l
    w2 = w * w
    second = float(w2.mean())
    se2 = float(np.sqrt(w2.var(ddof=1) / n)) if n > 1 else 0.0
    bound = 3.0 * beta * beta
    ok = None
    if n >= MIN_DRAWS_FOR_BOUNDS:
        ok = bool(
            abs(mean - target) <= MEAN_SLACK_SE * se
            and mean <= beta + MEAN_SLACK_SE * se
            and second <= bound + MEAN_SLACK_SE * se2
        )
    return McReport(
        empirical_mean=mean,
        empirical_variance=var,
        standard_error=se,
        theoretical_target=target,
        bound_value=bound,
        bound_satisfied=ok,
        n_draws=n,
        seed=config.seed,
    )
