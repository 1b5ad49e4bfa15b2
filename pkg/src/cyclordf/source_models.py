"""Continuous-time cyclostationary Gaussian source models.

A model is the separable modulation of a stationary process: the
autocorrelation is c(t, lam) = a(t) * a(t + lam) * rho(lam), where a^2(t)
is a strictly positive trigonometric polynomial with period ``period_Tc``
and rho is a compactly supported, positive-semidefinite correlation
kernel.  Periodicity in t, boundedness of the variance, and finite memory
hold by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidModel

TENT = "tent"
PARZEN = "parzen"
_KERNEL_VARIANTS = (TENT, PARZEN)


@dataclass(frozen=True)
class Harmonic:
    """One sinusoidal term of a variance profile: amplitude*sin(2*pi*order*t/Tc + phase)."""

    order: int
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class VarianceProfile:
    """Periodic variance a^2(t) = offset + sum_k amp_k*sin(2*pi*k*t/Tc + phase_k)."""

    period_Tc: float
    offset: float
    harmonics: tuple[Harmonic, ...] = ()

    @property
    def beta(self) -> float:
        """Upper bound on the variance: offset plus the sum of |amplitudes|."""
        return self.offset + sum(abs(h.amplitude) for h in self.harmonics)

    @property
    def positivity_margin(self) -> float:
        """offset minus the sum of |amplitudes|; must be > 0 for a valid profile."""
        return self.offset - sum(abs(h.amplitude) for h in self.harmonics)

    def __call__(self, t):
        """Evaluate a^2(t); accepts scalars or arrays."""
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.offset)
        w = 2.0 * np.pi / self.period_Tc
        for h in self.harmonics:
            out = out + h.amplitude * np.sin(w * h.order * t + h.phase)
        return out


@dataclass(frozen=True)
class CorrelationKernel:
    """Compactly supported correlation kernel rho(lam), zero for |lam| >= max_lag.

    Both variants are positive semidefinite: the tent is the autocorrelation
    of a rectangle, the Parzen kernel is the cubic B-spline window.
    """

    variant: str
    max_lag: float

    def __call__(self, lag):
        """Evaluate rho(lag); accepts scalars or arrays. rho(0)=1, even, zero beyond max_lag."""
        u = np.abs(np.asarray(lag, dtype=float)) / self.max_lag
        if self.variant == TENT:
            return np.maximum(0.0, 1.0 - u)
        if self.variant == PARZEN:
            near = 1.0 - 6.0 * u**2 + 6.0 * u**3
            far = 2.0 * (1.0 - np.minimum(u, 1.0)) ** 3
            return np.where(u <= 0.5, near, far)
        raise InvalidModel(f"unknown kernel variant {self.variant!r}")


@dataclass(frozen=True)
class CtSourceModel:
    """A variance profile plus a correlation kernel."""

    profile: VarianceProfile
    kernel: CorrelationKernel

    @property
    def period_Tc(self) -> float:
        return self.profile.period_Tc

    @property
    def max_lag(self) -> float:
        return self.kernel.max_lag

    @property
    def beta(self) -> float:
        return self.profile.beta


@dataclass(frozen=True)
class ModelReport:
    """Validation summary for a source model."""

    beta: float
    max_lag: float
    period_Tc: float
    positivity_margin: float
    valid: bool = field(default=True)


def eval_variance(model: CtSourceModel, t) -> float:
    """Variance of the source at time t, i.e. c(t, 0) = a^2(t)."""
    return model.profile(t)


def amplitude(model: CtSourceModel, t):
    """Modulation amplitude a(t) = sqrt(a^2(t)). Requires a positive profile."""
    return np.sqrt(model.profile(t))


def eval_autocorrelation(model: CtSourceModel, t, lag) -> float:
    """Autocorrelation c(t, lag) = a(t) * a(t + lag) * rho(lag).

    Periodic in t with period ``period_Tc``, symmetric under
    (t, lag) -> (t + lag, -lag), and exactly zero for |lag| >= max_lag.
    """
    t = np.asarray(t, dtype=float)
    lag = np.asarray(lag, dtype=float)
    return amplitude(model, t) * amplitude(model, t + lag) * model.kernel(lag)


def validate_model(model: CtSourceModel) -> ModelReport:
    """Check every structural invariant; raise InvalidModel naming the first violation.

    Returns a report carrying beta, the kernel support, the period, and the
    positivity margin offset - sum|amplitudes|.
    """
    prof, kern = model.profile, model.kernel
    if not (prof.period_Tc > 0):
        raise InvalidModel("period: period_Tc must be > 0")
    if kern.variant not in _KERNEL_VARIANTS:
        raise InvalidModel(f"kernel: unknown variant {kern.variant!r}")
    if not (kern.max_lag > 0):
        raise InvalidModel("max_lag: kernel support must be > 0")
    for h in prof.harmonics:
        if not (isinstance(h.order, int) and h.order >= 1):
            raise InvalidModel(f"harmonics: order must be a positive integer, got {h.order!r}")
    margin = prof.positivity_margin
    if not (margin > 0):
        raise InvalidModel(
            f"positivity: offset must exceed the sum of |amplitudes| (margin {margin:g})"
        )
    if not math.isfinite(prof.beta):
        raise InvalidModel("beta: variance bound is not finite")
    return ModelReport(
        beta=prof.beta,
        max_lag=kern.max_lag,
        period_Tc=prof.period_Tc,
        positivity_margin=margin,
    )
