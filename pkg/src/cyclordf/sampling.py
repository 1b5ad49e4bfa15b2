"""Uniform sampling of a cyclostationary source and the sampled-process covariance.

The sampling interval is Ts = Tc / (p + eps) for an integer part p >= 1 and a
mismatch eps in [0, 1).  Whether eps is rational decides whether the sampled
process is cyclostationary (synchronous) or almost cyclostationary
(asynchronous); rationality is an explicit input tag, never inferred from a
floating-point value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from .errors import DegenerateCovariance
from .source_models import CtSourceModel, amplitude

SYNCHRONOUS = "synchronous"
ASYNCHRONOUS = "asynchronous"

#: relative tolerance on the smallest eigenvalue of a constructed covariance
PSD_TOL = 1e-10


class MemoryConditionWarning(UserWarning):
    """The sampling interval exceeds the source's maximal correlation length."""


@dataclass(frozen=True)
class RationalEpsilon:
    """Mismatch eps = u/v in [0, 1), in lowest terms."""

    u: int
    v: int

    def __post_init__(self):
        if not (isinstance(self.u, int) and isinstance(self.v, int)):
            raise ValueError("epsilon: u and v must be integers")
        if self.v < 1 or not (0 <= self.u < self.v):
            raise ValueError(f"epsilon: need 0 <= u < v, got u={self.u}, v={self.v}")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError(f"epsilon: u/v = {self.u}/{self.v} is not in lowest terms")

    @property
    def value(self) -> float:
        return self.u / self.v


@dataclass(frozen=True)
class IrrationalEpsilon:
    """Mismatch tagged as irrational; the caller asserts irrationality of `value`."""

    value: float
    label: str = ""

    def __post_init__(self):
        if not (0.0 <= self.value < 1.0):
            raise ValueError(f"epsilon: value must lie in [0, 1), got {self.value}")


EpsilonSpec = Union[RationalEpsilon, IrrationalEpsilon]


@dataclass(frozen=True)
class SamplingClass:
    """Synchronous (with the discrete cyclostationarity period) or asynchronous."""

    kind: str
    period: int | None = None


def classify(p: int, epsilon: EpsilonSpec) -> SamplingClass:
    """Classify a sampling configuration.

    Rational eps = u/v gives a synchronous configuration whose sampled process
    is cyclostationary with period p*v + u; an irrational tag gives an
    asynchronous configuration.
    """
    if isinstance(epsilon, RationalEpsilon):
        return SamplingClass(SYNCHRONOUS, period=p * epsilon.v + epsilon.u)
    return SamplingClass(ASYNCHRONOUS)


@dataclass(frozen=True)
class SamplingSpec:
    """Sampling configuration: integer part p, mismatch, initial phase, blocklength."""

    p: int
    epsilon: EpsilonSpec
    phase: float
    blocklength: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"sampling: p must be a positive integer, got {self.p}")
        if self.blocklength < 1:
            raise ValueError(f"sampling: blocklength must be >= 1, got {self.blocklength}")
        if self.phase < 0:
            raise ValueError(f"sampling: phase must be >= 0, got {self.phase}")

    def interval(self, period_Tc: float) -> float:
        """Sampling interval Ts = Tc / (p + eps)."""
        return period_Tc / (self.p + self.epsilon.value)


def split_interval(period_Tc: float, target_Ts: float) -> tuple[int, float]:
    """Decompose a target sampling interval into (p, eps) with Ts = Tc/(p+eps).

    Returns the integer part p >= 1 and the fractional mismatch eps in [0, 1).
    Tagging eps as rational or irrational remains the caller's decision.
    """
    if not (0 < target_Ts <= period_Tc):
        raise ValueError(f"sampling: target Ts must lie in (0, Tc], got {target_Ts}")
    ratio = period_Tc / target_Ts
    p = int(math.floor(ratio))
    eps = ratio - p
    if p < 1:
        raise ValueError("sampling: Tc/Ts must be >= 1")
    return p, eps


def max_autocorr_lag(model: CtSourceModel, p: int) -> int:
    """Discrete maximal correlation lag tau_c = ceil((p+1) * max_lag / Tc).

    The sampled-process covariance is zero for |i - j| >= tau_c for every
    mismatch eps in [0, 1) at this p.
    """
    x = (p + 1) * model.max_lag / model.period_Tc
    # tolerant ceiling: exact-integer arguments must not round up a slot
    return max(1, int(math.ceil(x - 1e-9)))


def sample_phase(spec: SamplingSpec, i, period_Tc: float):
    """Phase of sample i within the cyclostationarity period: (i*Ts + phase) mod Tc."""
    ts = spec.interval(period_Tc)
    return np.mod(np.asarray(i, dtype=float) * ts + spec.phase, period_Tc)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric banded covariance: entries are zero for |i - j| >= bandwidth."""

    order: int
    entries: np.ndarray
    bandwidth: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.entries, dtype=float)
        if arr.shape != (self.order, self.order):
            raise ValueError(f"covariance: expected {self.order}x{self.order} entries")
        scale = np.max(np.abs(arr)) or 1.0
        if np.max(np.abs(arr - arr.T)) > 1e-14 * scale:
            raise ValueError("covariance: entries are not symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_dense(cls, entries, bandwidth: int | None = None) -> "CovarianceMatrix":
        """Wrap a dense symmetric array; bandwidth defaults to the order (no band claimed)."""
        arr = np.asarray(entries, dtype=float)
        n = arr.shape[0]
        return cls(order=n, entries=arr, bandwidth=n if bandwidth is None else bandwidth)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue, via a partial symmetric eigensolve."""
        w = scipy.linalg.eigh(
            self.entries, eigvals_only=True, subset_by_index=[0, 0], driver="evr"
        )
        return float(w[0])


def build_covariance(model: CtSourceModel, spec: SamplingSpec) -> CovarianceMatrix:
    """Covariance matrix of the sampled process at the spec's blocklength.

    Entry (i, j) is c(i*Ts + phase, (j - i)*Ts): an outer product of the
    modulation amplitudes at the sample times with a banded Toeplitz factor
    from the correlation kernel.  Entries at |i - j| >= tau_c are exactly
    zero.  Warns (does not fail) when Ts exceeds the correlation length,
    i.e. the sampled process is memoryless.
    """
    l = spec.blocklength
    ts = spec.interval(model.period_Tc)
    if ts > model.max_lag:
        warnings.warn(
            f"sampling interval Ts={ts:.6g} exceeds the correlation length "
            f"max_lag={model.max_lag:.6g}; the sampled process is memoryless",
            MemoryConditionWarning,
            stacklevel=2,
        )
    tau_c = max_autocorr_lag(model, spec.p)

    a = amplitude(model, spec.phase + ts * np.arange(l))
    rho = np.zeros(l)
    m = min(tau_c, l)
    rho[:m] = model.kernel(ts * np.arange(m))
    lag = np.abs(np.subtract.outer(np.arange(l), np.arange(l)))
    entries = np.outer(a, a) * rho[lag]

    cov = CovarianceMatrix(order=l, entries=entries, bandwidth=tau_c)
    floor = -PSD_TOL * float(np.max(np.diag(entries)))
    w_min = cov.min_eigenvalue()
    if w_min < floor:
        raise DegenerateCovariance(
            f"constructed covariance has eigenvalue {w_min:.3e} below tolerance {floor:.3e}"
        )
    return cov
