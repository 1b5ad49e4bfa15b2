import numpy as np
import pytest

from cyclordf import (
    CorrelationKernel,
    CovarianceMatrix,
    CtSourceModel,
    Harmonic,
    VarianceProfile,
)


@pytest.fixture
def sine_model():
    """Offset-5 variance with one 1/3-amplitude harmonic; tent kernel over one period."""
    profile = VarianceProfile(period_Tc=1.0, offset=5.0, harmonics=(Harmonic(1, 1.0 / 3.0),))
    return CtSourceModel(profile=profile, kernel=CorrelationKernel("tent", 1.0))


@pytest.fixture
def constant_model():
    """Constant variance 2; the sampled process is stationary."""
    profile = VarianceProfile(period_Tc=1.0, offset=2.0)
    return CtSourceModel(profile=profile, kernel=CorrelationKernel("tent", 1.0))


def random_banded_cov(rng, order, bandwidth=None, diag_boost=None):
    """Random symmetric banded positive-definite covariance for property tests."""
    if bandwidth is None:
        bandwidth = int(rng.integers(1, order + 1))
    a = rng.standard_normal((order, order + 3))
    m = a @ a.T / (order + 3)
    mask = np.abs(np.subtract.outer(np.arange(order), np.arange(order))) < bandwidth
    m = np.where(mask, m, 0.0)
    m = m + (order if diag_boost is None else diag_boost) * np.eye(order)
    return CovarianceMatrix.from_dense(0.5 * (m + m.T), bandwidth=bandwidth)
