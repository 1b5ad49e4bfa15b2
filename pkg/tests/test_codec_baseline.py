import numpy as np
import pytest
import scipy.linalg

from cyclordf import (
    CodecPoint,
    CovarianceMatrix,
    McConfig,
    RdfCurvePoint,
    dominance_report,
    rdf_fixed_block,
    rdf_rates,
    sample_gaussian,
    transform_code,
)

from conftest import random_banded_cov


def test_white_point_sits_in_the_known_redundancy_band():
    l = 16
    cov = CovarianceMatrix.from_dense(np.eye(l))
    mc = McConfig(n_draws=100_000, seed=3, blocklength_l=l)
    pt = transform_code(cov, 0.25, mc)
    # scalar quantization redundancy keeps the rate above R(D)=1 but within 0.6
    assert pt.empirical_rate >= 1.0 - 3 * pt.rate_stderr
    assert pt.empirical_rate <= 1.6
    assert abs(pt.empirical_distortion - 0.25) <= 0.15 * 0.25


def test_all_discard_codec_at_full_distortion():
    rng = np.random.default_rng(2)
    cov = random_banded_cov(rng, 6)
    d_full = cov.trace / cov.order
    mc = McConfig(n_draws=20_000, seed=4, blocklength_l=6)
    pt = transform_code(cov, 1.5 * d_full, mc)
    assert pt.empirical_rate == 0.0
    assert pt.step_sizes == ()
    assert pt.empirical_distortion <= d_full * (1 + 0.05)


def test_two_mode_rate_dominates_rdf():
    cov = CovarianceMatrix.from_dense(np.diag([4.0, 1.0]))
    mc = McConfig(n_draws=100_000, seed=5, blocklength_l=2)
    pt = transform_code(cov, 1.0, mc)
    assert pt.empirical_rate >= 0.5 - 3 * pt.rate_stderr


def test_distortion_accounting_matches_error_covariance_trace():
    # replay the coder's pipeline and compare the two distortion accountings
    rng = np.random.default_rng(6)
    cov = random_banded_cov(rng, 5)
    d = 0.3 * cov.trace / cov.order
    mc = McConfig(n_draws=20_000, seed=7, blocklength_l=5)
    pt = transform_code(cov, d, mc)

    w, v = scipy.linalg.eigh(cov.entries)
    lam, v = w[::-1], v[:, ::-1]
    mu = rdf_fixed_block(cov, d).mode_distortions
    x = sample_gaussian(cov, mc, stream="transform-code")
    y = x @ v
    q = np.zeros_like(y)
    for step, j in zip(pt.step_sizes, np.flatnonzero(mu < lam)):
        q[:, j] = step * np.rint(y[:, j] / step)
    err = x - q @ v.T
    per_draw_mse = float(np.mean(np.einsum("ij,ij->i", err, err)) / cov.order)
    emp_cov_trace = float(np.trace(err.T @ err / mc.n_draws)) / cov.order
    assert per_draw_mse == pytest.approx(pt.empirical_distortion, abs=1e-10)
    assert per_draw_mse == pytest.approx(emp_cov_trace, abs=1e-10)


def test_dominance_on_white_grid():
    l = 16
    cov = CovarianceMatrix.from_dense(np.eye(l))
    mc = McConfig(n_draws=50_000, seed=8, blocklength_l=l)
    distortions = [0.05, 0.1, 0.25, 0.5, 0.8]
    points = [transform_code(cov, d, mc) for d in distortions]
    curve = [
        RdfCurvePoint(phase=0.0, blocklength=l, distortion=d, rate=float(r))
        for d, r in zip(distortions, rdf_rates(cov, distortions))
    ]
    report = dominance_report(points, curve)
    assert report.all_dominate
    assert all(e.margin >= 0 for e in report.entries)


def test_dominance_empty_points():
    report = dominance_report([], [])
    assert report.entries == ()
    assert report.all_dominate


def test_dominance_flags_injected_violation():
    curve = [
        RdfCurvePoint(phase=0.0, blocklength=4, distortion=d, rate=r)
        for d, r in [(0.1, 1.66), (0.5, 0.5), (1.0, 0.0)]
    ]
    bogus = CodecPoint(
        empirical_rate=0.5 - 1.0,  # a full bit below the curve
        empirical_distortion=0.5,
        step_sizes=(1.0,),
        n_draws=1000,
        seed=0,
        rate_stderr=0.01,
        distortion_stderr=0.01,
    )
    report = dominance_report([bogus], curve)
    assert not report.all_dominate
    assert report.entries[0].margin < 0
