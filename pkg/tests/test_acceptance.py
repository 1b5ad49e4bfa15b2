"""Acceptance suite: every exit criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from cyclordf import (
    CorrelationKernel,
    CovarianceMatrix,
    CtSourceModel,
    Harmonic,
    IrrationalEpsilon,
    McConfig,
    RationalEpsilon,
    RdfCurvePoint,
    SamplingSpec,
    VarianceProfile,
    build_covariance,
    check_info_density_stats,
    chebyshev_concentration,
    classify,
    dominance_report,
    info_density_samples,
    rdf_block_sequence,
    rdf_fixed_block,
    rdf_oracle_small,
    rdf_rates,
    sample_phase,
    split_interval,
    transform_code,
    uniform_integrability_stats,
)

from conftest import random_banded_cov

GOLDEN = IrrationalEpsilon(0.6180339887498949, "golden-ratio conjugate")
SEED = 20260809


@contextmanager
def criterion(num, description):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {num:2d}: {description}")
        raise
    print(f"[PASS] criterion {num:2d}: {description}")


def sine_source(period=1.0):
    profile = VarianceProfile(period_Tc=period, offset=5.0, harmonics=(Harmonic(1, 1.0 / 3.0),))
    return CtSourceModel(profile=profile, kernel=CorrelationKernel("tent", period))


def test_criterion_1_variance_sequence_reproduction():
    with criterion(1, "sampled variance sequences reproduced to +-0.001"):
        model = sine_source()
        spec = SamplingSpec(p=4, epsilon=RationalEpsilon(0, 1), phase=0.0, blocklength=8)
        diag = np.diag(build_covariance(model, spec).entries)
        expected = [5.0, 5.333, 5.0, 4.667, 5.0, 5.333, 5.0, 4.667]
        assert np.max(np.abs(diag - expected)) <= 1e-3

        tc = 4 * np.pi
        model3 = sine_source(period=tc)
        p, eps = split_interval(tc, 1.0)
        assert (p, round(eps, 6)) == (12, round(4 * np.pi - 12, 6))
        spec3 = SamplingSpec(
            p=p, epsilon=IrrationalEpsilon(eps, "derived"), phase=np.pi / 3, blocklength=8
        )
        diag3 = np.diag(build_covariance(model3, spec3).entries)
        expected3 = [5.167, 5.285, 5.333, 5.300, 5.193, 5.039, 4.876, 4.743]
        assert np.max(np.abs(diag3 - expected3)) <= 1e-3


def test_criterion_2_white_gaussian_closed_form():
    with criterion(2, "white-Gaussian closed form matched to 1e-9"):
        for s2 in (0.5, 1.0, 4.0):
            cov = CovarianceMatrix.from_dense(s2 * np.eye(24))
            for d in np.linspace(0.05, 1.5, 20) * s2:
                rate = rdf_fixed_block(cov, float(d)).rate
                assert abs(rate - max(0.0, 0.5 * np.log2(s2 / d))) <= 1e-9


def test_criterion_3_oracle_equivalence():
    with criterion(3, "solver matches projected-gradient oracle to 1e-6 on 50 instances"):
        rng = np.random.default_rng(SEED)
        for trial in range(50):
            order = int(rng.integers(2, 7))
            cov = random_banded_cov(rng, order)
            d = float(rng.uniform(0.05, 0.9) * cov.trace / order)
            assert abs(rdf_fixed_block(cov, d).rate - rdf_oracle_small(cov, d, seed=trial)) <= 1e-6


def test_criterion_4_optimizer_structure():
    with criterion(4, "optimal noise covariance: commutation, ordering, trace budget"):
        rng = np.random.default_rng(SEED + 1)
        for _ in range(100):
            order = int(rng.integers(2, 9))
            cov = random_banded_cov(rng, order)
            d = float(rng.uniform(0.05, 1.1) * cov.trace / order)
            res = rdf_fixed_block(cov, d)
            cx, cs = cov.entries, res.noise_covariance.entries
            comm = np.linalg.norm(cx @ cs - cs @ cx)
            assert comm <= 1e-8 * np.linalg.norm(cx) * np.linalg.norm(cs)
            assert np.linalg.eigvalsh(cx - cs)[0] >= -1e-10
            assert np.trace(cs) / order <= d + 1e-12


def test_criterion_5_curve_shape():
    with criterion(5, "rate curve monotone, midpoint-convex, scale-equivariant"):
        rng = np.random.default_rng(SEED + 2)
        for cov in (
            CovarianceMatrix.from_dense(np.eye(10)),
            random_banded_cov(rng, 9),
            random_banded_cov(rng, 12),
        ):
            d_full = cov.trace / cov.order
            d_grid = np.linspace(0.05, 1.2, 20) * d_full
            rates = [rdf_fixed_block(cov, float(d)).rate for d in d_grid]
            assert all(a >= b - 1e-12 for a, b in zip(rates, rates[1:]))
            for i in range(19):
                mid = rdf_fixed_block(cov, float(0.5 * (d_grid[i] + d_grid[i + 1]))).rate
                assert mid <= 0.5 * (rates[i] + rates[i + 1]) + 1e-9
            assert rdf_fixed_block(cov, float(d_full)).rate == 0.0
            assert rdf_fixed_block(cov, float(1.7 * d_full)).rate == 0.0
            d = float(0.4 * d_full)
            base = rdf_fixed_block(cov, d).rate
            for alpha in (0.02, 5.0, 400.0):
                scaled = CovarianceMatrix.from_dense(alpha * cov.entries)
                assert abs(rdf_fixed_block(scaled, alpha * d).rate - base) <= 1e-10


def test_criterion_6_synchronous_stabilization():
    with criterion(6, "synchronous (period 7) per-block rates stabilize to 1e-4"):
        model = sine_source()
        eps = RationalEpsilon(1, 2)
        assert classify(3, eps).period == 7
        grid = [7 * k for k in range(4, 41)]
        est = rdf_block_sequence(model, 3, eps, 0.0, 2.0, grid)
        tail = est.per_block_rates[-est.tail_window :]
        assert max(tail) - min(tail) <= 1e-4
        assert est.estimate > 0
        assert est.stabilized


def test_criterion_7_information_density_statistics():
    with criterion(7, "information density mean and variance at l=32, n=1e5"):
        t0 = time.perf_counter()
        model = sine_source()
        spec = SamplingSpec(p=3, epsilon=GOLDEN, phase=0.0, blocklength=32)
        cov = build_covariance(model, spec)
        rdf = rdf_fixed_block(cov, 1.0)
        mc = McConfig(n_draws=100_000, seed=SEED, blocklength_l=32)
        z = info_density_samples(cov, rdf, mc)
        report = check_info_density_stats(z, rdf, mc)
        assert abs(report.empirical_mean - rdf.rate) <= 4 * report.standard_error
        assert report.empirical_variance < 3.0 / 32.0
        assert report.bound_satisfied is True
        assert time.perf_counter() - t0 <= 60.0


@pytest.mark.parametrize("l,n", [(64, 50_000), (512, 20_000)])
def test_criterion_8_chebyshev_bound(l, n):
    with criterion(8, f"Chebyshev concentration bound at l={l}"):
        model = sine_source()
        spec = SamplingSpec(p=3, epsilon=GOLDEN, phase=0.0, blocklength=l)
        cov = build_covariance(model, spec)
        rdf = rdf_fixed_block(cov, 1.0)
        mc = McConfig(n_draws=n, seed=SEED + l, blocklength_l=l)
        z = info_density_samples(cov, rdf, mc)
        report = chebyshev_concentration(z, rdf, mc)
        assert report.empirical_mean + 3 * report.standard_error < 3.0 * l ** (-1.0 / 3.0)
        assert report.bound_satisfied is True


def test_criterion_9_moment_bounds():
    with criterion(9, "per-sample energy moments: mean = trace/l, second <= 3*beta^2"):
        model = sine_source()
        beta = model.beta
        assert beta == pytest.approx(16.0 / 3.0, abs=1e-12)
        spec = SamplingSpec(p=4, epsilon=RationalEpsilon(0, 1), phase=0.0, blocklength=64)
        cov = build_covariance(model, spec)
        mc = McConfig(n_draws=100_000, seed=SEED + 9, blocklength_l=64)
        report = uniform_integrability_stats(cov, beta, mc)
        assert abs(report.empirical_mean - report.theoretical_target) <= 4 * report.standard_error
        assert report.empirical_mean <= beta
        second = report.empirical_variance + report.empirical_mean**2
        assert report.bound_value == pytest.approx(3 * beta**2, abs=1e-9)
        assert second <= report.bound_value  # 85.33 with slack to spare
        assert report.bound_satisfied is True


def test_criterion_10_codec_dominance():
    with criterion(10, "transform coder dominates the curve; high-rate gap <= 0.6 bits"):
        model = sine_source()
        spec = SamplingSpec(p=4, epsilon=RationalEpsilon(0, 1), phase=0.0, blocklength=32)
        sources = [
            ("white", CovarianceMatrix.from_dense(np.eye(16)), [0.05, 0.1, 0.25, 0.5, 0.8]),
            ("sine", build_covariance(model, spec), [0.3, 0.6, 1.25, 2.5, 4.0]),
        ]
        for name, cov, d_grid in sources:
            l = cov.order
            mc = McConfig(n_draws=100_000, seed=SEED + l, blocklength_l=l)
            points = [transform_code(cov, d, mc) for d in d_grid]
            dense = np.linspace(0.5 * min(d_grid), 1.2 * cov.trace / l, 200)
            curve = [
                RdfCurvePoint(phase=0.0, blocklength=l, distortion=float(d), rate=float(r))
                for d, r in zip(dense, rdf_rates(cov, dense))
            ]
            report = dominance_report(points, curve)
            assert report.all_dominate, f"{name}: codec point fell below the curve"
            sigma2 = cov.trace / l
            for d, entry in zip(d_grid, report.entries):
                if d <= sigma2 / 4:
                    assert entry.codec_rate - entry.rdf_rate <= 0.6, f"{name}: high-rate gap"


def test_criterion_11_equidistribution_dichotomy():
    with criterion(11, "irrational phases equidistribute; rational phases do not"):
        spec = SamplingSpec(p=4, epsilon=GOLDEN, phase=0.0, blocklength=1)
        phases = sample_phase(spec, np.arange(10_000), 1.0)
        counts, _ = np.histogram(phases, bins=20, range=(0.0, 1.0))
        stderr = np.sqrt(10_000 * 0.05 * 0.95)
        assert np.max(np.abs(counts - 500)) < 5 * stderr

        eps = RationalEpsilon(1, 2)
        period = classify(3, eps).period
        spec_r = SamplingSpec(p=3, epsilon=eps, phase=0.0, blocklength=1)
        phases_r = sample_phase(spec_r, np.arange(10_000), 1.0)
        counts_r, _ = np.histogram(phases_r, bins=20, range=(0.0, 1.0))
        assert np.max(np.abs(counts_r - 500)) >= 5 * stderr  # the uniformity test fails
        assert len(np.unique(np.round(phases_r, 9))) <= period


def test_criterion_12_determinism(tmp_path):
    with criterion(12, "identical config and seed give byte-identical CSVs"):
        from cyclordf.cli import run

        config = """
[model]
period_Tc = 1.0
offset = 5.0
harmonics = 1:0.3333333333333333:0.0
kernel = tent
max_lag = 1.0

[sampling]
p = 3
epsilon_kind = irrational
epsilon_value = 0.6180339887498949
epsilon_label = golden-ratio conjugate
phase = 0.0
phase_grid = 4
block_grid = 8 16 24

[task]
name = phase-sweep

[distortion]
grid = 0.5 1.0 2.0

[mc]
n_draws = 5000
seed = 777

[output]
prefix = {prefix}
"""
        path = tmp_path / "det.ini"
        digests = {}
        for tag, jobs in (("a", 1), ("b", 3), ("c", 1)):
            prefix = str(tmp_path / f"run_{tag}")
            path.write_text(config.format(prefix=prefix))
            assert run(str(path), jobs=jobs) == 0
            digests[tag] = (tmp_path / f"run_{tag}_phase_sweep.csv").read_bytes()
        assert digests["a"] == digests["b"] == digests["c"]

        for tag, jobs in (("v1", 1), ("v2", 2)):
            prefix = str(tmp_path / f"val_{tag}")
            path.write_text(config.format(prefix=prefix))
            assert run(str(path), overrides=["task.name=validate", "mc.n_draws=20000"], jobs=jobs) == 0
        a = (tmp_path / "val_v1_validate.csv").read_bytes()
        b = (tmp_path / "val_v2_validate.csv").read_bytes()
        assert a == b
