import pytest
from mpmath import cos, exp, mpf, pi, sin

from critamp import periodic
from critamp.bounded import BoundedValue
from critamp.errors import DomainError

T = mpf(2) ** mpf("0.5")
A = mpf("-0.3")


def trig(x):
    u = 2 * pi * (x - A) / T
    return BoundedValue(3 + mpf("0.5") * sin(u - 1) + mpf("0.01") * cos(2 * u), mpf(10) ** -40)


def test_trigonometric_polynomial_recovered():
    summary = periodic.fourier_summary(periodic.sample(trig, A, T, 32), 3)
    assert summary.mean.contains(3, slack=mpf(10) ** -50)
    h1, h2, h3 = summary.harmonics
    assert abs(h1.amplitude.value - mpf("0.5")) <= h1.amplitude.err + mpf(10) ** -50
    assert abs(h2.amplitude.value - mpf("0.01")) <= h2.amplitude.err + mpf(10) ** -50
    assert h3.amplitude.value <= h3.amplitude.err + mpf(10) ** -50
    # 0.5 sin(u − 1) = g₁ sin(2π(x − x₁)/T) with x₁ = A + T/(2π)
    assert abs(h1.phase.value - (A + T / (2 * pi))) < mpf(10) ** -40


def test_reconstruction_and_oscillation():
    summary = periodic.fourier_summary(periodic.sample(trig, A, T, 32), 3)
    for x in (A, A + T / 3, mpf(5)):
        assert abs(periodic.reconstruct(summary, x) - trig(x).value) < mpf(10) ** -35
    osc = periodic.oscillation(summary, points=4096)
    # the u-grid misses the extrema of the second harmonic by at most its resolution
    assert abs(osc.value - 1) < mpf("0.05")
    assert osc.err < mpf("0.001")


def test_analytic_function_error_estimate_is_honest():
    def f(x):
        return BoundedValue(1 / (2 - cos(2 * pi * x)), mpf(0))

    exact_mean = 1 / mpf(3).sqrt()
    for m in (8, 16, 32):
        mean = periodic.mean(periodic.sample(f, 0, 1, m))
        assert abs(mean.value - exact_mean) <= mean.err


def test_point_errors_propagate():
    def noisy(x):
        return BoundedValue(mpf(1), mpf("1e-6"))

    summary = periodic.fourier_summary(periodic.sample(noisy, 0, 1, 16), 2)
    assert summary.mean.err >= mpf("1e-6")
    assert summary.harmonic(1).amplitude.err >= mpf("2e-6")


def test_validation():
    with pytest.raises(DomainError):
        periodic.sample(trig, 0, 1, 2)
    s = periodic.sample(trig, 0, 1, 8)
    with pytest.raises(DomainError):
        periodic.coeff(s, 3)
    with pytest.raises(DomainError):
        periodic.coeff(s, 0)
    with pytest.raises(DomainError):
        periodic.mean(periodic.sample(trig, 0, 1, 9))


def test_summary_serializes():
    summary = periodic.fourier_summary(periodic.sample(trig, A, T, 16), 2)
    d = summary.to_dict()
    assert len(d["harmonics"]) == 2 and float(d["mean"]["value"]) == pytest.approx(3)


def test_sample_reports_failing_point():
    def bad(x):
        if x > mpf("0.5"):
            raise ValueError("boom")
        return BoundedValue(exp(x), mpf(0))

    with pytest.raises(ValueError, match="sample 5"):
        periodic.sample(bad, 0, 1, 8)
