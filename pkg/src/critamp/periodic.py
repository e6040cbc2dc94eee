"""Mean and Fourier coefficients of periodic functions known only pointwise.

Samples are taken on a uniform grid over one period and integrated with the
trapezoidal rule, which for a periodic integrand is the plain average of the
samples and converges geometrically when the integrand is analytic. The
quadrature error is estimated by comparing with the rule on every other point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from mpmath import arg, expj, mp, mpf, pi, sin

from .bounded import BoundedValue
from .errors import DomainError


@dataclass(frozen=True)
class PeriodicSample:
    """Values ``fn(a + jT/m)`` for ``j = 0..m−1``, each with its error bound."""

    start: mpf
    period: mpf
    grid: tuple
    values: tuple

    def __post_init__(self):
        if len(self.grid) < 4:
            raise DomainError("need at least 4 samples")
        if len(self.grid) != len(self.values):
            raise DomainError("grid and values differ in length")

    @property
    def m(self) -> int:
        return len(self.grid)

    def rows(self):
        return [(x, v.value, v.err) for x, v in zip(self.grid, self.values)]


@dataclass(frozen=True)
class Harmonic:
    """One harmonic in both forms: ĉ_n and ``g_n sin(2πn(x − x_n)/T)``."""

    n: int
    coefficient: BoundedValue
    amplitude: BoundedValue
    phase: BoundedValue


@dataclass(frozen=True)
class FourierSummary:
    start: mpf
    period: mpf
    mean: BoundedValue
    harmonics: tuple

    @property
    def amplitudes(self):
        return [h.amplitude for h in self.harmonics]

    def harmonic(self, n: int) -> Harmonic:
        return self.harmonics[n - 1]

    def to_dict(self) -> dict:
        return {
            "window_start": str(self.start),
            "period": str(self.period),
            "mean": {"value": str(self.mean.value), "err": str(self.mean.err)},
            "harmonics": [
                {
                    "n": h.n,
                    "re": str(h.coefficient.value.real),
                    "im": str(h.coefficient.value.imag),
                    "coefficient_err": str(h.coefficient.err),
                    "amplitude": str(h.amplitude.value),
                    "amplitude_err": str(h.amplitude.err),
                    "phase": str(h.phase.value),
                    "phase_err": str(h.phase.err),
                }
                for h in self.harmonics
            ],
        }


def sample(fn: Callable, window_start, period, m: int) -> PeriodicSample:
    """Evaluate ``fn`` (returning :class:`BoundedValue`) on a uniform grid."""
    if m < 4:
        raise DomainError("need m ≥ 4")
    a, T = mpf(window_start), mpf(period)
    grid = tuple(a + T * j / m for j in range(m))
    values = []
    for j, x in enumerate(grid):
        try:
            values.append(fn(x))
        except Exception as exc:
            raise type(exc)(f"sample {j} at x = {mp.nstr(x, 15)}: {exc}") from exc
    return PeriodicSample(a, T, grid, tuple(values))


def _point_err(s: PeriodicSample):
    return sum((v.err for v in s.values), mpf(0)) / s.m


def _trapezoid(values, n, m):
    if n == 0:
        return sum(values, mpf(0)) / m
    return sum((v * expj(-2 * pi * n * j / m) for j, v in enumerate(values)), mpf(0)) / m


def _quadrature(s: PeriodicSample, n: int) -> BoundedValue:
    if s.m < 4 * max(n, 1):
        raise DomainError(f"m = {s.m} is too small for harmonic {n} (need m ≥ 4n)")
    values = [v.value for v in s.values]
    full = _trapezoid(values, n, s.m)
    if s.m % 2:
        raise DomainError("m must be even for the quadrature error estimate")
    half = _trapezoid(values[::2], n, s.m // 2)
    return BoundedValue(full, _point_err(s) + 2 * abs(full - half))


def mean(s: PeriodicSample) -> BoundedValue:
    return _quadrature(s, 0)


def coeff(s: PeriodicSample, n: int) -> BoundedValue:
    """``ĉ_n = (1/T)∫ f(x) e^{−2πin(x−a)/T} dx`` (complex)."""
    if n < 1:
        raise DomainError("harmonic index must be positive")
    return _quadrature(s, n)


def fourier_summary(s: PeriodicSample, n_max: int) -> FourierSummary:
    """Mean and harmonics 1..n_max, with ``g_n = 2|ĉ_n|`` and phases ``x_n``.

    The phases are chosen so that
    ``f(x) ≈ mean + Σ g_n sin(2πn(x − x_n)/T)``.
    """
    harmonics = []
    for n in range(1, n_max + 1):
        c = coeff(s, n)
        amp = 2 * abs(c.value)
        phase = s.start - s.period * (arg(c.value) + pi / 2) / (2 * pi * n)
        phase_err = s.period * c.err / (2 * pi * n * abs(c.value)) if c.value else s.period
        harmonics.append(Harmonic(n, c, BoundedValue(amp, 2 * c.err),
                                  BoundedValue(phase, phase_err)))
    return FourierSummary(s.start, s.period, mean(s), tuple(harmonics))


def reconstruct(summary: FourierSummary, x):
    """Evaluate the truncated Fourier series at ``x``."""
    total = summary.mean.value
    for h in summary.harmonics:
        total += h.amplitude.value * sin(2 * pi * h.n * (x - h.phase.value) / summary.period)
    return total


def oscillation(summary: FourierSummary, points: int = 2048) -> BoundedValue:
    """``max − min`` of the reconstruction over one period.

    The error adds twice the amplitude errors of the retained harmonics; the
    truncation of later harmonics is not included and should be judged from
    their decay.
    """
    a, T = summary.start, summary.period
    values = [reconstruct(summary, a + T * j / points) for j in range(points)]
    spread = max(values) - min(values)
    # grid resolution: a sinusoid of amplitude g sampled at spacing T/points
    resolution = sum(h.amplitude.value * (pi * h.n / points) ** 2 for h in summary.harmonics)
    err = 2 * sum((h.amplitude.err for h in summary.harmonics), mpf(0)) + resolution
    return BoundedValue(spread, err)
