"""Julia-set boundary of a quadratic pinning map.

The inverse Böttcher map sends the unit circle onto the Julia set,
``𝒜(e^{iπt})`` for ``t ∈ (−1, 1]``. It can be written as
``𝒜(z) = 1 + (φ(1/z) − (1−λ)/λ)/c`` with ``c = p₂/λ``, so boundary points only
need φ on the unit circle. Two evaluators are provided:

``"boundary"`` (default)
    φ(y) for ``|y| = 1`` by backward iteration ``φ(y) = Q(φ(y²))``, starting
    from the Laurent series at ``y^{2ⁿ}``. Of the two roots of
    ``λx(1 + x) = φ(y²)`` the one closer to the series value at y is kept.
    Inverse branches of the quadratic are contracting on the Julia set, so
    the starting error is damped at each step.

``"fourier"``
    ``𝒜(z) = 1 + 𝚐((log z)^{1/γ}ω(log log z))/c`` with ω continued to the
    complex plane through its truncated Fourier series. This follows the
    series representation directly but converges slowly near ``|Im| = π/2``.

Both are best-effort and return no error bound. The preimage tree of the
fixed point 1 gives an independent cloud for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from mpmath import mp, mpc, mpf, pi

from . import series
from .errors import DomainError
from .maps import PinningMap


@dataclass(frozen=True)
class JuliaCloud:
    method: str
    points: np.ndarray
    params: dict = field(default_factory=dict)
    t: np.ndarray | None = None

    def __len__(self):
        return len(self.points)

    def rows(self):
        if self.t is not None:
            return [(float(t), z.real, z.imag) for t, z in zip(self.t, self.points)]
        return [(z.real, z.imag) for z in self.points]


def _laurent_values(pole, coeffs, y):
    acc = np.zeros_like(y)
    for c in coeffs[::-1]:
        acc = acc * y + c
    return pole / y + acc


def phi_on_circle(lam: float, t: np.ndarray, n_back: int = 60, terms: int = 250):
    """φ(e^{−iπt}) for an array of real t by backward iteration.

    Angles are tracked as ``t·2^j mod 2`` in binary floating point, where the
    doubling is exact.
    """
    with mp.workdps(30):
        coeffs = np.array([float(b) for b in series.phi_coefficients(lam, terms)])
    pole = 1 / lam
    xstar = (1 - lam) / lam
    t = np.asarray(t, dtype=float)
    sign = np.where(t < 0, -1.0, 1.0)
    tt = np.abs(t)
    levels = [np.mod(tt, 2.0)]
    for _ in range(n_back):
        levels.append(np.mod(levels[-1] * 2.0, 2.0))

    def y_at(level):
        return np.exp(-1j * np.pi * level)

    def start(level):
        # y = 1 is the fixed point of the doubling; φ(1) is the fixed point x*
        value = _laurent_values(pole, coeffs, y_at(level))
        return np.where(level == 0.0, xstar + 0j, value)

    v = start(levels[n_back])
    for j in range(n_back - 1, -1, -1):
        level = levels[j]
        root = np.sqrt(1 + 4 * v / lam + 0j)
        plus = (root - 1) / 2
        minus = -1 - plus
        ref = start(level)
        v = np.where(np.abs(plus - ref) <= np.abs(minus - ref), plus, minus)
    return np.where(sign < 0, np.conj(v), v)


def _boundary_points(pmap: PinningMap, t: np.ndarray, n_back: int, terms: int):
    lam = float(pmap.lam)
    c = float(pmap.c)
    xstar = (1 - lam) / lam
    phi = phi_on_circle(lam, t, n_back, terms)
    return 1 + (phi - xstar) / c


def _fourier_points(engine, t: np.ndarray, order: int, refinements: int):
    if order < 3:
        raise DomainError("the Fourier continuation needs at least 3 harmonics")
    summ = engine.omega_mean_and_fourier(max(64, 4 * order), order)
    out = []
    with mp.workdps(engine.dps):
        T, a = summ.period, summ.start
        w, lam, gamma = engine.w, engine.lam, engine.gamma
        # at |Im x| = π/2 harmonic n is amplified by e^{π²n/T}, so harmonics
        # not resolved above their error would only contribute noise
        coeffs = [h.coefficient.value for h in summ.harmonics
                  if abs(h.coefficient.value) > 2 * h.coefficient.err]
        g = engine.g_series
        from mpmath import exp, log

        def omega_c(x):
            total = mpc(summ.mean.value)
            for n, cn in enumerate(coeffs, start=1):
                phase = 2j * pi * n * (x - a) / T
                total += cn * exp(phase) + cn.conjugate() * exp(-phase)
            return total

        def g_complex(y):
            y = y / w**refinements
            v = g(y)
            for _ in range(refinements):
                v = series.A_quad(v, lam)
            return v

        for tk in t:
            if tk == 0:
                out.append(1 + 0j)
                continue
            L = mpc(0, pi * mpf(float(tk)))
            y = L ** (1 / gamma) * omega_c(log(L))
            point = complex(1 + g_complex(y) / engine.c)
            if not np.isfinite(point):
                raise DomainError(f"Fourier continuation diverged at t = {float(tk)}")
            out.append(point)
    return np.array(out)


def julia_boettcher(pmap_or_engine, t_grid, method: str = "boundary", *,
                    n_back: int = 60, terms: int = 250, fourier_order: int = 3,
                    refinements: int = 3) -> JuliaCloud:
    """Points ``𝒜(e^{iπt})`` for ``t`` in ``t_grid`` (values in (−1, 1]).

    ``method="boundary"`` takes a :class:`PinningMap` or an engine;
    ``method="fourier"`` needs an :class:`~critamp.oscillation.OscillationEngine`.
    """
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= -1) or np.any(t > 1):
        raise DomainError("t must lie in (-1, 1]")
    if method == "boundary":
        pmap = getattr(pmap_or_engine, "pmap", pmap_or_engine)
        pmap.require_quadratic()
        points = _boundary_points(pmap, t, n_back, terms)
        points[t == 0] = 1.0
        params = {"n_back": n_back, "terms": terms}
    elif method == "fourier":
        if not hasattr(pmap_or_engine, "omega_mean_and_fourier"):
            raise DomainError("the fourier method needs an OscillationEngine")
        points = _fourier_points(pmap_or_engine, t, fourier_order, refinements)
        params = {"fourier_order": fourier_order, "refinements": refinements}
    else:
        raise DomainError(f"unknown method {method!r}")
    return JuliaCloud(f"boettcher-{method}", points, params, t)


def inverse_branches(pmap: PinningMap, z: np.ndarray) -> np.ndarray:
    """Both preimages ``(−p₁ ± √(p₁² − 4p₂(p₀ − z)))/(2p₂)`` of each point."""
    p0, p1, p2 = (float(p) for p in pmap.weights)
    root = np.sqrt(p1 * p1 - 4 * p2 * (p0 - z) + 0j)
    return np.concatenate([(-p1 + root) / (2 * p2), (-p1 - root) / (2 * p2)])


def julia_inverse_iteration(pmap: PinningMap, depth: int = 7, all_levels: bool = False) -> JuliaCloud:
    """The ``2^depth`` solutions of ``f_depth(z) = 1``.

    With ``all_levels=True`` the points of every level are returned instead.
    """
    pmap.require_quadratic()
    if depth < 1:
        raise DomainError("depth must be at least 1")
    level = np.array([1.0 + 0j])
    collected = [level]
    for _ in range(depth):
        level = inverse_branches(pmap, level)
        collected.append(level)
    points = np.concatenate(collected) if all_levels else level
    return JuliaCloud("inverse-iteration", points, {"depth": depth, "all_levels": all_levels})


def forward_residual(pmap: PinningMap, cloud: JuliaCloud, steps: int) -> float:
    """``max |f_steps(z) − 1|`` over the cloud, iterated in double precision."""
    p = [float(c) for c in pmap.weights]
    z = cloud.points.astype(complex)
    for _ in range(steps):
        z = p[0] + z * (p[1] + z * p[2])
    return float(np.max(np.abs(z - 1)))


def cloud_distance(a: JuliaCloud, b: JuliaCloud, chunk: int = 2048) -> float:
    """One-sided Hausdorff distance ``max_{x∈a} min_{y∈b} |x − y|``."""
    pa, pb = np.asarray(a.points), np.asarray(b.points)
    if pa.size == 0 or pb.size == 0:
        raise DomainError("clouds must be non-empty")
    worst = 0.0
    for i in range(0, pa.size, chunk):
        block = pa[i:i + chunk]
        nearest = np.min(np.abs(block[:, None] - pb[None, :]), axis=1)
        worst = max(worst, float(nearest.max()))
    return worst
