"""The log 2-periodic function ω and the critical amplitude Ω.

For a quadratic map with λ = 2 − w and γ = log 2/log w, the function

    β(s) = 𝚐⁻¹(φ(e^{−s}) − (1−λ)/λ)

satisfies ``β(2s) = w·β(s)``, so ``ω(log s) = s^{−1/γ}β(s)`` is log 2-periodic.
β is an increasing bijection of (0, ∞); its inverse has the form
``β⁻¹(y) = y^γ·α(log y)`` with α log w-periodic, and the amplitude of the
free energy is ``Ω(x) = c^γ·α(x + log c)`` with ``c = p₂/λ``.

:class:`OscillationEngine` builds certified series for 𝚐, 𝚐⁻¹ and φ once and
then evaluates all of these with error bounds.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from typing import Optional

from mpmath import exp, floor, ldexp, log, mp, mpf, pi

from . import periodic, series
from .bounded import ROUNDING_INFLATION, BoundedValue, resolve_dps, rounding_floor
from .errors import ConvergenceError, DomainError
from .maps import PinningMap, _mp, v_of_delta
from .periodic import FourierSummary


class OscillationEngine:
    """Certified evaluator of ω, β⁻¹, α, Ω and ℓ for one quadratic map.

    Parameters
    ----------
    pmap
        Quadratic pinning map.
    g_order, phi_order
        Truncation orders of the 𝚐 (and 𝚐⁻¹) series and of the φ series
        (the latter keeps odd powers through ``2·phi_order − 1``).
    n_phi, n_ginv
        Backward-refinement depths used on the default window.
    target_err
        Pointwise error that ω must reach on the window. Depths are increased
        at construction until it does.
    g_radius, ginv_radius, phi_radius
        Radii on which the envelopes are certified.
    dps
        Working precision in significant digits.
    """

    def __init__(self, pmap: PinningMap, *, g_order: int = 16, phi_order: int = 8,
                 n_phi: int = 7, n_ginv: int = 7, target_err=None,
                 g_radius="2.5", ginv_radius="2", phi_radius="0.9", dps=None):
        pmap.require_quadratic()
        self.pmap = pmap
        self.dps = resolve_dps(dps)
        with mp.workdps(self.dps):
            self.lam = pmap.lam_mp
            self.w = 2 - self.lam
            self.gamma = pmap.gamma
            self.xstar = (1 - self.lam) / self.lam
            self.c = _mp(pmap.c)
            self.period = log(2)
            self.window_start = -2 - self.period
            self.target_err = (mpf(10) ** (-self.dps // 2) if target_err is None
                               else mpf(target_err))

            g = series.expand_g(pmap, g_order)
            self.g_series = self._certify(series.certify_g_auto, series.search_g_certificate,
                                          g, mpf(g_radius))
            radius = mpf(ginv_radius)
            while True:
                try:
                    self.ginv_series = series.invert_g(self.g_series, radius=radius)
                    break
                except Exception:
                    radius /= 2
                    if radius < mpf("1e-3"):
                        raise
            phi = series.expand_phi(pmap, phi_order)
            self.phi_series = self._certify(series.certify_phi_auto,
                                            series.search_phi_certificate, phi, mpf(phi_radius))
            self.n_phi, self.n_ginv = n_phi, n_ginv
            self._tune_depths()

    @staticmethod
    def _certify(direct, search, s, radius):
        try:
            return direct(s, radius)
        except Exception:
            return search(s, radius / 2)

    def _tune_depths(self):
        """Raise the depths until the window endpoints meet ``target_err``."""
        lo, hi = exp(self.window_start), exp(self.window_start + self.period)
        for _ in range(60):
            try:
                # φ error is largest at the smallest s, 𝚐⁻¹ error at the largest argument
                errs = [self.omega_at(s).err for s in (lo, hi)]
            except DomainError:
                errs = [mpf("inf")]
            if max(errs) <= self.target_err:
                return
            self.n_phi += 1
            self.n_ginv += 1
        raise ConvergenceError("could not reach the target error on the default window")

    # -- configuration -----------------------------------------------------

    def config(self) -> dict:
        return {
            "weights": [str(p) for p in self.pmap.weights],
            "dps": self.dps,
            "g_order": self.g_series.order,
            "phi_order": self.phi_series.order,
            "n_phi": self.n_phi,
            "n_ginv": self.n_ginv,
            "window": [str(self.window_start), str(self.window_start + self.period)],
        }

    # -- ω ------------------------------------------------------------------

    def _reduce_s(self, s):
        """Return ``(s', k)`` with ``s = s'·2^k`` and log s' in the window."""
        s = mpf(s)
        if s <= 0:
            raise DomainError("s must be positive")
        lo = exp(self.window_start)
        k = int(floor(log(s / lo) / self.period))
        reduced = ldexp(s, -k)
        # guard against rounding at the window edges
        if reduced < lo * (1 - mpf(10) ** (-self.dps + 5)):
            k -= 1
            reduced = ldexp(s, -k)
        elif reduced >= 2 * lo * (1 + mpf(10) ** (-self.dps + 5)):
            k += 1
            reduced = ldexp(s, -k)
        return reduced, k

    def phi_at(self, s, n_back: Optional[int] = None) -> BoundedValue:
        """``φ(e^{−s})`` for s > 0 by backward refinement."""
        with mp.workdps(self.dps):
            return series.refine_phi(self.phi_series, None, n_back, log_y=-mpf(s))

    def beta_window(self, s, n_phi=None, n_ginv=None) -> BoundedValue:
        """``β(s) = 𝚐⁻¹(φ(e^{−s}) − (1−λ)/λ)`` for s in the window."""
        with mp.workdps(self.dps):
            phi = self.phi_at(s, self.n_phi if n_phi is None else n_phi)
            u = phi.value - self.xstar
            if u - phi.err < 0:
                raise DomainError("φ(e^{-s}) is not above its fixed point")
            ginv = series.refine_g_inverse(self.ginv_series, u,
                                           self.n_ginv if n_ginv is None else n_ginv)
            # 𝚐' ≥ 1 on the positive axis, so 𝚐⁻¹ is 1-Lipschitz there
            return BoundedValue(ginv.value, ginv.err + phi.err)

    def omega_at(self, s, *, n_phi=None, n_ginv=None, reduce: bool = True) -> BoundedValue:
        """ω(log s) with a certified error bound.

        By default s is first moved into the window by a power of 2. With
        ``reduce=False`` the formula is applied at s itself and both
        refinement depths are chosen adaptively.
        """
        with mp.workdps(self.dps):
            if reduce:
                reduced, _ = self._reduce_s(s)
                b = self.beta_window(reduced, n_phi, n_ginv)
            else:
                reduced = mpf(s)
                if reduced <= 0:
                    raise DomainError("s must be positive")
                phi = self.phi_at(reduced, None)
                ginv = series.refine_g_inverse(self.ginv_series, phi.value - self.xstar)
                b = BoundedValue(ginv.value, ginv.err + phi.err)
            scale = reduced ** (-1 / self.gamma)
            value = scale * b.value
            err = scale * b.err * ROUNDING_INFLATION + rounding_floor(value, ops=20)
            return BoundedValue(value, err)

    def omega(self, x) -> BoundedValue:
        """ω(x) for real x, reduced into the window by whole periods."""
        with mp.workdps(self.dps):
            x = mpf(x)
            k = floor((x - self.window_start) / self.period)
            return self.omega_at(exp(x - k * self.period))

    def omega_mean_and_fourier(self, m: int = 64, n_max: int = 4) -> FourierSummary:
        with mp.workdps(self.dps):
            s = periodic.sample(self.omega, self.window_start, self.period, m)
            return periodic.fourier_summary(s, n_max)

    @cached_property
    def omega_summary(self) -> FourierSummary:
        return self.omega_mean_and_fourier(64, 4)

    @property
    def omega_bar(self) -> mpf:
        return self.omega_summary.mean.value

    @cached_property
    def _derivative_floor(self):
        """Lower bound factor for β'(x)/x^{1/γ−1} = ω/γ + ω'.

        Uses the sampled Fourier summary with a factor 4 of safety on the
        oscillation and on its derivative.
        """
        with mp.workdps(self.dps):
            summ = self.omega_summary
            spread = sum((h.amplitude.value for h in summ.harmonics), mpf(0))
            slope = sum((h.amplitude.value * 2 * pi * h.n / self.period
                         for h in summ.harmonics), mpf(0))
            floor_ = summ.mean.value / self.gamma - 4 * spread / self.gamma - 4 * slope
            if floor_ <= 0:
                raise DomainError("ω oscillates too strongly for a monotone inversion")
            rel = 4 * spread / summ.mean.value
            return floor_, rel

    # -- β and its inverse --------------------------------------------------

    def beta(self, x) -> BoundedValue:
        """``β(x) = x^{1/γ}ω(log x)``."""
        with mp.workdps(self.dps):
            x = mpf(x)
            reduced, k = self._reduce_s(x)
            b = self.beta_window(reduced)
            factor = self.w**k
            return BoundedValue(b.value * factor, b.err * factor * ROUNDING_INFLATION
                                + rounding_floor(b.value * factor, ops=10))

    def beta_inverse(self, y, tol=None, y_err=0) -> BoundedValue:
        """Solve ``β(x) = y`` by safeguarded Newton iteration.

        The argument is first scaled by a power of w so that the root lies in
        the default window (``β⁻¹(w·y) = 2·β⁻¹(y)``). The returned error combines
        the final residual, the error of β at the root and ``y_err``, divided
        by a lower bound of β' on the bracket.
        """
        with mp.workdps(self.dps):
            y = mpf(y)
            if y <= 0:
                raise DomainError("beta_inverse needs y > 0")
            tol = mpf(10) ** (-self.dps + 10) if tol is None else mpf(tol)
            d_floor, rel = self._derivative_floor
            gamma, bar = self.gamma, self.omega_bar
            lo_s = exp(self.window_start)
            y_lo = lo_s ** (1 / gamma) * bar
            k = int(floor(log(y / y_lo) / log(self.w)))
            scale_y = self.w**k
            target = y / scale_y
            lo = (target / (bar * (1 + rel))) ** gamma
            hi = (target / (bar * (1 - rel))) ** gamma
            x = (target / bar) ** gamma
            for _ in range(200):
                b = self.beta_window(x) if lo_s <= x < 2 * lo_s else self.beta(x)
                resid = b.value - target
                if resid > 0:
                    hi = min(hi, x)
                else:
                    lo = max(lo, x)
                step = resid / (x ** (1 / gamma - 1) * bar / gamma)
                new = x - step
                if not lo <= new <= hi:
                    new = (lo + hi) / 2
                if abs(new - x) <= tol * x:
                    x = new
                    break
                x = new
            else:
                raise ConvergenceError("Newton iteration for β⁻¹ did not converge")
            b = self.beta(x)
            slope = x ** (1 / gamma - 1) * d_floor
            err = (abs(b.value - target) + b.err + mpf(y_err) / scale_y) / slope
            factor = ldexp(mpf(1), k)
            value = x * factor
            return BoundedValue(value, err * factor * ROUNDING_INFLATION
                                + rounding_floor(value, ops=20))

    def alpha_at(self, t) -> BoundedValue:
        """``α(t) = β⁻¹(eᵗ)/e^{γt}``, a log w-periodic function."""
        with mp.workdps(self.dps):
            t = mpf(t)
            x = self.beta_inverse(exp(t))
            scale = exp(-self.gamma * t)
            return BoundedValue(x.value * scale, x.err * scale * ROUNDING_INFLATION)

    def Omega_at(self, x) -> BoundedValue:
        """Critical amplitude ``Ω(x) = c^γ·α(x + log c)``."""
        with mp.workdps(self.dps):
            a = self.alpha_at(mpf(x) + log(self.c))
            scale = self.c**self.gamma
            return BoundedValue(a.value * scale, a.err * scale * ROUNDING_INFLATION)

    critical_amplitude_at = Omega_at

    def alpha_first_order(self, t):
        """``ω(γt − γ log ω̄)^{−γ}``, the first-order approximation of α."""
        with mp.workdps(self.dps):
            t = mpf(t)
            om = self.omega(self.gamma * t - self.gamma * log(self.omega_bar))
            return om.value ** (-self.gamma)

    def Omega_summary(self, m: int = 64, n_max: int = 4) -> FourierSummary:
        """Mean and harmonics of Ω over ``[0, log w)``."""
        with mp.workdps(self.dps):
            s = periodic.sample(self.Omega_at, mpf(0), log(self.w), m)
            return periodic.fourier_summary(s, n_max)

    def amplitude_report(self, m: int = 64, n_max: int = 4) -> dict:
        """Mean, harmonics and peak-to-peak oscillation of Ω."""
        summ = self.Omega_summary(m, n_max)
        with mp.workdps(self.dps):
            osc = periodic.oscillation(summ)
        return {"summary": summ, "oscillation": osc}

    # -- free energy through the inverse route ------------------------------

    def ell(self, d, tol=None, d_err=0) -> BoundedValue:
        """``ℓ(δ) = β⁻¹(𝚐⁻¹(v(δ)))`` for ``0 < δ < λ/(1−λ)``."""
        with mp.workdps(self.dps):
            d = mpf(d)
            if d <= 0:
                raise DomainError("δ must be positive")
            v = v_of_delta(self.pmap, d)
            u = series.refine_g_inverse(self.ginv_series, v, tol=tol)
            return self.beta_inverse(u.value, y_err=u.err + rounding_floor(v, ops=10))

    def g(self, y) -> BoundedValue:
        """𝚐(y) for y ≥ 0 with a certified two-sided bracket."""
        with mp.workdps(self.dps):
            return series.g_forward(self.g_series, y)

    def g_inverse(self, y) -> BoundedValue:
        with mp.workdps(self.dps):
            return series.refine_g_inverse(self.ginv_series, y)


@lru_cache(maxsize=16)
def _cached_engine(pmap: PinningMap, dps: int) -> OscillationEngine:
    return OscillationEngine(pmap, dps=dps)


def engine_for(pmap: PinningMap, dps=None) -> OscillationEngine:
    """Shared engine with default settings for ``pmap``."""
    return _cached_engine(pmap, resolve_dps(dps))
