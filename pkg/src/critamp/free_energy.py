"""Free energy ``F(h) = lim d^{−n} log f_n(eʰ)`` with a certified truncation bound.

Writing ``f(x) = p_d·x^d·(1 + u(x))`` with ``u(x) = Σ_{j<d} (p_j/p_d)x^{j−d}``
turns the limit into the convergent series

    F(h) = log p_d/(d−1) + h + Σ_{i≥0} d^{−(i+1)} log(1 + u(f_i(eʰ))).

Once an iterate exceeds the escape radius ``c`` (where ``|u| ≤ 1/2`` and the
orbit is increasing), each later term is at most ``2|u(x_i)| ≤ 2B/x_i`` and the
tail after N terms is bounded by ``2B·d^{−N}/((d−1)x_N)``.
"""

from __future__ import annotations

from functools import lru_cache

from mpmath import exp, expm1, log, log1p, mp, mpf, findroot

from .bounded import ROUNDING_INFLATION, BoundedValue, rounding_floor, with_dps
from .errors import ConvergenceError, DomainError, PrecisionError
from .maps import PinningMap, _mp

ITERATION_CAP = 200_000


def _u(pmap: PinningMap, x):
    d = pmap.degree
    pd = pmap.weights_mp[d]
    return sum(pmap.weights_mp[j] / pd * x ** (j - d) for j in range(d))


@lru_cache(maxsize=64)
def _escape_constants(pmap: PinningMap, dps: int):
    with mp.workdps(dps):
        d = pmap.degree
        pd = pmap.weights_mp[d]
        ratios = [pmap.weights_mp[j] / pd for j in range(d)]

        def excess(c):
            return sum(r * c ** (j - d) for j, r in enumerate(ratios)) - mpf(1) / 2

        lo, hi = mpf(1), mpf(2)
        if excess(lo) > 0:
            while excess(hi) > 0:
                hi *= 2
            root = findroot(excess, (lo, hi), solver="anderson")
        else:
            root = lo
        c = max(mpf(1), root, (2 / pd) ** (mpf(1) / (d - 1))) * (1 + mpf("1e-12"))
        bound = sum(r * c ** (j - d + 1) for j, r in enumerate(ratios))
        return c, bound


def escape_radius(pmap: PinningMap) -> mpf:
    """Radius beyond which ``|u| ≤ 1/2`` and ``f(x) ≥ x`` on the positive axis."""
    return _escape_constants(pmap, mp.dps)[0]


@with_dps
def free_energy(pmap: PinningMap, h, tol=None, *, cap: int = ITERATION_CAP,
                dps=None) -> BoundedValue:
    """F(h) to absolute accuracy ``tol``; exactly 0 for ``h ≤ 0``.

    The default ``tol`` is ``10^{15−dps}``.
    """
    h = mpf(h)
    if h <= 0:
        return BoundedValue(mpf(0), mpf(0))
    tol = mpf(10) ** (15 - dps) if tol is None else mpf(tol)
    if tol < mpf(10) ** (-dps + 8):
        raise PrecisionError(f"tol {tol} is below what {dps} digits support")
    c, bound = _escape_constants(pmap, dps)
    d = pmap.degree
    pd = pmap.weights_mp[d]
    total = log(pd) / (d - 1) + h
    x = exp(h)
    weight = mpf(1) / d
    for step in range(cap):
        total += weight * log1p(_u(pmap, x))
        weight /= d
        if x >= c:
            # the next term index is step + 1; the tail starts at N = step + 1
            tail = 2 * bound * weight * d / ((d - 1) * x)
            if tail <= tol / 2:
                err = tail * ROUNDING_INFLATION + rounding_floor(total, ops=4 * step + 20)
                return BoundedValue(total, err)
        x = pmap(x)
    raise ConvergenceError(f"orbit of e^h did not escape within {cap} iterations; "
                           "increase cap or precision")


@with_dps
def boettcher_B(pmap: PinningMap, x, tol=None, *, dps=None) -> BoundedValue:
    """``𝓑(x) = exp(F(log x))`` for real ``x > 1``."""
    x = mpf(x)
    if x <= 1:
        raise DomainError("boettcher_B needs x > 1")
    F = free_energy(pmap, log(x), tol, dps=dps)
    value = exp(F.value)
    return BoundedValue(value, value * expm1(F.err) + rounding_floor(value))


@with_dps
def free_energy_near_critical(pmap: PinningMap, h, tol=None, *, engine=None,
                              dps=None) -> BoundedValue:
    """F(h) through the inverse-Böttcher route ``F(h) = ℓ(δ(h))``.

    ``engine`` is an :class:`~critamp.oscillation.OscillationEngine` for
    ``pmap``; one is built (and cached) when omitted.
    """
    from .maps import delta
    from .oscillation import engine_for

    pmap.require_quadratic()
    h = mpf(h)
    if h <= 0:
        return BoundedValue(mpf(0), mpf(0))
    engine = engine or engine_for(pmap, dps=dps)
    d = delta(pmap, h, dps=dps)
    if d >= _mp(pmap.reduced_fixed_point):
        raise DomainError("h is outside the certified range of the inverse route")
    return engine.ell(d, tol=tol)
