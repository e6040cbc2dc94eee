"""Truncated series for the Böttcher-type functions 𝚐, 𝚐⁻¹ and φ.

Three functions carry all of the oscillation machinery for a quadratic map
with λ = 2 − w:

* 𝚐, the entire solution of ``𝚐(wy) = A_quad(𝚐(y))`` with ``A_quad(y) = wy + λy²``
  and ``𝚐(0) = 0, 𝚐'(0) = 1``. Its Taylor coefficients are positive.
* 𝚐⁻¹, its inverse near zero.
* φ, the solution of ``φ(y²) = λφ(y)(1 + φ(y))`` with a simple pole at zero,
  ``φ(y) = 1/(λy) − 1/2 + (odd powers of y)``.

Each series is produced uncertified by an ``expand_*`` function and becomes
usable for rigorous evaluation once a ``certify_*`` function has checked a
contraction argument on a disk and installed an :class:`Envelope`. Point
evaluations are then sharpened by pulling the argument towards zero through
exact inverse branches (:func:`refine_g_inverse`, :func:`refine_phi`).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

import sympy
from mpmath import mp, mpf, sqrt

from .bounded import ROUNDING_INFLATION, BoundedValue, rounding_floor
from .errors import CertificationError, DomainError, PoleError
from .maps import PinningMap


# -- polynomial helpers on coefficient lists (lowest degree first) ----------

def horner(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_mul(a: Sequence, b: Sequence, limit: Optional[int] = None):
    size = len(a) + len(b) - 1
    if limit is not None:
        size = min(size, limit + 1)
    out = [mpf(0)] * size
    for i, x in enumerate(a):
        if x == 0 or i >= size:
            continue
        for j, y in enumerate(b[: size - i]):
            out[i + j] += x * y
    return out


def poly_add(a: Sequence, b: Sequence):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def poly_scale_arg(coeffs: Sequence, factor):
    """Coefficients of ``x ↦ p(factor·x)``."""
    return [c * factor**i for i, c in enumerate(coeffs)]


def abs_norm(coeffs: Sequence, radius) -> mpf:
    """Sum of |cᵢ|·radiusⁱ, an upper bound for sup |p| on the closed disk."""
    radius = mpf(radius)
    return sum((abs(c) * radius**i for i, c in enumerate(coeffs)), mpf(0))


def derivative(coeffs: Sequence):
    return [i * c for i, c in enumerate(coeffs)][1:]


def compose(outer: Sequence, inner: Sequence, limit: int):
    """Coefficients of ``outer(inner(x))`` through degree ``limit``."""
    out = [mpf(0)] * (limit + 1)
    power = [mpf(1)]
    for k, c in enumerate(outer):
        if k:
            power = poly_mul(power, inner, limit)
        for i, p in enumerate(power):
            out[i] += c * p
    return out


def revert(coeffs: Sequence, order: int):
    """Compositional inverse of a series with c₀ = 0 and c₁ = 1."""
    if coeffs[0] != 0 or coeffs[1] != 1:
        raise DomainError("reversion needs a series of the form x + O(x²)")
    inv = [mpf(0), mpf(1)]
    for j in range(2, order + 1):
        inv.append(mpf(0))
        inv[j] = -compose(coeffs[: j + 1], inv, j)[j]
    return inv


# -- data types ---------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    """Certified remainder bound ``|r(x)| ≤ C·|x|^k`` for ``|x| ≤ x0``."""

    C: mpf
    k: int
    x0: mpf
    a: Optional[mpf] = None

    def bound(self, x):
        if abs(x) > self.x0:
            raise DomainError(f"|x| = {abs(x)} outside certified radius {self.x0}")
        return self.C * abs(x) ** self.k


@dataclass(frozen=True)
class BoundedSeries:
    """Truncated Taylor or Laurent series, optionally with a certified envelope.

    For ``kind == "laurent"`` the function is ``pole/x + Σ coefficients[i]·xⁱ``
    and the envelope bounds ``|f(x) − truncation(x)|`` directly, i.e. it
    already includes the factor x^k.
    """

    name: str
    kind: str
    coefficients: tuple
    lam: mpf
    order: int
    pole: Optional[mpf] = None
    envelope: Optional[Envelope] = None

    @property
    def w(self):
        return 2 - self.lam

    @property
    def positive(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    @property
    def certified(self) -> bool:
        return self.envelope is not None

    def __call__(self, x):
        if self.kind == "laurent":
            if x == 0:
                raise PoleError(f"{self.name} has a pole at 0")
            return self.pole / x + horner(self.coefficients, x)
        return horner(self.coefficients, x)

    def evaluate(self, x) -> BoundedValue:
        """Truncation value with the envelope as error bound."""
        if self.envelope is None:
            raise CertificationError(f"{self.name} series has no certified envelope")
        value = self(x)
        err = self.envelope.bound(x) * ROUNDING_INFLATION
        err += rounding_floor(value, ops=2 * len(self.coefficients))
        return BoundedValue(value, err)

    def with_envelope(self, envelope: Envelope) -> "BoundedSeries":
        return dataclasses.replace(self, envelope=envelope)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "kind": self.kind,
            "order": self.order,
            "lambda": str(self.lam),
            "coefficients": [str(c) for c in self.coefficients],
            "positive": self.positive,
        }
        if self.pole is not None:
            out["pole"] = str(self.pole)
        if self.envelope is not None:
            env = self.envelope
            out["envelope"] = {"C": str(env.C), "k": env.k, "x0": str(env.x0),
                               "a": None if env.a is None else str(env.a)}
        return out


def _lam_of(pmap_or_lam):
    if isinstance(pmap_or_lam, PinningMap):
        pmap_or_lam.require_quadratic()
        return pmap_or_lam.lam_mp
    return mpf(pmap_or_lam)


# -- the inverse-branch maps --------------------------------------------------

def A_quad(y, lam):
    return (2 - lam) * y + lam * y * y


def A_inv(y, lam):
    """Branch of A_quad⁻¹ fixing 0; increasing and concave on y ≥ 0."""
    w = 2 - lam
    return (sqrt(4 * y * lam + w * w) - w) / (2 * lam)


def Q_sqrt(x, lam):
    """Branch of the inverse of x ↦ λx(1+x) that fixes (1−λ)/λ."""
    return (sqrt(1 + 4 * x / lam) - 1) / 2


def Q_sqrt_slope(x, lam):
    return 1 / (lam * sqrt(1 + 4 * x / lam))


# -- 𝚐 -------------------------------------------------------------------------

def g_coefficients(lam, order: int):
    lam = mpf(lam)
    w = 2 - lam
    g = [mpf(0), mpf(1)]
    for j in range(2, order + 1):
        conv = sum((g[i] * g[j - i] for i in range(1, j)), mpf(0))
        g.append(lam * conv / (w**j - w))
    return g


def expand_g(pmap, order: int) -> BoundedSeries:
    """Taylor coefficients of 𝚐 through degree ``order`` (no envelope yet)."""
    if order < 2:
        raise DomainError("order must be at least 2")
    lam = _lam_of(pmap)
    return BoundedSeries("g", "taylor", tuple(g_coefficients(lam, order)), lam, order)


def g_residual(series: BoundedSeries):
    """Residual ``w·g_n(x/w) + λ·g_n(x/w)² − g_n(x)`` as ``x^{n+1}·Q_resid(x)``.

    Returns the full residual coefficient list and ``Q_resid``.
    """
    lam, w, n = series.lam, series.w, series.order
    scaled = poly_scale_arg(series.coefficients, 1 / w)
    resid = poly_add([w * c for c in scaled], [lam * c for c in poly_mul(scaled, scaled)])
    resid = poly_add(resid, [-c for c in series.coefficients])
    return resid, resid[n + 1:]


def _g_certificate_terms(series: BoundedSeries, eps):
    lam, w, n = series.lam, series.w, series.order
    _, Q = g_residual(series)
    scaled = poly_scale_arg(series.coefficients, 1 / w)
    p = [2 * lam * w ** (-n - 1) * c for c in scaled]
    p[0] += w ** (-n)
    P = abs_norm(p, eps)
    Q0 = abs(Q[0])
    K = lam * w ** (-2 * (n + 1)) * mpf(eps) ** (n + 1) * Q0
    return P, K, Q0, abs_norm(Q, eps)


def certify_g(series: BoundedSeries, a, eps) -> BoundedSeries:
    """Install the envelope ``|𝚐 − g_n| ≤ a|Q_resid(0)|·|x|^{n+1}`` on ``|x| ≤ eps``.

    Writing 𝚐 = g_n + x^{n+1}q, the functional equation becomes the fixed-point
    problem ``q(x) = Q_resid(x) + p(x)q(x/w) + λw^{−2n−2}x^{n+1}q(x/w)²``. The
    ball ``‖q‖ ≤ a|Q_resid(0)|`` is mapped into itself when
    ``‖Q_resid‖ ≤ a·c_eps·|Q_resid(0)|`` with
    ``c_eps = 1 − ‖p‖ − aλw^{−2(n+1)}eps^{n+1}|Q_resid(0)| > 0``, and the map is a
    contraction there when ``‖p‖ + 2aλw^{−2(n+1)}eps^{n+1}|Q_resid(0)| < 1``.
    Norms are coefficient-magnitude sums, which dominate the sup on the disk.
    """
    if series.name != "g":
        raise DomainError("certify_g expects a series from expand_g")
    a, eps = mpf(a), mpf(eps)
    P, K, Q0, Qnorm = _g_certificate_terms(series, eps)
    c_eps = 1 - P - a * K
    if c_eps <= 0:
        raise CertificationError(f"c_eps = {mp.nstr(c_eps, 6)} is not positive "
                                 f"(order {series.order}, eps {mp.nstr(eps, 6)})")
    if Qnorm > a * c_eps * Q0:
        raise CertificationError(f"‖Q_resid‖ = {mp.nstr(Qnorm, 6)} exceeds "
                                 f"a·c_eps·|Q_resid(0)| = {mp.nstr(a * c_eps * Q0, 6)}")
    if P + 2 * a * K >= 1:
        raise CertificationError("fixed-point map is not a contraction on the ball")
    return series.with_envelope(Envelope(a * Q0, series.order + 1, eps, a))


def _smallest_a(P, K, rho):
    """Smallest a with a(1 − P − aK) ≥ rho, slightly inflated."""
    one = 1 - P
    if one <= 0:
        return None
    if K == 0:
        return rho / one * (1 + mpf("1e-9"))
    disc = one * one - 4 * K * rho
    if disc < 0:
        return None
    return (one - sqrt(disc)) / (2 * K) * (1 + mpf("1e-9"))


def certify_g_auto(series: BoundedSeries, eps, a=None) -> BoundedSeries:
    """Certify on ``|x| ≤ eps`` with the smallest admissible ``a`` unless one is given."""
    if a is None:
        P, K, Q0, Qnorm = _g_certificate_terms(series, mpf(eps))
        a = _smallest_a(P, K, Qnorm / Q0)
        if a is None:
            raise CertificationError(f"no admissible a for eps = {eps}")
    return certify_g(series, a, eps)


def search_g_certificate(series: BoundedSeries, x_target, a_grid=(None, 1.1, 2, 5),
                         shrink=mpf("0.9")) -> BoundedSeries:
    """Largest ``eps`` in ``2·x_target, 0.9·2·x_target, …`` that certifies.

    The first ``a`` tried is the smallest admissible one; the fixed grid
    follows as a fallback.
    """
    eps = 2 * mpf(x_target)
    while eps > mpf(x_target) * mpf("1e-6"):
        for a in a_grid:
            try:
                return certify_g_auto(series, eps, a)
            except CertificationError:
                continue
        eps *= shrink
    raise CertificationError(f"could not certify {series.name} near {x_target}")


# -- 𝚐⁻¹ -----------------------------------------------------------------------

def invert_g(g_series: BoundedSeries, order: Optional[int] = None, radius=2,
             pieces: int = 256) -> BoundedSeries:
    """Reverted series ``h_n`` for 𝚐⁻¹ with an envelope on ``[0, radius]``.

    For ``y = 𝚐(x)`` the remainder splits as
    ``x − h_n(g_n(x)) − [h_n(𝚐(x)) − h_n(g_n(x))]``. The first part is
    ``x^{n+1}S(x)`` for a polynomial S and the second is at most
    ``sup|h_n'|·C·x^{n+1}`` by the 𝚐 envelope. Since ``y ≥ g_n(x) ≥ x`` and
    ``x/g_n(x)`` decreases, splitting ``[0, X]`` into pieces gives a bound
    ``C'·y^{n+1}`` that is valid on every piece. The bracket is only used on the
    positive axis, so the envelope is stated for ``0 ≤ y ≤ radius``.
    """
    env = g_series.envelope
    if env is None:
        raise CertificationError("𝚐 series must be certified before inversion")
    n = g_series.order if order is None else order
    if n > g_series.order:
        raise DomainError("inverse order cannot exceed the 𝚐 order")
    radius = mpf(radius)
    g = list(g_series.coefficients)
    h = revert(g[: n + 1], n)
    composed = compose(h, g, n * g_series.order)
    S = [-c for c in composed[n + 1:]]
    # x ≤ X := g_n⁻¹(radius) since g_n ≤ 𝚐 on the positive axis.
    X = _solve_increasing(lambda x: horner(g, x) - radius, mpf(0), radius)
    if X > env.x0:
        raise CertificationError(f"bracket for 𝚐 needed up to {X}, certified only to {env.x0}")
    dh = derivative(h)
    C = env.C
    worst = mpf(0)
    for i in range(pieces):
        left, right = X * i / pieces, X * (i + 1) / pieces
        ratio = mpf(1) if i == 0 else (left / horner(g, left)) ** (n + 1)
        upper = horner(g, right) + C * right ** (g_series.order + 1)
        # the 𝚐 envelope has degree order+1 ≥ n+1; on x ≤ X it is ≤ C·X^{order−n}·x^{n+1}
        bracket = C * right ** (g_series.order - n)
        worst = max(worst, ratio * (abs_norm(S, right) + bracket * abs_norm(dh, upper)))
    worst *= ROUNDING_INFLATION
    return BoundedSeries("g_inverse", "taylor", tuple(h), g_series.lam, n,
                         envelope=Envelope(worst, n + 1, radius))


def _solve_increasing(fn, lo, hi, iterations=200):
    while fn(hi) < 0:
        hi *= 2
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return hi


def refine_g_inverse(approx: BoundedSeries, y, n_back: Optional[int] = None,
                     tol=None) -> BoundedValue:
    """𝚐⁻¹(y) for real y ≥ 0 via ``𝚐⁻¹(y) = wⁿ·𝚐⁻¹((A_inv)^{∘n}(y))``.

    The pulled-back argument t is evaluated with the truncated inverse and the
    envelope gives ``err = wⁿ·C·t^k``, which never exceeds ``C·y^k/w^{(k−1)n}``
    because A_inv(y) ≤ y/w. With ``n_back=None`` the depth grows until the error
    is below ``tol`` (default: working precision) or stops shrinking.
    """
    env = approx.envelope
    if env is None:
        raise CertificationError("g_inverse series has no envelope")
    y = mpf(y)
    if y < 0:
        raise DomainError("refine_g_inverse needs y ≥ 0")
    if y == 0:
        return BoundedValue(mpf(0), mpf(0))
    lam = approx.lam
    if n_back is not None:
        t = y
        for _ in range(n_back):
            t = A_inv(t, lam)
        return _g_inverse_at(approx, t, n_back)
    tol = mpf(10) ** (-mp.dps + 5) if tol is None else mpf(tol)
    t, n, best = y, 0, None
    while n < 400:
        if t <= env.x0:
            current = _g_inverse_at(approx, t, n)
            if best is not None and current.err >= best.err:
                return best
            best = current
            if best.err <= tol * max(1, abs(best.value)):
                return best
        t = A_inv(t, lam)
        n += 1
    if best is None:
        raise DomainError("argument never entered the certified radius")
    return best


def _g_inverse_at(approx, t, n):
    env = approx.envelope
    if t > env.x0:
        raise DomainError(f"pulled-back argument {mp.nstr(t, 8)} exceeds certified radius")
    scale = approx.w**n
    value = scale * approx(t)
    err = scale * env.C * t**env.k * ROUNDING_INFLATION
    err += rounding_floor(value, ops=4 * (n + approx.order) + 10)
    return BoundedValue(value, err)


def g_forward(g_series: BoundedSeries, y, n_back: Optional[int] = None) -> BoundedValue:
    """𝚐(y) for real y ≥ 0 via ``𝚐(y) = A_quad^{∘n}(𝚐(y/wⁿ))``.

    Positivity of the coefficients makes ``[g_n(t), g_n(t) + C·t^k]`` a bracket
    for 𝚐(t); A_quad is increasing on the positive axis, so the bracket is
    pushed forward exactly.
    """
    env = g_series.envelope
    if env is None:
        raise CertificationError("𝚐 series has no envelope")
    y = mpf(y)
    if y < 0:
        raise DomainError("g_forward needs y ≥ 0")
    lam, w = g_series.lam, g_series.w
    if n_back is None:
        n_back = 0
        while y / w**n_back > env.x0 or env.C * (y / w**n_back) ** env.k > mpf(10) ** (-mp.dps):
            n_back += 1
            if n_back > 2000:
                break
    t = y / w**n_back
    if t > env.x0:
        raise DomainError("argument outside the certified radius")
    lo = g_series(t)
    hi = lo + env.C * t**env.k
    for _ in range(n_back):
        lo, hi = A_quad(lo, lam), A_quad(hi, lam)
    err = (hi - lo) / 2 * ROUNDING_INFLATION + rounding_floor(hi, ops=4 * n_back + 10)
    return BoundedValue((lo + hi) / 2, err)


# -- φ ------------------------------------------------------------------------

def phi_coefficients(lam, count: int):
    """Regular-part coefficients b₀..b_{count−1} of the Laurent series of φ."""
    lam = mpf(lam)
    b = [mpf(-1) / 2]
    for m in range(1, count):
        lead = b[(m - 1) // 2] if m % 2 else 0
        conv = sum((b[i] * b[m - 1 - i] for i in range(m)), mpf(0))
        b.append((lead - lam * b[m - 1] - lam * conv) / 2)
    return b


def expand_phi(pmap, order: int) -> BoundedSeries:
    """``1/(λx) − 1/2 + p(x)`` with p odd of degree 2·order − 1."""
    if order < 1:
        raise DomainError("order must be at least 1")
    lam = _lam_of(pmap)
    coeffs = phi_coefficients(lam, 2 * order)
    return BoundedSeries("phi", "laurent", tuple(coeffs), lam, order, pole=1 / lam)


def phi_residual(series: BoundedSeries):
    """Polynomials ``p1 = −(2 + 2λx·p(x))`` and ``p0 = −x^{−2n}E``.

    Here ``E = λφ_n(1 + φ_n) − φ_n(x²)`` is the defect of the truncation in
    the functional equation; it vanishes to order 2n.
    """
    lam, n = series.lam, series.order
    b = list(series.coefficients)
    x_phi = [1 / lam] + b
    t = [lam * c for c in poly_mul(x_phi, x_phi)]
    t = poly_add(t, [mpf(0)] + [lam * c for c in x_phi])
    t[0] -= 1 / lam
    for k, c in enumerate(b):
        t = poly_add(t, [mpf(0)] * (2 * k + 2) + [-c])
    p0 = [-c for c in t[2 * n + 2:]]
    x_p = [mpf(0), mpf(0)] + b[1:]
    p1 = [-2 * lam * c for c in x_p]
    p1[0] -= 2
    return p0, p1, t[: 2 * n + 2]


def _phi_certificate_terms(series: BoundedSeries, eps):
    p0, p1, _ = phi_residual(series)
    tail = list(p1)
    tail[0] += 2
    low = 2 - abs_norm(tail, eps)
    if low <= 0:
        raise CertificationError("cannot bound 1/p1 on the disk")
    inv = 1 / low
    r0 = abs(p0[0] / p1[0])
    K = inv * mpf(eps) ** (2 * series.order + 2)
    return r0, K, abs_norm(p0, eps) * inv


def certify_phi(series: BoundedSeries, a, eps) -> BoundedSeries:
    """Install ``|φ − φ_n| ≤ a·r0·|x|^{2n+1}`` on ``0 < x ≤ eps`` (eps ≤ 1).

    Writing φ = φ_n + x^{2n+1}r gives
    ``r = −p0/p1 + x^{2n+2}(λr² − r(x²))/p1``. With ``r0 = |p0(0)/p1(0)|`` and
    ``C_eps = 1 − ‖1/p1‖eps^{2n+2}(aλr0 + 1)``, the ball ``‖r‖ ≤ a·r0`` is
    invariant when ``‖p0/p1‖ ≤ a·C_eps·r0``. It is also required that the map is
    a contraction, ``‖1/p1‖eps^{2n+2}(2aλr0 + 1) < 1``.
    """
    if series.name != "phi":
        raise DomainError("certify_phi expects a series from expand_phi")
    a, eps = mpf(a), mpf(eps)
    if eps > 1:
        raise CertificationError("eps must be at most 1 so that x² stays in the disk")
    r0, K, ratio = _phi_certificate_terms(series, eps)
    lam = series.lam
    C_eps = 1 - K * (a * lam * r0 + 1)
    if C_eps <= 0:
        raise CertificationError(f"C_eps = {mp.nstr(C_eps, 6)} is not positive")
    if ratio > a * C_eps * r0:
        raise CertificationError(f"‖p0/p1‖ = {mp.nstr(ratio, 6)} exceeds "
                                 f"a·C_eps·r0 = {mp.nstr(a * C_eps * r0, 6)}")
    if K * (2 * a * lam * r0 + 1) >= 1:
        raise CertificationError("fixed-point map is not a contraction on the ball")
    return series.with_envelope(Envelope(a * r0, 2 * series.order + 1, eps, a))


def certify_phi_auto(series: BoundedSeries, eps, a=None) -> BoundedSeries:
    if a is None:
        r0, K, ratio = _phi_certificate_terms(series, mpf(eps))
        lam = series.lam
        # a·r0·(1 − K − aKλr0) ≥ ratio
        a = _smallest_a(K, K * lam * r0, ratio / r0)
        if a is None:
            raise CertificationError(f"no admissible a for eps = {eps}")
    return certify_phi(series, a, eps)


def search_phi_certificate(series: BoundedSeries, x_target, a_grid=(None, 1.1, 2, 5),
                           shrink=mpf("0.9")) -> BoundedSeries:
    eps = min(2 * mpf(x_target), mpf(1))
    while eps > mpf(x_target) * mpf("1e-6"):
        for a in a_grid:
            try:
                return certify_phi_auto(series, eps, a)
            except CertificationError:
                continue
        eps *= shrink
    raise CertificationError(f"could not certify phi near {x_target}")


def refine_phi(approx: BoundedSeries, y, n_back: Optional[int] = None,
               tol=None, log_y=None) -> BoundedValue:
    """φ(y) for 0 < y < 1 via ``φ(y) = Q_sqrt^{∘n}(φ(y^{2ⁿ}))``.

    The starting error is the envelope at ``z = y^{2ⁿ}``. Because Q_sqrt is
    increasing and concave, an enclosure ``[v − e, v + e]`` is mapped into
    ``[Q(v) − Q'(v − e)·e, Q(v) + Q'(v − e)·e]``. This is never worse than the
    uniform bound ``C·z^k/λⁿ`` that follows from ``Q' ≤ 1/λ``.

    ``log_y`` may be supplied instead of an exact y so that ``y^{2ⁿ}`` is
    formed as ``exp(2ⁿ·log_y)`` without loss of relative accuracy.
    """
    env = approx.envelope
    if env is None:
        raise CertificationError("phi series has no envelope")
    from mpmath import exp, log, ldexp

    if log_y is None:
        y = mpf(y)
        if not 0 < y < 1:
            raise DomainError("refine_phi needs 0 < y < 1")
        log_y = log(y)
    else:
        log_y = mpf(log_y)
        if log_y >= 0:
            raise DomainError("refine_phi needs log y < 0")
    if n_back is None:
        tol = mpf(10) ** (-mp.dps + 5) if tol is None else mpf(tol)
        n, best = 0, None
        while n < 200:
            z = exp(ldexp(log_y, n))
            if z <= env.x0:
                current = _phi_at(approx, log_y, n)
                if best is not None and current.err >= best.err:
                    return best
                best = current
                if best.err <= tol * abs(best.value):
                    return best
            n += 1
        if best is None:
            raise DomainError("argument never entered the certified radius")
        return best
    return _phi_at(approx, log_y, n_back)


def _phi_at(approx, log_y, n):
    from mpmath import exp, ldexp

    env = approx.envelope
    lam = approx.lam
    z = exp(ldexp(log_y, n))
    if z > env.x0:
        raise DomainError(f"y^(2^{n}) = {mp.nstr(z, 8)} exceeds certified radius {env.x0}")
    value = approx(z)
    err = env.C * z**env.k
    if value - err <= 0:
        raise DomainError("enclosure of φ is not positive on the pullback orbit")
    for _ in range(n):
        slope = Q_sqrt_slope(value - err, lam)
        value = Q_sqrt(value, lam)
        err = slope * err
    err = err * ROUNDING_INFLATION + rounding_floor(value, ops=6 * n + 4 * approx.order + 10)
    return BoundedValue(value, err)


def phi_uniform_bound(approx: BoundedSeries, y, n_back: int):
    """The cruder bound ``C·y^{2ⁿk}/λⁿ`` for comparison with :func:`refine_phi`."""
    env = approx.envelope
    return env.C * mpf(y) ** (2**n_back * env.k) / approx.lam**n_back


# -- exact coefficients --------------------------------------------------------

W_SYMBOL = sympy.Symbol("w", positive=True)
LAMBDA_SYMBOL = sympy.Symbol("lambda", positive=True)


def symbolic_g(order: int, w=W_SYMBOL):
    """Exact coefficients g₀..g_order of 𝚐 as rational functions of ``w``."""
    lam = 2 - w
    g = [sympy.Integer(0), sympy.Integer(1)]
    for j in range(2, order + 1):
        conv = sum(g[i] * g[j - i] for i in range(1, j))
        g.append(sympy.factor(lam * conv / (w**j - w)))
    return g


def symbolic_g_inverse(order: int, w=W_SYMBOL):
    """Exact coefficients of 𝚐⁻¹, obtained by reverting :func:`symbolic_g`."""
    g = symbolic_g(order, w)
    h = [sympy.Integer(0), sympy.Integer(1)]
    for j in range(2, order + 1):
        # coefficient of x^j in g(h(x)) with the unknown h_j set to zero
        power, total = [sympy.Integer(1)], sympy.Integer(0)
        for i in range(1, j + 1):
            power = [sum((power[a] * h[b] for a in range(len(power)) for b in range(len(h))
                          if a + b == k), sympy.Integer(0)) for k in range(j + 1)]
            total += g[i] * power[j]
        h.append(sympy.factor(sympy.cancel(-total)))
    return h


def symbolic_phi(order: int, lam=LAMBDA_SYMBOL):
    """Exact regular-part coefficients b₀..b_{2·order−1} of φ in ``λ``."""
    b = [sympy.Rational(-1, 2)]
    for m in range(1, 2 * order):
        lead = b[(m - 1) // 2] if m % 2 else 0
        conv = sum(b[i] * b[m - 1 - i] for i in range(m))
        b.append(sympy.factor(sympy.expand((lead - lam * b[m - 1] - lam * conv) / 2)))
    return b
