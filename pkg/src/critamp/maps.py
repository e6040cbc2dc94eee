"""The polynomial pinning map and its conjugations.

A map is ``f(x) = Σ pᵢxⁱ`` with probability weights ``p₀..p_d``. Weights are
stored as exact fractions, so iterating a rational argument in exact mode
introduces no rounding at all.

For ``d = 2`` the map is conjugate to the logistic family through
``l(x) = (p₀ − p₂x)/λ`` and to the reduced map ``y ↦ y²/(λ(1 + y))`` through
``q = −1/l``, where ``λ = 2 − w``.
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable

from mpmath import expm1, log, mpf

from .bounded import with_dps
from .errors import DomainError, EscapeToInfinity, PoleError

ESCAPE_THRESHOLD = 1e30
SUM_TOLERANCE = Fraction(1, 10**12)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, numbers.Integral)):
        return Fraction(int(value))
    if isinstance(value, float):
        # repr gives the shortest decimal that round-trips, so 0.1 becomes 1/10
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class PinningMap:
    """Validated weights and the constants derived from them.

    Rational constants (``w``, ``lam``, ``c``, ``c_lambda``, ``stable_fixed_point``)
    are exact :class:`~fractions.Fraction` values; transcendental ones such as
    ``gamma`` are evaluated at the current working precision on access.
    """

    weights: tuple

    @property
    def degree(self) -> int:
        return len(self.weights) - 1

    @property
    def w(self) -> Fraction:
        return sum((i * p for i, p in enumerate(self.weights)), Fraction(0))

    @property
    def gamma(self) -> mpf:
        return log(self.degree) / log(_mp(self.w))

    def require_quadratic(self):
        if self.degree != 2:
            raise DomainError("this operation is only defined for quadratic maps (d = 2)")

    @property
    def lam(self) -> Fraction:
        self.require_quadratic()
        return 2 - self.w

    @property
    def lam_mp(self) -> mpf:
        return _mp(self.lam)

    @property
    def c(self) -> Fraction:
        """Scale constant ``p₂/λ`` relating 𝚐 to the amplitude function."""
        return self.weights[2] / self.lam

    @property
    def c_lambda(self) -> Fraction:
        lam = self.lam
        return self.weights[2] * lam / (1 - lam) ** 2

    @property
    def stable_fixed_point(self) -> Fraction:
        self.require_quadratic()
        return self.weights[0] / self.weights[2]

    @property
    def reduced_fixed_point(self) -> Fraction:
        """``λ/(1−λ)``, the image of 1 under ``q``."""
        lam = self.lam
        return lam / (1 - lam)

    @property
    def xstar(self) -> Fraction:
        """``(1−λ)/λ``, the finite fixed point of ``x ↦ λx(1+x)``."""
        lam = self.lam
        return (1 - lam) / lam

    @cached_property
    def shifted_coefficients(self) -> tuple:
        """Coefficients of ``y ↦ f(1 + y) − 1`` (exact)."""
        from math import comb

        d = self.degree
        out = [sum((p * comb(i, k) for i, p in enumerate(self.weights) if i >= k), Fraction(0))
               for k in range(d + 1)]
        out[0] -= 1
        return tuple(out)

    def __call__(self, x):
        """Evaluate ``f`` by Horner's rule in the arithmetic of ``x``."""
        weights = self.weights if isinstance(x, (Fraction, int)) else self.weights_mp
        acc = weights[-1]
        for p in reversed(weights[:-1]):
            acc = acc * x + p
        return acc

    def derivative(self, x):
        weights = self.weights if isinstance(x, (Fraction, int)) else self.weights_mp
        acc = 0
        for i in range(self.degree, 0, -1):
            acc = acc * x + i * weights[i]
        return acc

    @property
    def weights_mp(self) -> tuple:
        return tuple(_mp(p) for p in self.weights)

    def to_dict(self) -> dict:
        return {"weights": [str(p) for p in self.weights]}


def _mp(value: Fraction) -> mpf:
    return mpf(value.numerator) / value.denominator


def new_map(weights: Iterable) -> PinningMap:
    """Validate a weight list ``[p₀, …, p_d]`` and build the map.

    Weights are converted to exact fractions (floats through their shortest
    decimal form). A sum that misses 1 by at most 10⁻¹² is treated as rounding
    in the input and the weights are rescaled to sum to 1 exactly.
    """
    weights = [_as_fraction(p) for p in weights]
    if len(weights) < 3:
        raise DomainError("need at least three weights (degree d ≥ 2)")
    if any(p < 0 for p in weights):
        raise DomainError("weights must be non-negative")
    total = sum(weights)
    if abs(total - 1) > SUM_TOLERANCE:
        raise DomainError(f"weights sum to {float(total)!r}, not 1")
    if total != 1:
        weights = [p / total for p in weights]
    if weights[-1] == 0:
        raise DomainError("leading weight p_d must be positive")
    pmap = PinningMap(tuple(weights))
    if pmap.w <= 1:
        raise DomainError(f"mean offspring w = {float(pmap.w)} must exceed 1")
    return pmap


def load_map(path) -> PinningMap:
    """Read ``{"weights": [p0, ..., pd]}`` from a JSON file."""
    data = json.loads(Path(path).read_text())
    if "weights" not in data:
        raise DomainError(f"{path}: missing 'weights' key")
    return new_map(data["weights"])


def iterate(pmap: PinningMap, x, n: int, escape=ESCAPE_THRESHOLD):
    """Return ``f_n(x)``; ``n = 0`` is the identity.

    Fraction and integer arguments are iterated exactly. An orbit whose modulus
    exceeds ``escape`` raises :class:`EscapeToInfinity`.
    """
    if n < 0:
        raise DomainError("iteration count must be non-negative")
    for step in range(n):
        if abs(x) > escape:
            raise EscapeToInfinity(step, x, escape)
        x = pmap(x)
    if abs(x) > escape:
        raise EscapeToInfinity(n, x, escape)
    return x


def to_logistic(pmap: PinningMap, x):
    """``l(x) = (p₀ − p₂x)/λ``, conjugating ``f`` to ``z ↦ λz(1 − z)``."""
    lam = pmap.lam
    p0, p2 = pmap.weights[0], pmap.weights[2]
    if not isinstance(x, (Fraction, int)):
        lam, p0, p2 = _mp(lam), _mp(p0), _mp(p2)
    return (p0 - p2 * x) / lam


def from_logistic(pmap: PinningMap, z):
    lam = pmap.lam
    p0, p2 = pmap.weights[0], pmap.weights[2]
    if not isinstance(z, (Fraction, int)):
        lam, p0, p2 = _mp(lam), _mp(p0), _mp(p2)
    return (p0 - lam * z) / p2


def logistic(pmap: PinningMap, z):
    lam = pmap.lam if isinstance(z, (Fraction, int)) else pmap.lam_mp
    return lam * z * (1 - z)


def q_transform(pmap: PinningMap, x):
    """``q(x) = −1/l(x)``; pole at the stable fixed point ``p₀/p₂``."""
    z = to_logistic(pmap, x)
    if z == 0:
        raise PoleError("q has a pole at the stable fixed point p0/p2")
    return -1 / z


def q_inverse(pmap: PinningMap, y):
    """``q⁻¹(y) = (p₀ + λ/y)/p₂``; pole at ``y = 0``."""
    if y == 0:
        raise PoleError("q^{-1} has a pole at 0")
    return from_logistic(pmap, -1 / y)


def reduced_map(pmap: PinningMap, y):
    """``y ↦ y²/(λ(1 + y))``, the map ``q∘f∘q⁻¹``."""
    lam = pmap.lam if isinstance(y, (Fraction, int)) else pmap.lam_mp
    if 1 + y == 0:
        raise PoleError("reduced map has a pole at y = -1")
    return y * y / (lam * (1 + y))


@with_dps
def delta(pmap: PinningMap, h):
    """``δ(h) = λ/(1−λ) − q(eʰ)``, computed without cancellation.

    Uses ``δ(h) = λp₂(eʰ − 1)/((1−λ)(p₂eʰ − p₀))``, so ``δ(h)/h → c_λ``.
    """
    lam = pmap.lam_mp
    p0, p2 = _mp(pmap.weights[0]), _mp(pmap.weights[2])
    h = mpf(h)
    e = expm1(h)
    return lam * p2 * e / ((1 - lam) * (p2 * (1 + e) - p0))


def v_of_delta(pmap: PinningMap, d):
    """Argument of 𝚐⁻¹ that corresponds to a shift ``δ`` below ``λ/(1−λ)``.

    ``v(δ) = ((1−λ)/λ)²·δ/(1 − δ(1−λ)/λ)``; it satisfies ``v(δ(h)) = c·(eʰ − 1)``.
    """
    lam = pmap.lam_mp
    ratio = (1 - lam) / lam
    if d * ratio >= 1:
        raise DomainError("δ must stay below λ/(1−λ)")
    return ratio**2 * d / (1 - d * ratio)
