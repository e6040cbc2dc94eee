"""Numbers with guaranteed absolute error bounds, and precision control.

All heavy numerics run on :mod:`mpmath` at a configurable number of
significant decimal digits. The default comes from the ``CRITAMP_DPS``
environment variable (60 if unset).
"""

from __future__ import annotations

import functools
import inspect
import os
from dataclasses import dataclass

from mpmath import mp, mpf

DEFAULT_DPS = int(os.environ.get("CRITAMP_DPS", "60"))

# Analytic error bounds are inflated by this factor to absorb rounding.
ROUNDING_INFLATION = mpf("1.01")


def resolve_dps(dps=None):
    return DEFAULT_DPS if dps is None else int(dps)


def with_dps(func):
    """Run ``func`` inside ``mp.workdps(dps)``, where ``dps`` is a keyword.

    The wrapped function gains a ``dps`` keyword argument (default
    :data:`DEFAULT_DPS`) unless it already declares one.
    """
    declares = "dps" in inspect.signature(func).parameters

    @functools.wraps(func)
    def wrapper(*args, dps=None, **kwargs):
        dps = resolve_dps(dps)
        with mp.workdps(dps):
            if declares:
                return func(*args, dps=dps, **kwargs)
            return func(*args, **kwargs)

    return wrapper


def rounding_floor(scale=1, ops=1):
    """Allowance for accumulated rounding at the current working precision."""
    scale = max(abs(mpf(scale)), mpf(1)) if scale is not None else mpf(1)
    return mpf(ops) * scale * mpf(10) ** (-(mp.dps - 3))


@dataclass(frozen=True)
class BoundedValue:
    """A value together with an absolute error bound.

    ``certified`` is False when ``err`` is an estimate rather than a proof,
    e.g. a sequence-increment heuristic or a Monte-Carlo standard error.
    """

    value: object
    err: object
    certified: bool = True

    def __post_init__(self):
        if self.err < 0:
            raise ValueError("error bound must be non-negative")

    @property
    def lo(self):
        return self.value - self.err

    @property
    def hi(self):
        return self.value + self.err

    def contains(self, x, slack=0):
        return abs(x - self.value) <= self.err + slack

    def agrees_with(self, other: "BoundedValue", slack=0):
        """True if the two enclosures overlap."""
        return abs(self.value - other.value) <= self.err + other.err + slack

    def __add__(self, other):
        if isinstance(other, BoundedValue):
            return BoundedValue(self.value + other.value, self.err + other.err,
                                self.certified and other.certified)
        return BoundedValue(self.value + other, self.err, self.certified)

    __radd__ = __add__

    def __neg__(self):
        return BoundedValue(-self.value, self.err, self.certified)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        """Multiply by an exactly known factor."""
        return BoundedValue(self.value * factor, self.err * abs(factor), self.certified)

    def __str__(self):
        return format_bounded(self.value, self.err)


def format_bounded(value, err):
    """Render ``value ± err`` keeping only digits the error justifies."""
    from mpmath import nstr, log10, floor

    if isinstance(value, complex) or getattr(value, "imag", 0):
        return f"{nstr(value, 15)} ± {nstr(err, 2)}"
    value = mpf(value)
    err = mpf(err)
    if err == 0 or value == 0:
        return f"{nstr(value, 20)} ± {nstr(err, 2)}"
    sig = int(floor(log10(abs(value)))) - int(floor(log10(err))) + 1
    sig = min(max(sig, 2), 40)
    return f"{nstr(value, sig)} ± {nstr(err, 2)}"
