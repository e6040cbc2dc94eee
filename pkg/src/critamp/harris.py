"""Harris generating function ψ(s) = E[e^{sW}] and the Harris function L.

``W = lim W_n/wⁿ`` for a Galton–Watson process with offspring law ``p₀..p_d``.
Since ``f_n(eʰ) = E[e^{hW_n}]``, ψ is the limit of ``f_n(e^{s/wⁿ})``. The
Harris function ``L(log s) = s^{−γ}F(log ψ(s))`` is log w-periodic and equals
the critical amplitude Ω of the free energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from mpmath import expm1, log, log1p, mp, mpf

from .bounded import ROUNDING_INFLATION, BoundedValue, rounding_floor, with_dps
from .errors import ConvergenceError, DomainError, PopulationOverflow
from .free_energy import free_energy
from .maps import PinningMap, _mp

PSI_CAP = 2000


def _shifted_orbit(coeffs, y, n):
    """``f_n(1 + y) − 1`` using the coefficients of ``f(1 + y) − 1``."""
    for _ in range(n):
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * y + c
        y = acc
    return y


@with_dps
def psi_direct(pmap: PinningMap, s, n: Optional[int] = None, tol=None, *,
               dps=None) -> BoundedValue:
    """``ψ(s) ≈ f_n(e^{s/wⁿ})`` with a heuristic error from successive terms.

    The orbit is computed in the shifted variable ``y = x − 1`` so that tiny
    arguments ``s/wⁿ`` keep full relative precision. The error
    ``2|v_n − v_{n−1}|/(w − 1)`` assumes geometric convergence at rate 1/w;
    the result is flagged ``certified=False``. With ``n=None`` the depth is
    doubled until this estimate falls below ``tol``.
    """
    s = mpf(s)
    if s == 0:
        return BoundedValue(mpf(1), mpf(0))
    w = _mp(pmap.w)
    coeffs = [_mp(c) for c in pmap.shifted_coefficients]

    def value(k):
        return _shifted_orbit(coeffs, expm1(s / w**k), k)

    def estimate(k):
        vk, prev = value(k), value(k - 1)
        return vk, 2 * abs(vk - prev) / (w - 1)

    if n is not None:
        if n < 1:
            raise DomainError("n must be at least 1")
        v, err = estimate(n)
        return BoundedValue(1 + v, err + rounding_floor(1 + v, ops=4 * n), certified=False)
    tol = mpf(10) ** (-dps // 2) if tol is None else mpf(tol)
    k = 16
    while k <= PSI_CAP:
        v, err = estimate(k)
        if err <= tol * max(1, abs(1 + v)):
            return BoundedValue(1 + v, err + rounding_floor(1 + v, ops=4 * k), certified=False)
        k *= 2
    raise ConvergenceError(f"ψ({s}) did not stabilize within {PSI_CAP} generations")


def psi_boettcher(engine, s) -> BoundedValue:
    """ψ(s) through the inverse Böttcher coordinate.

    ``ψ(s) = q⁻¹(1/φ(e^{−u}))`` with ``u = β⁻¹(s·c)``, i.e.
    ``ψ(s) = (p₀ + λ·φ(e^{−u}))/p₂``. The error of u is carried through φ by
    evaluating at both ends of its enclosure (u ↦ φ(e^{−u}) is monotone).
    """
    pmap = engine.pmap
    with mp.workdps(engine.dps):
        s = mpf(s)
        if s < 0:
            raise DomainError("psi_boettcher needs s ≥ 0")
        if s == 0:
            return BoundedValue(mpf(1), mpf(0))
        u = engine.beta_inverse(s * engine.c)
        mid = engine.phi_at(u.value, None)
        lo = engine.phi_at(u.value + u.err, None)
        hi = engine.phi_at(u.value - u.err, None) if u.value > u.err else None
        if hi is None:
            raise DomainError("enclosure of β⁻¹(s·c) reaches zero")
        spread = max(abs(hi.value - mid.value) + hi.err, abs(mid.value - lo.value) + lo.err)
        p0, p2 = _mp(pmap.weights[0]), _mp(pmap.weights[2])
        lam = engine.lam
        value = (p0 + lam * mid.value) / p2
        err = lam / p2 * (spread + mid.err) * ROUNDING_INFLATION
        return BoundedValue(value, err + rounding_floor(value, ops=20))


def harris_L(engine, s, route: str = "direct", tol=None) -> BoundedValue:
    """``L(log s) = s^{−γ}F(log ψ(s))``.

    ``route`` selects how ψ is computed: ``"direct"`` iterates the map and is
    independent of the ω machinery, ``"boettcher"`` uses :func:`psi_boettcher`.
    Since ``0 ≤ F' ≤ 1``, an error ε on ``log ψ`` moves F by at most ε.
    """
    pmap = engine.pmap
    with mp.workdps(engine.dps):
        s = mpf(s)
        if s <= 0:
            raise DomainError("harris_L needs s > 0")
        if route == "direct":
            psi = psi_direct(pmap, s, tol=tol, dps=engine.dps)
        elif route == "boettcher":
            psi = psi_boettcher(engine, s)
        else:
            raise DomainError(f"unknown route {route!r}")
        if psi.value - psi.err <= 1:
            raise DomainError("ψ(s) enclosure does not stay above 1")
        h = log(psi.value)
        h_err = -log1p(-psi.err / psi.value)
        F = free_energy(pmap, h, dps=engine.dps)
        scale = s ** (-engine.gamma)
        value = scale * F.value
        err = scale * (F.err + h_err) * ROUNDING_INFLATION + rounding_floor(value, ops=10)
        return BoundedValue(value, err, certified=psi.certified)


@dataclass(frozen=True)
class GWRun:
    """Summary statistics of a seeded Galton–Watson simulation.

    ``W`` denotes ``W_n/wⁿ``. Errors are standard errors of the Monte-Carlo
    means. ``mgf`` maps each s to ``(mean of e^{sW}, standard error)``.
    """

    weights: tuple
    n: int
    samples: int
    seed: int
    shards: int
    mean_W: float
    var_W: float
    se_mean_W: float
    extinct_fraction: float
    se_extinct: float
    mgf: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "weights": [str(p) for p in self.weights],
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "shards": self.shards,
            "rng": "numpy Philox, SeedSequence(seed).spawn(shards)",
            "mean_W": self.mean_W,
            "var_W": self.var_W,
            "se_mean_W": self.se_mean_W,
            "extinct_fraction": self.extinct_fraction,
            "se_extinct": self.se_extinct,
            "mgf": [{"s": s, "value": v, "se": e} for s, (v, e) in sorted(self.mgf.items())],
        }


POPULATION_CAP = 2**53


def _simulate_shard(probs: np.ndarray, n: int, samples: int, rng: np.random.Generator):
    """Final populations ``W_n`` of ``samples`` independent processes."""
    offspring = np.arange(len(probs))
    pop = np.ones(samples, dtype=np.int64)
    for generation in range(n):
        alive = pop > 0
        if not alive.any():
            break
        counts = rng.multinomial(pop[alive], probs)
        pop[alive] = counts @ offspring
        if pop.max() > POPULATION_CAP:
            raise PopulationOverflow(f"population exceeded {POPULATION_CAP} in generation "
                                f"{generation + 1}")
    return pop


def simulate_gw(pmap: PinningMap, n: int, samples: int, seed: int,
                s_grid: Sequence[float] = (0.5, 1.0), shards: int = 8) -> GWRun:
    """Simulate ``samples`` processes for ``n`` generations from one ancestor.

    Each generation, the offspring counts of a population of size N are drawn
    as one multinomial vector over the law ``p₀..p_d``, which has the same
    distribution as summing N i.i.d. offspring draws. Samples are split into
    ``shards`` independent Philox streams spawned from ``SeedSequence(seed)``,
    so results depend only on ``(seed, shards, samples)``.
    """
    if samples < 1000:
        raise DomainError("need at least 1000 samples")
    if n < 0:
        raise DomainError("n must be non-negative")
    probs = np.array([float(p) for p in pmap.weights])
    probs = probs / probs.sum()
    children = np.random.SeedSequence(seed).spawn(shards)
    sizes = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    pops = [_simulate_shard(probs, n, size, np.random.Generator(np.random.Philox(child)))
            for child, size in zip(children, sizes)]
    pop = np.concatenate(pops)
    w = float(pmap.w)
    W = pop.astype(np.float64) / w**n
    root = np.sqrt(samples)
    mgf = {}
    for s in s_grid:
        vals = np.exp(float(s) * W)
        mgf[float(s)] = (float(vals.mean()), float(vals.std(ddof=1) / root))
    extinct = (pop == 0).astype(np.float64)
    return GWRun(
        weights=pmap.weights,
        n=n,
        samples=samples,
        seed=seed,
        shards=shards,
        mean_W=float(W.mean()),
        var_W=float(W.var(ddof=1)),
        se_mean_W=float(W.std(ddof=1) / root),
        extinct_fraction=float(extinct.mean()),
        se_extinct=float(extinct.std(ddof=1) / root),
        mgf=mgf,
    )
