"""Pair-of-pants degeneration: saddle patch geometry, curvature weights and limit data.

Near the saddle the Morse function is f = -alpha x^2 + beta y^2.  For t > 0
the level set inside the patch consists of two arcs y = +-(zeta + m x^2)^{1/2}
with zeta = t / beta, m = alpha / beta.  For t < 0 the arcs are
x = +-(zeta' + m' y^2)^{1/2} with zeta' = -t / alpha, m' = beta / alpha, one arc
on each of the components a and b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ModelRegionError
from .interval_bvp import IntervalSystem
from .lagrangian import HermitianLagrangian
from .potentials import MeasurePotential, PiecewisePoly, ShiftedProfile

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class OuterOmega:
    """Contribution of C_t outside the patch to omega_t, as a deviation from the t = 0 value.

    ``kind == "poly"``: ``plus``, ``a``, ``b`` hold coefficients of t, t^2, ...
    (no constant term).  ``kind == "samples"``: ``t`` is a grid containing
    -1, 0 and 1, and the three value lists are interpolated linearly; the
    value at t = 0 must vanish.
    """

    kind: str = "poly"
    plus: tuple[float, ...] = ()
    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    t: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("plus", "a", "b", "t"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        if self.kind not in ("poly", "samples"):
            raise DomainError(f"unknown omega_outer kind {self.kind!r}")
        if self.kind == "samples":
            t = np.asarray(self.t)
            if t.size < 3 or np.any(np.diff(t) <= 0) or t[0] > -1 or t[-1] < 1 or 0.0 not in self.t:
                raise DomainError("sampled omega_outer needs an increasing grid over [-1, 1] containing 0")
            i0 = self.t.index(0.0)
            for name in ("plus", "a", "b"):
                vals = getattr(self, name)
                if len(vals) != t.size:
                    raise DomainError(f"omega_outer.{name} must match the t grid")
                if abs(vals[i0]) > 1e-12:
                    raise DomainError("sampled omega_outer deviations must vanish at t = 0")

    def _eval(self, coeffs: tuple[float, ...], t: float) -> float:
        if self.kind == "poly":
            return float(sum(c * t ** (k + 1) for k, c in enumerate(coeffs)))
        return float(np.interp(t, self.t, coeffs))

    def dev_plus(self, t: float) -> float:
        return self._eval(self.plus, t)

    def dev_a(self, t: float) -> float:
        return self._eval(self.a, t)

    def dev_b(self, t: float) -> float:
        return self._eval(self.b, t)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "plus": list(self.plus), "a": list(self.a), "b": list(self.b)}
        if self.kind == "samples":
            d["t"] = list(self.t)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OuterOmega":
        return cls(d.get("kind", "poly"), tuple(d.get("plus", ())), tuple(d.get("a", ())),
                   tuple(d.get("b", ())), tuple(d.get("t", ())))


@dataclass(frozen=True)
class PantsScenario:
    alpha: float
    beta: float
    patch_radius: float
    lengths: tuple[float, float, float, float]
    h0: tuple[tuple[float, ...], ...]
    omega_outer: OuterOmega = field(default_factory=OuterOmega)
    id: str = "scenario"

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.patch_radius > 0):
            raise DomainError("alpha, beta and patch_radius must be positive")
        lengths = tuple(float(x) for x in self.lengths)
        if len(lengths) != 4 or any(not x > 0 for x in lengths):
            raise DomainError("exactly four positive segment lengths are required")
        h0 = tuple(tuple(float(c) for c in row) for row in self.h0)
        if len(h0) != 4:
            raise DomainError("h0 needs one polynomial per segment")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "patch_radius", float(self.patch_radius))
        vals = self.h0_profile().integral(np.asarray(self.knots))
        object.__setattr__(self, "_segment_omegas", np.diff(vals) / FOUR_PI)

    @property
    def m(self) -> float:
        return self.alpha / self.beta

    @property
    def theta_plus(self) -> float:
        return 2.0 * math.atan(math.sqrt(self.alpha / self.beta))

    @property
    def theta_minus(self) -> float:
        return math.pi - self.theta_plus

    @property
    def knots(self) -> tuple[float, ...]:
        """0 = t0 < t1 < t2 < t3 < t4 = L0."""
        return tuple(np.concatenate([[0.0], np.cumsum(self.lengths)]))

    @property
    def L0(self) -> float:
        return float(sum(self.lengths))

    def h0_profile(self) -> PiecewisePoly:
        return PiecewisePoly(self.knots, self.h0)

    def segment_omegas(self) -> np.ndarray:
        """omega_k = (1 / 4 pi) int_{I_k} h0."""
        return self._segment_omegas.copy()

    @property
    def omega0(self) -> float:
        return float(np.sum(self.segment_omegas()))

    @property
    def omega0_a(self) -> float:
        w = self.segment_omegas()
        return float(w[0] + w[3])

    @property
    def omega0_b(self) -> float:
        w = self.segment_omegas()
        return float(w[1] + w[2])

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "alpha": self.alpha,
            "beta": self.beta,
            "patch_radius": self.patch_radius,
            "lengths": list(self.lengths),
            "h0": [list(r) for r in self.h0],
            "omega_outer": self.omega_outer.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PantsScenario":
        return cls(
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            patch_radius=float(d["patch_radius"]),
            lengths=tuple(d["lengths"]),
            h0=tuple(tuple(r) for r in d["h0"]),
            omega_outer=OuterOmega.from_dict(d.get("omega_outer", {})),
            id=str(d.get("id", "scenario")),
        )


def saddle_density(u, m: float):
    """Rescaled curvature density of the arc y = (1 + m u^2)^{1/2}, per unit u."""
    u = np.asarray(u, dtype=float)
    return -m / (np.sqrt(1.0 + m * u * u) * (1.0 + (m + m * m) * u * u))


def _density_sinh(v, m: float):
    # saddle_density after u = sinh(v) / sqrt(m), including the jacobian
    sh = np.sinh(v)
    return -math.sqrt(m) / (1.0 + (1.0 + m) * sh * sh)


def arc_turning(m: float, zeta: float, r: float, method: str = "quad") -> float:
    """Turning of one arc y = (zeta + m x^2)^{1/2} inside the disk of radius r.

    ``method="quad"`` integrates the rescaled density adaptively (in the
    variable v with u = sinh(v) / sqrt(m), which removes the slow algebraic
    tail), while ``method="closed"`` uses -2 arctan(m d / (zeta + m d^2)^{1/2}).
    """
    if not 0.0 < zeta < r * r:
        raise ModelRegionError(f"level zeta = {zeta} is outside the quadratic model region")
    d = math.sqrt((r * r - zeta) / (1.0 + m))
    if method == "closed":
        return -2.0 * math.atan(m * d / math.sqrt(zeta + m * d * d))
    V = math.asinh(math.sqrt(m) * d / math.sqrt(zeta))
    val, _ = quad(_density_sinh, 0.0, V, args=(m,), epsabs=1e-15, epsrel=1e-13, limit=200)
    return 2.0 * val


def asymptotic_arc_turning(m: float) -> float:
    """Turning of the full arc u in R, by quadrature of the rescaled density in u."""
    val, _ = quad(saddle_density, 0.0, np.inf, args=(m,), epsabs=1e-14, epsrel=1e-13, limit=400)
    return 2.0 * val


def patch_turning(sc: PantsScenario, t: float, method: str = "quad") -> float:
    """int h_t ds over C_t inside the patch (both arcs for t > 0, their sum for t < 0)."""
    if t > 0:
        return 2.0 * arc_turning(sc.m, t / sc.beta, sc.patch_radius, method)
    if t < 0:
        return 2.0 * _minus_arc(sc, t, method)
    raise DomainError("t = 0 is the singular level; use omega_limits")


def _minus_arc(sc: PantsScenario, t: float, method: str) -> float:
    # the x-branches turn the other way round relative to the orientation of C_t
    return -arc_turning(sc.beta / sc.alpha, -t / sc.alpha, sc.patch_radius, method)


@lru_cache(maxsize=1 << 16)
def omega_t(sc: PantsScenario, t: float, method: str = "quad") -> float:
    """omega_t = outer part + (patch turning) / 4 pi."""
    if t > 0:
        return sc.omega0 + sc.omega_outer.dev_plus(t) + patch_turning(sc, t, method) / FOUR_PI
    a, b = omega_t_split(sc, t, method)
    return a + b


@lru_cache(maxsize=1 << 16)
def omega_t_split(sc: PantsScenario, t: float, method: str = "quad") -> tuple[float, float]:
    """(omega_t^a, omega_t^b) for t < 0; each component carries one arc."""
    if not t < 0:
        raise DomainError("the a/b split exists only for t < 0")
    arc = _minus_arc(sc, t, method) / FOUR_PI
    return (
        sc.omega0_a + sc.omega_outer.dev_a(t) + arc,
        sc.omega0_b + sc.omega_outer.dev_b(t) + arc,
    )


@dataclass(frozen=True)
class OmegaLimits:
    plus: float
    minus: float
    minus_a: float
    minus_b: float


def omega_limits(sc: PantsScenario) -> OmegaLimits:
    """One-sided limits of omega_t at t = 0."""
    tp, tm = sc.theta_plus, sc.theta_minus
    return OmegaLimits(
        plus=sc.omega0 - tp / (2.0 * math.pi),
        minus=sc.omega0 + tm / (2.0 * math.pi),
        minus_a=sc.omega0_a + tm / FOUR_PI,
        minus_b=sc.omega0_b + tm / FOUR_PI,
    )


def _half_h0_on(sc: PantsScenario, segments: Sequence[int]) -> PiecewisePoly:
    knots = np.concatenate([[0.0], np.cumsum([sc.lengths[k] for k in segments])])
    return PiecewisePoly(tuple(knots), tuple(tuple(0.5 * c for c in sc.h0[k]) for k in segments))


def limit_potential(sc: PantsScenario, side: str):
    """Limit potential(s) with their partitions.

    plus: one potential on [0, L0] with density h0 / 2 and jumps -theta_+/2
    at t1 and t3.  minus: two potentials, on I1 then I4 (component a) and on
    I3 then I2 (component b), each with a jump +theta_-/2 at the seam.
    """
    if side == "plus":
        t = sc.knots
        jp = -0.5 * sc.theta_plus
        P = MeasurePotential(sc.L0, _half_h0_on(sc, (0, 1, 2, 3)), ((t[1], jp), (t[3], jp)))
        return P, list(t)
    if side == "minus":
        jm = 0.5 * sc.theta_minus
        out = []
        for segs in ((0, 3), (2, 1)):
            prof = _half_h0_on(sc, segs)
            ell = [sc.lengths[k] for k in segs]
            P = MeasurePotential(sum(ell), prof, ((ell[0], jm),))
            out.append((P, [0.0, ell[0], sum(ell)]))
        return tuple(out)
    raise DomainError("side must be 'plus' or 'minus'")


def transmission_matrices(sc: PantsScenario) -> tuple[np.ndarray, np.ndarray]:
    """The 4x4 transmission unitaries T+ and T- of the two limit operators."""
    p = np.exp(0.5j * sc.theta_plus)
    q = np.exp(-0.5j * sc.theta_minus)
    Tp = np.array([[0, 0, 0, 1], [p, 0, 0, 0], [0, 1, 0, 0], [0, 0, p, 0]], dtype=complex)
    Tm = np.array([[0, 0, 0, 1], [0, 0, q, 0], [0, 1, 0, 0], [q, 0, 0, 0]], dtype=complex)
    return Tp, Tm


def limit_system(sc: PantsScenario, side: str) -> IntervalSystem:
    """The 4-interval limit operator on I1..I4 with density h0 / 2 and transmission T+ or T-."""
    prof = _half_h0_on(sc, (0, 1, 2, 3))
    t = sc.knots
    pots = tuple(ShiftedProfile(prof, t[k], sc.lengths[k]) for k in range(4))
    Tp, Tm = transmission_matrices(sc)
    if side not in ("plus", "minus"):
        raise DomainError("side must be 'plus' or 'minus'")
    return IntervalSystem(sc.lengths, pots, Tp if side == "plus" else Tm)


def cauchy_data_lagrangian(sc: PantsScenario) -> HermitianLagrangian:
    """Lambda_0 = graph of diag(exp(2 pi i omega_k))."""
    return HermitianLagrangian(np.diag(np.exp(2j * math.pi * sc.segment_omegas())))


def symmetric_scenario(omega_a: float = 0.1, omega_b: float = 0.1, ell: float = 1.0, **kw) -> PantsScenario:
    """alpha = beta with constant h0 on each segment giving the requested omega0^a, omega0^b."""
    h_a = FOUR_PI * omega_a / (2 * ell)
    h_b = FOUR_PI * omega_b / (2 * ell)
    return PantsScenario(
        alpha=kw.pop("alpha", 1.0),
        beta=kw.pop("beta", 1.0),
        patch_radius=kw.pop("patch_radius", 2.0),
        lengths=(ell, ell, ell, ell),
        h0=((h_a,), (h_b,), (h_b,), (h_a,)),
        **kw,
    )


def random_scenario(rng: np.random.Generator, sid: str = "random", theta_range=(0.2, 2.9)) -> PantsScenario:
    """Random scenario with theta_+ drawn uniformly from theta_range."""
    theta = rng.uniform(*theta_range)
    m = math.tan(0.5 * theta) ** 2
    beta = rng.uniform(0.5, 2.0)
    alpha = m * beta
    r = math.sqrt(max(1.0 / alpha, 1.0 / beta)) * rng.uniform(1.2, 2.0)
    lengths = tuple(rng.uniform(0.5, 2.0, size=4))
    h0 = tuple(tuple(rng.normal(0.0, 1.0, size=rng.integers(1, 4))) for _ in range(4))
    outer = OuterOmega(
        "poly",
        plus=tuple(rng.normal(0.0, 0.8, size=2)),
        a=tuple(rng.normal(0.0, 0.8, size=2)),
        b=tuple(rng.normal(0.0, 0.8, size=2)),
    )
    return PantsScenario(alpha, beta, r, lengths, h0, outer, sid)
