"""Admissible potentials on an interval: a Lipschitz part plus finitely many jumps.

A potential is stored through its density ``a`` (a :class:`Profile`) and a
list of jumps ``(p_j, c_j)``.  The antiderivative

    A(t) = int_0^t a(s) ds + sum_j c_j H(t - p_j)

is right continuous with ``A(0) = 0``.  All profile antiderivatives are
evaluated in closed form, so reconstruction identities hold to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .numerics import PanelQuadrature

_POS_TOL = 1e-12


class Profile:
    """Piecewise smooth density on [0, L] with an exact antiderivative."""

    breakpoints: tuple[float, ...] = ()

    def density(self, t):
        raise NotImplementedError

    def integral(self, t):
        """int_0^t density(s) ds, vectorized over t."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __call__(self, t):
        return self.density(t)


@dataclass(frozen=True)
class ZeroProfile(Profile):
    breakpoints: tuple[float, ...] = ()

    def density(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def integral(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def to_dict(self) -> dict:
        return {"kind": "zero"}


@dataclass(frozen=True)
class PiecewisePoly(Profile):
    """Polynomial on each [knots[i], knots[i+1]] in the local variable t - knots[i].

    ``coeffs[i]`` lists ascending power coefficients for segment i.
    """

    knots: tuple[float, ...]
    coeffs: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        coeffs = tuple(tuple(float(c) for c in row) for row in self.coeffs)
        if len(knots) < 2 or any(b <= a for a, b in zip(knots[:-1], knots[1:])):
            raise DomainError("piecewise-poly knots must be strictly increasing")
        if len(coeffs) != len(knots) - 1:
            raise DomainError("piecewise-poly needs one coefficient row per segment")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coeffs", coeffs)
        deg = max(len(r) for r in coeffs) if coeffs else 1
        C = np.zeros((len(coeffs), max(deg, 1)))
        for i, row in enumerate(coeffs):
            C[i, : len(row)] = row
        object.__setattr__(self, "_C", C)
        # antiderivative coefficients, one degree higher, zero constant term
        powers = np.arange(1, C.shape[1] + 1)
        Cint = np.zeros((C.shape[0], C.shape[1] + 1))
        Cint[:, 1:] = C / powers
        widths = np.diff(knots)
        seg = np.array([_horner(Cint[i], widths[i]) for i in range(len(widths))])
        object.__setattr__(self, "_Cint", Cint)
        object.__setattr__(self, "_prefix", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.knots

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.knots) - 2)
        return t, idx, t - np.asarray(self.knots)[idx]

    def density(self, t):
        t, idx, s = self._locate(t)
        return _horner(np.moveaxis(self._C[idx], -1, 0), s)

    def integral(self, t):
        t, idx, s = self._locate(t)
        return self._prefix[idx] + _horner(np.moveaxis(self._Cint[idx], -1, 0), s)

    def to_dict(self) -> dict:
        return {"kind": "piecewise-poly", "knots": list(self.knots), "coeffs": [list(r) for r in self.coeffs]}

    @classmethod
    def from_samples(cls, t: Sequence[float], values: Sequence[float]) -> "PiecewisePoly":
        """Piecewise-linear interpolant through the samples."""
        t = np.asarray(t, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.shape != v.shape or t.size < 2:
            raise DomainError("samples need matching t and values arrays of length >= 2")
        slopes = np.diff(v) / np.diff(t)
        return cls(tuple(t), tuple((v[i], slopes[i]) for i in range(len(slopes))))


def _horner(C, s):
    """Evaluate ascending coefficients C (first axis) at s."""
    out = np.zeros_like(np.asarray(s, dtype=float)) + 0.0 * C[-1]
    for c in C[::-1]:
        out = out * s + c
    return out


@dataclass(frozen=True)
class TrigProfile(Profile):
    """const + sum_k cos_k cos(2 pi k t / period) + sin_k sin(2 pi k t / period)."""

    period: float
    const: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(x) for x in self.cos))
        object.__setattr__(self, "sin", tuple(float(x) for x in self.sin))

    def _modes(self, t):
        t = np.asarray(t, dtype=float)
        K = max(len(self.cos), len(self.sin))
        k = np.arange(1, K + 1)
        w = 2.0 * math.pi * k / self.period
        a = np.zeros(K)
        b = np.zeros(K)
        a[: len(self.cos)] = self.cos
        b[: len(self.sin)] = self.sin
        return t, w, a, b

    def density(self, t):
        t, w, a, b = self._modes(t)
        x = t[..., None] * w
        return self.const + np.sum(a * np.cos(x) + b * np.sin(x), axis=-1)

    def integral(self, t):
        t, w, a, b = self._modes(t)
        x = t[..., None] * w
        return self.const * t + np.sum((a * np.sin(x) + b * (1.0 - np.cos(x))) / w, axis=-1)

    def to_dict(self) -> dict:
        return {"kind": "trig", "period": self.period, "const": self.const, "cos": list(self.cos), "sin": list(self.sin)}


# Mollifier bump phi(x) = (315/256)(1 - x^2)^4 on [-1, 1]; positive, C^3, unit mass.
_BUMP = np.array([1.0, 0.0, -4.0, 0.0, 6.0, 0.0, -4.0, 0.0, 1.0]) * (315.0 / 256.0)
_BUMP_INT = np.concatenate([[0.0], _BUMP / np.arange(1, 10)])


@dataclass(frozen=True)
class BumpProfile(Profile):
    """Sum of masses[j] * phi((t - centers[j]) / eps) / eps."""

    centers: tuple[float, ...]
    masses: tuple[float, ...]
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(float(x) for x in self.centers))
        object.__setattr__(self, "masses", tuple(float(x) for x in self.masses))

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(sorted(p + s * self.eps for p in self.centers for s in (-1.0, 1.0)))

    def density(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p, c in zip(self.centers, self.masses):
            x = (t - p) / self.eps
            inside = np.abs(x) < 1.0
            out = out + np.where(inside, c * _horner(_BUMP, x) / self.eps, 0.0)
        return out

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        cdf_left = _horner(_BUMP_INT, -1.0)
        for p, c in zip(self.centers, self.masses):
            x = np.clip((t - p) / self.eps, -1.0, 1.0)
            out = out + c * (_horner(_BUMP_INT, x) - cdf_left)
        return out

    def to_dict(self) -> dict:
        return {"kind": "bump", "centers": list(self.centers), "masses": list(self.masses), "eps": self.eps}


@dataclass(frozen=True)
class SumProfile(Profile):
    """Linear combination sum_i weights[i] * parts[i]."""

    parts: tuple[Profile, ...]
    weights: tuple[float, ...]

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(sorted({b for p in self.parts for b in p.breakpoints}))

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return sum((w * p.density(t) for p, w in zip(self.parts, self.weights)), np.zeros_like(t))

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        return sum((w * p.integral(t) for p, w in zip(self.parts, self.weights)), np.zeros_like(t))

    def to_dict(self) -> dict:
        return {"kind": "sum", "parts": [p.to_dict() for p in self.parts], "weights": list(self.weights)}


@dataclass(frozen=True)
class ShiftedProfile(Profile):
    """The density s -> base(s + offset) restricted to [0, length]."""

    base: Profile
    offset: float
    length: float

    @property
    def breakpoints(self) -> tuple[float, ...]:
        inner = [b - self.offset for b in self.base.breakpoints if self.offset < b < self.offset + self.length]
        return tuple([0.0] + inner + [self.length])

    def density(self, t):
        return self.base.density(np.asarray(t, dtype=float) + self.offset)

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        return self.base.integral(t + self.offset) - self.base.integral(np.full_like(t, self.offset))

    def to_dict(self) -> dict:
        return {"kind": "shift", "base": self.base.to_dict(), "offset": self.offset, "length": self.length}


def profile_from_dict(d: dict, length: float | None = None) -> Profile:
    kind = d.get("kind")
    if kind == "zero":
        return ZeroProfile()
    if kind == "piecewise-poly":
        return PiecewisePoly(tuple(d["knots"]), tuple(tuple(r) for r in d["coeffs"]))
    if kind == "samples":
        return PiecewisePoly.from_samples(d["t"], d["values"])
    if kind == "trig":
        period = d.get("period", length)
        if period is None:
            raise DomainError("trig profile needs a period")
        return TrigProfile(float(period), float(d.get("const", 0.0)), tuple(d.get("cos", ())), tuple(d.get("sin", ())))
    if kind == "bump":
        return BumpProfile(tuple(d["centers"]), tuple(d["masses"]), float(d["eps"]))
    if kind == "sum":
        parts = tuple(profile_from_dict(p, length) for p in d["parts"])
        weights = tuple(float(w) for w in d.get("weights", [1.0] * len(parts)))
        return SumProfile(parts, weights)
    if kind == "shift":
        return ShiftedProfile(profile_from_dict(d["base"], length), float(d["offset"]), float(d["length"]))
    raise DomainError(f"unknown profile kind {kind!r}")


@dataclass(frozen=True)
class MeasurePotential:
    """Admissible potential on [0, length]: density ``ac`` plus interior jumps."""

    length: float
    ac: Profile = field(default_factory=ZeroProfile)
    jumps: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError("length must be positive")
        jumps = tuple((float(p), float(c)) for p, c in self.jumps)
        pos = [p for p, _ in jumps]
        if any(not 0.0 < p < self.length for p in pos):
            raise DomainError("jump positions must lie strictly inside (0, L)")
        if any(b <= a for a, b in zip(pos[:-1], pos[1:])):
            raise DomainError("jump positions must be strictly increasing")
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "jumps", jumps)

    @property
    def jump_positions(self) -> np.ndarray:
        return np.array([p for p, _ in self.jumps], dtype=float)

    @property
    def jump_sizes(self) -> np.ndarray:
        return np.array([c for _, c in self.jumps], dtype=float)

    @property
    def breakpoints(self) -> np.ndarray:
        """Sorted points of [0, L] where A or its density may be non-smooth."""
        pts = [0.0, self.length, *self.jump_positions, *self.ac.breakpoints]
        return np.unique([p for p in pts if 0.0 <= p <= self.length])

    def __call__(self, t, left: bool = False):
        """A(t), vectorized; ``left=True`` gives the left limit A(t-)."""
        t = np.asarray(t, dtype=float)
        out = self.ac.integral(t)
        for p, c in self.jumps:
            out = out + c * ((t > p) if left else (t >= p))
        return out

    @property
    def total_mass(self) -> float:
        """A(L)."""
        return float(self(self.length))

    @property
    def omega(self) -> float:
        """A(L) / 2 pi."""
        return self.total_mass / (2.0 * math.pi)

    def total_variation(self, order: int = 20) -> float:
        q = PanelQuadrature(self.breakpoints, order=order, max_width=self.length / 16)
        return float(q.integrate(lambda s: np.abs(self.ac.density(s)))) + float(np.sum(np.abs(self.jump_sizes)))

    def scaled(self, k: float) -> "MeasurePotential":
        return MeasurePotential(self.length, SumProfile((self.ac,), (float(k),)), tuple((p, k * c) for p, c in self.jumps))

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "ac": self.ac.to_dict(),
            "jumps": [{"pos": p, "mag": c} for p, c in self.jumps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurePotential":
        L = float(d["length"])
        ac = profile_from_dict(d.get("ac", {"kind": "zero"}), L)
        jumps = tuple(sorted((float(j["pos"]), float(j["mag"])) for j in d.get("jumps", [])))
        return cls(L, ac, jumps)


def eval_antiderivative(P: MeasurePotential, t: float) -> float:
    """A(t) with the right-continuous convention at jump points."""
    if not 0.0 <= t <= P.length:
        raise DomainError(f"t = {t} outside [0, {P.length}]")
    return float(P(t))


def decompose(P: MeasurePotential) -> tuple[Profile, tuple[tuple[float, float], ...]]:
    """Split A into its Lipschitz part (as a density) and its jump list."""
    return P.ac, P.jumps


def recompose(ac: Profile, jumps, length: float) -> MeasurePotential:
    return MeasurePotential(length, ac, tuple(jumps))


def linear_combination(coeffs: Sequence[float], potentials: Sequence[MeasurePotential]) -> MeasurePotential:
    """sum_i coeffs[i] * potentials[i]; jumps at shared positions are merged."""
    L = potentials[0].length
    if any(abs(P.length - L) > _POS_TOL for P in potentials):
        raise DomainError("potentials must share the same length")
    merged: dict[float, float] = {}
    for k, P in zip(coeffs, potentials):
        for p, c in P.jumps:
            merged[p] = merged.get(p, 0.0) + k * c
    ac = SumProfile(tuple(P.ac for P in potentials), tuple(float(k) for k in coeffs))
    return MeasurePotential(L, ac, tuple(sorted(merged.items())))


def mollify_family(P: MeasurePotential, eps: float) -> MeasurePotential:
    """Replace each jump by a bump of the same mass supported in (p - eps, p + eps)."""
    if not P.jumps:
        return P
    if not eps > 0:
        raise PreconditionError("eps must be positive")
    pos = P.jump_positions
    gaps = np.diff(pos)
    if (gaps.size and eps >= 0.5 * gaps.min()) or eps >= pos[0] or eps >= P.length - pos[-1]:
        raise PreconditionError(f"eps = {eps} too large for the jump layout")
    bump = BumpProfile(tuple(pos), tuple(P.jump_sizes), float(eps))
    return MeasurePotential(P.length, SumProfile((P.ac, bump), (1.0, 1.0)), ())


def very_weak_distance(P1: MeasurePotential, P2: MeasurePotential, grid) -> float:
    """max over the grid of |A1 - A2|; grid points must avoid all jumps."""
    grid = np.asarray(grid, dtype=float)
    if abs(P1.length - P2.length) > _POS_TOL:
        raise DomainError("potentials must share the same length")
    if np.any(grid < 0.0) or np.any(grid > P1.length):
        raise DomainError("grid points must lie in [0, L]")
    jumps = np.concatenate([P1.jump_positions, P2.jump_positions])
    if jumps.size and np.min(np.abs(grid[:, None] - jumps[None, :])) < _POS_TOL:
        raise DomainError("grid point collides with a jump position")
    return float(np.max(np.abs(P1(grid) - P2(grid))))


def constant_potential(length: float, mass: float) -> MeasurePotential:
    """Constant density with total mass ``mass``."""
    return MeasurePotential(length, PiecewisePoly((0.0, length), ((mass / length,),)))
