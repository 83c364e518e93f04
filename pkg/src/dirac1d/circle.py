"""Dirac operators -i c d/dt + a on a circle of length L with measure potentials.

The operator with scale ``c`` is ``T_{A,c} = c T_{A/c}``.  Its spectrum is the
arithmetic progression A(L)/L + 2 pi c n / L and every eigenvalue is simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateError, DomainError, PreconditionError
from .numerics import PanelQuadrature, hurwitz_zeta
from .potentials import MeasurePotential, constant_potential

TWO_PI = 2.0 * math.pi

# omega within this distance of an integer is treated as an integer
INTEGER_TOL = 1e-12


@dataclass(frozen=True)
class EtaResult:
    """Reduced eta data: eta0 = eta(0), xi = (kernel_dim + eta0) / 2.

    ``rho`` is the fractional offset of the spectrum when it is a single
    arithmetic progression, otherwise None.
    """

    eta0: float
    xi: float
    kernel_dim: int
    rho: Optional[float] = None


def frac_part(x: float, tol: float = INTEGER_TOL) -> float:
    """x - floor(x), snapped to 0 when x is within tol of an integer."""
    r = x - math.floor(x)
    if r < tol or 1.0 - r < tol:
        return 0.0
    return r


def is_near_integer(x: float, tol: float = INTEGER_TOL) -> bool:
    return abs(x - round(x)) < tol


def eta_from_omega(omega: float) -> EtaResult:
    """Eta data of a progression (2 pi / L)(omega + Z)."""
    rho = frac_part(omega)
    if rho == 0.0:
        return EtaResult(eta0=0.0, xi=0.5, kernel_dim=1, rho=0.0)
    eta0 = 1.0 - 2.0 * rho
    return EtaResult(eta0=eta0, xi=0.5 * eta0, kernel_dim=0, rho=rho)


def eta_via_zeta(rho: float, length: float, s: float = 0.0) -> float:
    """(L / 2 pi)^s (zeta(s, rho) - zeta(s, 1 - rho)), the eta function of the progression."""
    if not 0.0 < rho < 1.0:
        raise DomainError("rho must lie in (0, 1)")
    return (length / TWO_PI) ** s * (hurwitz_zeta(s, rho) - hurwitz_zeta(s, 1.0 - rho))


@dataclass(frozen=True)
class CircleOperator:
    potential: MeasurePotential
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale must be positive")

    @property
    def length(self) -> float:
        return self.potential.length

    @property
    def omega(self) -> float:
        """omega of the rescaled potential A / c."""
        return self.potential.total_mass / (TWO_PI * self.scale)

    def eigenvalue(self, n: int) -> float:
        return self.scale * TWO_PI / self.length * (self.omega + n)

    def phi(self, t, left: bool = False):
        """Phi_c(t) = (i A(t) - t) / c."""
        t = np.asarray(t, dtype=float)
        return (1j * self.potential(t, left=left) - t) / self.scale


def spectrum(op: CircleOperator, window: Sequence[float]) -> list[tuple[float, int]]:
    """All (lambda_n, n) with lambda_n in the closed window, ordered by n."""
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise DomainError("window must be a bounded interval")
    step = op.scale * TWO_PI / op.length
    n_lo = math.floor(lo / step - op.omega) - 1
    n_hi = math.ceil(hi / step - op.omega) + 1
    out = []
    for n in range(n_lo, n_hi + 1):
        lam = op.eigenvalue(n)
        if lo <= lam <= hi:
            out.append((lam, n))
    return out


def eigenfunction(op: CircleOperator, n: int, t):
    """psi_n(t) = exp(2 pi i n t / L) exp(-i (B(t) - B(L) t / L)) with B = A / c."""
    t = np.asarray(t, dtype=float)
    L = op.length
    B = op.potential(t) / op.scale
    BL = op.potential.total_mass / op.scale
    return np.exp(1j * TWO_PI * n * t / L) * np.exp(-1j * (B - BL * t / L))


def _kernel_factors(op: CircleOperator, t, s, left: bool = False):
    g = np.exp(-op.phi(t, left=left))
    h = np.exp(op.phi(s))
    denom = np.exp(op.phi(op.length)) - 1.0
    return g, h, denom


def resolvent_kernel(op: CircleOperator, t, s):
    """Kernel of (i + T_{A,c})^{-1}; the step H(t - s) takes the value 1/2 on the diagonal."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    g, h, denom = _kernel_factors(op, t, s)
    step = np.where(t > s, 1.0, np.where(t < s, 0.0, 0.5))
    return (1j / op.scale) * g * h * (1.0 / denom + step)


def kernel_bound(op: CircleOperator) -> float:
    """Uniform bound on |kernel| that depends only on L and c."""
    L, c = op.length, op.scale
    return math.exp(L / c) * (1.0 + 1.0 / (1.0 - math.exp(-L / c))) / c


def resolvent_apply(
    op: CircleOperator,
    f: Callable,
    t,
    left: bool = False,
    order: int = 20,
    panels: int = 32,
    extra_breakpoints: Sequence[float] = (),
):
    """u = (i + T_{A,c})^{-1} f evaluated at t by the explicit variation-of-constants formula.

    ``left=True`` evaluates the left limits u(t-) at jump points.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    L = op.length
    bp = np.concatenate([op.potential.breakpoints, np.asarray(extra_breakpoints, dtype=float)])
    q = PanelQuadrature(bp, order=order, max_width=L / panels)

    def integrand(s):
        return np.exp(op.phi(s)) * f(s)

    total = q.integrate(integrand)
    partial = q.cumulative(integrand, t)
    g = np.exp(-op.phi(t, left=left))
    denom = np.exp(op.phi(L)) - 1.0
    return (1j / op.scale) * g * (total / denom + partial)


def resolvent_gap_distance(op1: CircleOperator, op2: CircleOperator, quadrature_n: int = 16, panels: int = 16) -> float:
    """L^2([0,L]^2) norm of the difference of the two resolvent kernels.

    Off-diagonal panel squares use a tensor Gauss rule.  Diagonal squares are
    split along t = s into two triangles, each mapped to a square by a collapsed
    coordinate change, so the step in the kernel never falls inside a cell.
    """
    if quadrature_n < 16:
        raise PreconditionError("quadrature_n must be at least 16")
    if abs(op1.length - op2.length) > 1e-12:
        raise DomainError("operators must live on the same circle")
    L = op1.length
    bp = np.union1d(op1.potential.breakpoints, op2.potential.breakpoints)
    q = PanelQuadrature(bp, order=quadrature_n, max_width=L / panels)
    x, w = np.polynomial.legendre.leggauss(quadrature_n)
    x01, w01 = 0.5 * (x + 1.0), 0.5 * w

    def diff_sq(T, S):
        return np.abs(resolvent_kernel(op1, T, S) - resolvent_kernel(op2, T, S)) ** 2

    edges = q.edges
    nodes = q.nodes.reshape(-1, quadrature_n)
    weights = q.weights.reshape(-1, quadrature_n)
    P = len(edges) - 1
    total = 0.0
    for i in range(P):
        for j in range(P):
            if i != j:
                T, S = np.meshgrid(nodes[i], nodes[j], indexing="ij")
                W = np.outer(weights[i], weights[j])
                total += float(np.sum(W * diff_sq(T, S)))
                continue
            a, b = edges[i], edges[i + 1]
            h = b - a
            # triangle s < t: t = a + h u, s = a + h u v, jacobian h^2 u
            U, V = np.meshgrid(x01, x01, indexing="ij")
            W = np.outer(w01, w01) * h * h * U
            T = a + h * U
            S = a + h * U * V
            total += float(np.sum(W * diff_sq(T, S)))
            total += float(np.sum(W * diff_sq(S, T)))
    return math.sqrt(total)


def eta_xi(op: CircleOperator) -> EtaResult:
    return eta_from_omega(op.omega)


def spectral_flow_omega(omega0: float, omega1: float) -> int:
    """floor(omega1) - floor(omega0) for invertible endpoints."""
    for w in (omega0, omega1):
        if is_near_integer(w):
            raise DegenerateError(f"endpoint not invertible (omega = {w!r})")
    return math.floor(omega1) - math.floor(omega0)


def spectral_flow(P0: MeasurePotential, P1: MeasurePotential) -> int:
    """Spectral flow of the affine family (1 - s) A0 + s A1 on the same circle."""
    return spectral_flow_omega(P0.omega, P1.omega)


def sf_xi_residual(omega0: float, omega1: float) -> float:
    """SF - (omega1 - omega0 + xi1 - xi0); vanishes for invertible endpoints."""
    sf = spectral_flow_omega(omega0, omega1)
    xi0, xi1 = eta_from_omega(omega0).xi, eta_from_omega(omega1).xi
    return sf - (omega1 - omega0 + (xi1 - xi0))


def crossing_count_flow(omegas: Sequence[float]) -> int:
    """Signed count of zero crossings of the branches omega + n along a sampled path.

    Branch n crosses zero upward when omega + n changes sign from negative to
    positive.  Samples where a branch is exactly zero are skipped, so a branch
    touching zero and returning does not count.
    """
    w = np.asarray(omegas, dtype=float)
    if w.size < 2:
        return 0
    if is_near_integer(w[0]) or is_near_integer(w[-1]):
        raise DegenerateError("path endpoints must be non-integer")
    if np.any(np.abs(np.diff(w)) >= 0.5):
        raise PreconditionError("path sampled too coarsely (|d omega| >= 1/2)")
    count = 0
    for n in range(-math.ceil(w.max()) - 1, -math.floor(w.min()) + 2):
        sgn = np.sign(w + n)
        sgn = sgn[sgn != 0]
        if sgn.size < 2:
            continue
        d = np.diff(sgn)
        count += int(np.sum(d > 0)) - int(np.sum(d < 0))
    return count


def circle_from_omega(omega: float, length: float = TWO_PI) -> CircleOperator:
    """Circle operator with a constant potential of total mass 2 pi omega."""
    return CircleOperator(constant_potential(length, TWO_PI * omega))
