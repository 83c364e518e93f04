"""Dirac operators -i d/dt + a_k on disjoint intervals with transmission conditions.

On interval k = [0, l_k] a solution of the eigenvalue equation is
u_k(t) = exp(i lambda t - i int_0^t a_k) u_k(0).  The boundary condition is
d_- u = T d_+ u where d_- collects the values at the left ends and d_+ those
at the right ends.  Eigenvalues are the zeros of det(I - D(lambda) T) with
D(lambda) = diag(exp(i lambda l_k - i int a_k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import schur
from scipy.optimize import brentq

from .circle import CircleOperator, EtaResult, frac_part, resolvent_apply
from .errors import DomainError, PreconditionError, RootRefinementError, UnsupportedStructureError
from .numerics import RANK_TOL, TWO_PI, nullity
from .potentials import MeasurePotential, Profile, ShiftedProfile, ZeroProfile, profile_from_dict

UNITARY_TOL = 1e-12
_PATTERN_TOL = 1e-12


def as_unitary(M, tol: float = UNITARY_TOL) -> np.ndarray:
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {M.shape}")
    err = np.max(np.abs(M.conj().T @ M - np.eye(M.shape[0]))) if M.size else 0.0
    if err > tol:
        raise DomainError(f"matrix is not unitary to {tol:g} (error {err:.3e})")
    return M


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


@dataclass(frozen=True, eq=False)
class IntervalSystem:
    lengths: tuple[float, ...]
    potentials: tuple[Profile, ...]
    transmission: np.ndarray

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        if not lengths or any(not x > 0 for x in lengths):
            raise DomainError("interval lengths must be positive")
        pots = tuple(self.potentials) if self.potentials else tuple(ZeroProfile() for _ in lengths)
        if len(pots) != len(lengths):
            raise DomainError("one potential per interval is required")
        T = as_unitary(self.transmission)
        if T.shape[0] != len(lengths):
            raise DomainError("transmission matrix size must equal the number of intervals")
        T.setflags(write=False)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "potentials", pots)
        object.__setattr__(self, "transmission", T)

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    @cached_property
    def phases(self) -> np.ndarray:
        """int_{I_k} a_k for each interval."""
        return np.array([float(p.integral(l)) for p, l in zip(self.potentials, self.lengths)])

    def d_matrix(self, lam: complex) -> np.ndarray:
        return np.diag(np.exp(1j * lam * np.asarray(self.lengths) - 1j * self.phases))

    def monodromy(self, lam: complex) -> np.ndarray:
        """U(lambda) = D(lambda) T."""
        return self.d_matrix(lam) @ self.transmission

    def to_dict(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "potentials": [p.to_dict() for p in self.potentials],
            "transmission": matrix_to_json(self.transmission),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IntervalSystem":
        if "partition" in d:
            return from_split(MeasurePotential.from_dict(d["potential"]), d["partition"])
        pots = tuple(profile_from_dict(p, l) for p, l in zip(d.get("potentials", []), d["lengths"]))
        return cls(tuple(d["lengths"]), pots, matrix_from_json(d["transmission"]))


def from_split(P: MeasurePotential, partition: Sequence[float]) -> IntervalSystem:
    """Cut the circle at the partition points; jumps become transmission phases."""
    L = P.length
    pts = sorted({float(x) for x in partition} | {0.0, L})
    if pts[0] < 0.0 or pts[-1] > L:
        raise DomainError("partition points must lie in [0, L]")
    interior = np.array(pts[1:-1])
    for p in P.jump_positions:
        if interior.size == 0 or np.min(np.abs(interior - p)) > 1e-12:
            raise PreconditionError(f"partition is missing the jump at {p}")
    n = len(pts) - 1
    T = np.zeros((n, n), dtype=complex)
    jumps = dict(P.jumps)
    for j in range(n - 1):
        tj = pts[j + 1]
        c = next((cj for pj, cj in jumps.items() if abs(pj - tj) <= 1e-12), 0.0)
        T[j + 1, j] = np.exp(-1j * c)
    T[0, n - 1] = 1.0
    lengths = tuple(b - a for a, b in zip(pts[:-1], pts[1:]))
    pots = tuple(ShiftedProfile(P.ac, a, b - a) for a, b in zip(pts[:-1], pts[1:]))
    return IntervalSystem(lengths, pots, T)


def pair_system(T0, T1) -> IntervalSystem:
    """The two-lagrangian operator on [0, 1] unfolded into 2n unit intervals."""
    T0 = as_unitary(T0)
    T1 = as_unitary(T1)
    n = T0.shape[0]
    Z = np.zeros((n, n), dtype=complex)
    T = np.block([[Z, T0.conj().T], [T1, Z]])
    return IntervalSystem(tuple([1.0] * (2 * n)), (), T)


def secular_det(sys: IntervalSystem, lam: complex) -> complex:
    """det(I - D(lambda) T); zero exactly at eigenvalues."""
    return complex(np.linalg.det(np.eye(sys.n) - sys.monodromy(lam)))


def _wrapped_phase_sum(sys: IntervalSystem, lam: float) -> tuple[float, float]:
    """Sum of eigen-angles of U(lambda) in [0, 2 pi) and the distance of the nearest eigenvalue to 1."""
    ev = np.linalg.eigvals(sys.monodromy(lam))
    ang = np.mod(np.angle(ev), TWO_PI)
    return float(np.sum(ang)), float(np.min(np.abs(ev - 1.0)))


class _Counter:
    """Exact eigenvalue counting through the winding of the eigen-angles.

    The eigen-angles of U(lambda) increase strictly with lambda and their sum
    grows at rate L_tot, so the number of eigenvalues in (a, b] equals
    (L_tot (b - a) - S(b) + S(a)) / 2 pi with S the wrapped angle sum.
    """

    def __init__(self, sys: IntervalSystem, guard: float):
        self.sys = sys
        self.L = sys.total_length
        self.guard = guard
        self.lmin = min(sys.lengths)

    def point(self, lam: float, direction: float = 1.0) -> tuple[float, float]:
        """Move lam until no eigenvalue of U sits near 1; returns (lam, S(lam))."""
        shift = 0.0
        for _ in range(60):
            S, dist = _wrapped_phase_sum(self.sys, lam + shift)
            if dist > self.guard:
                return lam + shift, S
            shift = direction * (abs(shift) * 2.0 + 4.0 * self.guard / self.lmin)
        raise RootRefinementError("could not move a grid point off the spectrum", bracket=(lam, lam + shift))

    def count(self, a: float, Sa: float, b: float, Sb: float) -> int:
        return int(round((self.L * (b - a) - Sb + Sa) / TWO_PI))


def _real_secular(sys: IntervalSystem) -> Callable[[float], float]:
    """Real-valued multiple of det(I - U) that changes sign at every simple eigenvalue."""
    n = sys.n
    L = sys.total_length
    c = float(np.angle(np.linalg.det(np.diag(np.exp(-1j * sys.phases)) @ sys.transmission)))
    norm = (-2j) ** n

    def F(lam: float) -> float:
        return float((secular_det(sys, lam) * np.exp(-0.5j * (lam * L + c)) / norm).real)

    return F


def _cluster_newton(sys: IntervalSystem, lam: float, k: int, maxiter: int = 50) -> float:
    """Locate a k-fold eigenvalue near lam by Newton steps on the k eigen-angles nearest 0.

    The angles come from a complex Schur form, whose orthonormal vectors give
    the angle derivatives v* diag(l) v even inside a degenerate cluster.
    """
    Lam = np.asarray(sys.lengths)
    for _ in range(maxiter):
        Tm, Z = schur(sys.monodromy(lam), output="complex")
        ang = np.angle(np.diag(Tm))
        idx = np.argsort(np.abs(ang))[:k]
        slopes = np.real(np.einsum("ij,i,ij->j", Z.conj(), Lam, Z))[idx]
        step = float(np.sum(ang[idx]) / np.sum(slopes))
        lam -= step
        if abs(step) < 4 * np.finfo(float).eps * max(1.0, abs(lam)):
            break
    return lam


def bvp_spectrum(
    sys: IntervalSystem,
    window: Sequence[float],
    xtol: float = 1e-13,
    cluster_width: float = 1e-7,
) -> list[tuple[float, int]]:
    """All eigenvalues in the closed window with multiplicities.

    The window is cut into cells of width pi / (4 L_tot) and eigenvalues per
    cell are counted exactly.  Isolated ones are refined with Brent's method
    on a real form of the secular function.  Clusters are narrowed by
    bisection on the count and then located by Newton steps on the eigen-angles.
    Multiplicities are confirmed by the nullity of I - D T.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise DomainError("window must be a bounded interval")
    L = sys.total_length
    step = math.pi / (4.0 * L)
    counter = _Counter(sys, guard=1e-9)
    F = _real_secular(sys)
    pad = 1e-9
    a0, Sa0 = counter.point(lo - pad, -1.0)
    b0, Sb0 = counter.point(hi + pad, 1.0)
    ncell = max(int(math.ceil((b0 - a0) / step)), 1)
    grid = [(a0, Sa0)]
    for x in np.linspace(a0, b0, ncell + 1)[1:-1]:
        grid.append(counter.point(float(x)))
    grid.append((b0, Sb0))
    # nudging may reorder points in pathological cases; keep them sorted
    grid.sort()

    roots: list[tuple[float, int]] = []

    def cluster(a, b, k):
        r = _cluster_newton(sys, 0.5 * (a + b), k)
        if not a - cluster_width <= r <= b + cluster_width:
            raise RootRefinementError("cluster refinement left its bracket", bracket=(a, b), values=(k, r))
        roots.append((r, k))

    def solve(a, Sa, b, Sb, k):
        if k <= 0:
            return
        if k == 1:
            fa, fb = F(a), F(b)
            if fa * fb < 0:
                r, info = brentq(F, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200,
                                 full_output=True, disp=False)
                if not info.converged:
                    raise RootRefinementError("Brent iteration failed", bracket=(a, b), values=(fa, fb))
                roots.append((r, 1))
                return
        if b - a < cluster_width:
            cluster(a, b, k)
            return
        m, Sm = counter.point(0.5 * (a + b))
        if not a < m < b:
            cluster(a, b, k)
            return
        km = counter.count(a, Sa, m, Sm)
        solve(a, Sa, m, Sm, km)
        solve(m, Sm, b, Sb, k - km)

    for (a, Sa), (b, Sb) in zip(grid[:-1], grid[1:]):
        solve(a, Sa, b, Sb, counter.count(a, Sa, b, Sb))

    out = []
    for r, k in sorted(roots):
        if r < lo - 1e-9 or r > hi + 1e-9:
            continue
        null = nullity(np.eye(sys.n) - sys.monodromy(r), rtol=RANK_TOL)
        if null != k:
            raise RootRefinementError(
                f"multiplicity mismatch at {r}: count {k}, nullity {null}", bracket=(r, r), values=(k, null)
            )
        out.append((r, k))
    return out


def _components(T: np.ndarray) -> list[list[int]]:
    n = T.shape[0]
    adj = (np.abs(T) > _PATTERN_TOL) | (np.abs(T.T) > _PATTERN_TOL)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.nonzero(adj[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class Progression:
    """Eigenvalues (2 pi / period)(offset + Z), each with the given multiplicity."""

    period: float
    offset: float
    multiplicity: int = 1


def progressions(sys: IntervalSystem) -> list[Progression]:
    """Decompose the spectrum into arithmetic progressions, when the structure allows it.

    Components of the nonzero pattern of T are handled separately.  A
    component whose block is monomial splits into cycles, each giving one
    progression.  A component whose intervals share one length gives one
    progression per eigenvalue of the reduced unitary (Phi T)^{-1}.
    """
    T = sys.transmission
    lengths = np.asarray(sys.lengths)
    Phi = np.exp(-1j * sys.phases)
    out: list[Progression] = []
    for comp in _components(T):
        block = T[np.ix_(comp, comp)]
        nz = np.abs(block) > _PATTERN_TOL
        if np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1):
            # U[i, j] = Phi_i e^{i lam l_i} T[i, j]; follow j -> i
            nxt = {comp[j]: comp[int(np.nonzero(nz[:, j])[0][0])] for j in range(len(comp))}
            visited: set[int] = set()
            for start in comp:
                if start in visited:
                    continue
                j, P, Lc = start, 1.0 + 0j, 0.0
                while True:
                    visited.add(j)
                    i = nxt[j]
                    P *= Phi[i] * T[i, j]
                    Lc += lengths[i]
                    j = i
                    if j == start:
                        break
                out.append(Progression(Lc, -float(np.angle(P)) / TWO_PI))
            continue
        ell = lengths[comp]
        if np.max(np.abs(ell - ell[0])) < 1e-12:
            R = np.linalg.inv(np.diag(Phi[comp]) @ block)
            ev = np.linalg.eigvals(R)
            ang = np.mod(np.angle(ev), TWO_PI)
            for th in ang:
                out.append(Progression(float(ell[0]), float(th) / TWO_PI))
            continue
        raise UnsupportedStructureError(
            "spectrum is not a union of arithmetic progressions for this transmission pattern"
        )
    return out


def bvp_eta_xi(sys: IntervalSystem) -> EtaResult:
    """eta(0) and xi from the progression structure of the spectrum."""
    progs = progressions(sys)
    eta0 = 0.0
    kernel = 0
    for pr in progs:
        rho = frac_part(pr.offset, tol=RANK_TOL)
        if rho == 0.0:
            kernel += pr.multiplicity
        else:
            eta0 += pr.multiplicity * (1.0 - 2.0 * rho)
    rho_single = frac_part(progs[0].offset, tol=RANK_TOL) if len(progs) == 1 else None
    return EtaResult(eta0=eta0, xi=0.5 * (kernel + eta0), kernel_dim=kernel, rho=rho_single)


def boundary_index(n: int, V_dim: int) -> int:
    """Index of the operator with boundary subspace V of dimension V_dim in C^{2n}."""
    if not 0 <= V_dim <= 2 * n:
        raise DomainError("V_dim must lie in [0, 2n]")
    return V_dim - n


def split_equivalence_residual(
    P: MeasurePotential,
    partition: Sequence[float],
    f: Callable,
    n_samples: int = 2048,
    cheb_degree: int = 40,
) -> dict:
    """Check that the circle resolvent solves the split boundary value problem.

    u = (i + D)^{-1} f is evaluated from the explicit formula.  On each smooth
    piece a Chebyshev interpolant of u is differentiated to measure the ODE
    residual -i u' + (a + i) u - f.  Jump and wrap conditions are checked
    with one-sided values.  Returns the three maxima and their overall max.
    """
    from_split(P, partition)  # validates the partition
    L = P.length
    op = CircleOperator(P)
    pts = sorted({0.0, L, *map(float, partition)})
    cuts = np.unique(np.concatenate([P.breakpoints, pts]))

    def u_right(t):
        return resolvent_apply(op, f, t)

    def u_left(t):
        return resolvent_apply(op, f, t, left=True)

    per_piece = max(n_samples // max(len(cuts) - 1, 1), 8)
    ode = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        # interior values do not see the jump convention
        cheb = np.polynomial.Chebyshev.interpolate(u_right, cheb_degree, domain=[a, b])
        du = cheb.deriv()
        x = np.linspace(a, b, per_piece + 2)[1:-1]
        uu = cheb(x)
        res = -1j * du(x) + (P.ac.density(x) + 1j) * uu - f(x)
        ode = max(ode, float(np.max(np.abs(res))))

    jump_res = 0.0
    jumps = dict(P.jumps)
    for tj in pts[1:-1]:
        c = next((cj for pj, cj in jumps.items() if abs(pj - tj) <= 1e-12), 0.0)
        up = u_right(tj)[0]
        um = u_left(tj)[0]
        jump_res = max(jump_res, abs(up - np.exp(-1j * c) * um))

    wrap_res = float(abs(u_left(L)[0] - u_right(0.0)[0]))
    return {"ode": ode, "jump": float(jump_res), "wrap": wrap_res, "max": max(ode, float(jump_res), wrap_res)}
