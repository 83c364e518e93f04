"""Special functions, small unitary eigenproblems, quadrature and root refinement."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PreconditionError, RootRefinementError

TWO_PI = 2.0 * math.pi

# Singular values / eigenvalue distances below this (relative to the matrix
# norm, floored at 1) are treated as exact zeros.
RANK_TOL = 1e-8

# Euler-Maclaurin correction coefficients B_{2j}/(2j)!, j = 1..6.
_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0)
_EM_COEFFS = tuple(b / math.factorial(2 * (j + 1)) for j, b in enumerate(_BERNOULLI))


def hurwitz_zeta(s: float, a: float, n_terms: int = 20) -> float:
    """Hurwitz zeta function zeta(s, a) by Euler-Maclaurin summation.

    The tail after ``n_terms`` direct terms is replaced by the integral, the
    half endpoint term and Bernoulli corrections through B_12.  The formula is
    the analytic continuation, so it is valid for s <= 0 as well.
    """
    if s == 1:
        raise DomainError("hurwitz_zeta has a pole at s = 1")
    if not 0.0 < a <= 1.0:
        raise DomainError(f"hurwitz_zeta expects a in (0, 1], got {a!r}")
    k = np.arange(n_terms, dtype=float) + a
    head = float(np.sum(k ** (-s)))
    x = n_terms + a
    total = head + x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** (-s)
    rising = s  # s (s+1) ... (s+2j-2)
    for j, coeff in enumerate(_EM_COEFFS, start=1):
        total += coeff * rising * x ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return total


def _check_unitary(U: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {U.shape}")
    err = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) if U.size else 0.0
    if err > tol:
        raise DomainError(f"matrix is not unitary (|U*U - I| = {err:.3e})")
    return U


def unitary_eigs(U) -> np.ndarray:
    """Eigenvalues of a small unitary matrix, ordered by angle in (0, 2*pi].

    Eigenvalues within ``RANK_TOL`` of 1 are snapped to exactly 1 so that
    kernel counting downstream does not depend on round-off.
    """
    U = _check_unitary(U)
    if U.shape[0] > 16:
        raise PreconditionError("unitary_eigs is meant for matrices of size <= 16")
    lam = np.linalg.eigvals(U)
    lam = lam / np.abs(lam)
    lam[np.abs(lam - 1.0) < RANK_TOL] = 1.0
    return lam[np.argsort(_angles(lam))]


def _angles(lam: np.ndarray) -> np.ndarray:
    ang = np.angle(lam)
    return np.where(ang <= 0.0, ang + TWO_PI, ang)


def eigen_angles(U) -> np.ndarray:
    """Angles theta_k in (0, 2*pi] with exp(i theta_k) the eigenvalues of U."""
    lam = unitary_eigs(U)
    ang = _angles(lam)
    ang[lam == 1.0] = TWO_PI
    return ang


def principal_log_trace(U) -> complex:
    """tr log U with the branch that sends -1 to i*pi.

    Arguments are taken in (-pi, pi]; eigenvalues within ``RANK_TOL`` of -1
    contribute exactly i*pi.
    """
    U = _check_unitary(U)
    lam = np.linalg.eigvals(U)
    lam = lam / np.abs(lam)
    arg = np.angle(lam)
    arg[np.abs(lam + 1.0) < RANK_TOL] = math.pi
    arg[np.abs(lam - 1.0) < RANK_TOL] = 0.0
    return complex(0.0, float(np.sum(arg)))


def nullity(M, rtol: float = RANK_TOL) -> int:
    """Number of singular values of M below rtol * max(|M|, 1)."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv < rtol * max(sv[0], 1.0)))


def bracketed_roots(
    f: Callable[[float], float],
    window: Sequence[float],
    step: float,
    xtol: float = 1e-13,
    maxiter: int = 200,
) -> list[float]:
    """All sign-change roots of a continuous real function in ``window``.

    The window is scanned with the given step and each bracket is refined
    with Brent's method.  Roots of even multiplicity produce no sign change
    and are not reported.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise PreconditionError("window must satisfy lo < hi")
    if step <= 0:
        raise PreconditionError("step must be positive")
    n = max(int(math.ceil((hi - lo) / step)), 1)
    grid = np.linspace(lo, hi, n + 1)
    vals = np.array([f(x) for x in grid], dtype=float)
    roots: list[float] = []
    for i in range(n):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            try:
                r, info = brentq(f, a, b, xtol=xtol, maxiter=maxiter, full_output=True, disp=False)
            except (RuntimeError, ValueError) as exc:
                raise RootRefinementError(str(exc), bracket=(a, b), values=(fa, fb)) from exc
            if not info.converged:
                raise RootRefinementError(
                    f"no convergence in {maxiter} iterations", bracket=(a, b), values=(fa, fb)
                )
            roots.append(r)
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    return roots


class PanelQuadrature:
    """Composite Gauss-Legendre rule on panels that never straddle breakpoints.

    Parameters
    ----------
    breakpoints : sorted interval end points plus every interior point where
        the integrand may be non-smooth.
    order : Gauss nodes per panel.
    max_width : panels wider than this are split evenly.
    """

    def __init__(self, breakpoints: Sequence[float], order: int = 16, max_width: float | None = None):
        pts = np.unique(np.asarray(breakpoints, dtype=float))
        if pts.size < 2:
            raise PreconditionError("need at least two distinct breakpoints")
        edges = [pts[0]]
        for a, b in zip(pts[:-1], pts[1:]):
            k = 1 if max_width is None else max(int(math.ceil((b - a) / max_width)), 1)
            edges.extend(np.linspace(a, b, k + 1)[1:])
        self.edges = np.asarray(edges)
        self.order = order
        x, w = np.polynomial.legendre.leggauss(order)
        self._x, self._w = x, w
        a, b = self.edges[:-1, None], self.edges[1:, None]
        half = 0.5 * (b - a)
        self.nodes = (a + half * (x + 1.0)).ravel()
        self.weights = (half * w).ravel()
        self.panel_index = np.repeat(np.arange(len(self.edges) - 1), order)

    def integrate(self, f) -> complex | float:
        vals = f(self.nodes) if callable(f) else np.asarray(f)
        return np.sum(vals * self.weights)

    def cumulative(self, f: Callable, targets) -> np.ndarray:
        """Integral of f from the first breakpoint up to each target."""
        t = np.atleast_1d(np.asarray(targets, dtype=float))
        panel_vals = (f(self.nodes) * self.weights).reshape(-1, self.order).sum(axis=1)
        prefix = np.concatenate([[0.0], np.cumsum(panel_vals)])
        k = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.edges) - 2)
        a = self.edges[k]
        half = 0.5 * (t - a)
        nodes = a[:, None] + half[:, None] * (self._x + 1.0)
        partial = np.sum(f(nodes) * self._w, axis=1) * half
        return prefix[k] + partial
