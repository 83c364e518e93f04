"""Hermitian lagrangians in E+ (+) E- stored through their graph unitaries.

With J = diag(-i I, i I) the lagrangian Gamma_T has J Gamma_T = Gamma_{-T}.
Intersections reduce to kernels: dim(Gamma_A cap Gamma_B) = dim ker(A - B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .circle import EtaResult, frac_part
from .errors import DomainError, NumericalConsistencyError
from .interval_bvp import as_unitary, matrix_from_json, matrix_to_json
from .numerics import RANK_TOL, TWO_PI, eigen_angles, nullity, principal_log_trace


@dataclass(frozen=True, eq=False)
class HermitianLagrangian:
    graph: np.ndarray

    def __post_init__(self):
        T = as_unitary(self.graph)
        T.setflags(write=False)
        object.__setattr__(self, "graph", T)

    @property
    def n(self) -> int:
        return self.graph.shape[0]

    def J(self) -> "HermitianLagrangian":
        """The orthogonal complement J L, whose graph unitary is -T."""
        return HermitianLagrangian(-self.graph)

    def to_json(self) -> list:
        return matrix_to_json(self.graph)

    @classmethod
    def from_json(cls, rows) -> "HermitianLagrangian":
        return cls(matrix_from_json(rows))


LagLike = Union[HermitianLagrangian, np.ndarray, Sequence]


def _graph(L: LagLike) -> np.ndarray:
    if isinstance(L, HermitianLagrangian):
        return L.graph
    return as_unitary(L)


def _same_dim(*Ts: np.ndarray) -> None:
    if len({T.shape for T in Ts}) != 1:
        raise DomainError("lagrangians must have the same dimension")


def tau(T0: LagLike, T1: LagLike) -> float:
    """(1 / 2 pi i) tr log(T1^{-1} T0), with log(-1) = i pi."""
    A, B = _graph(T0), _graph(T1)
    _same_dim(A, B)
    return principal_log_trace(B.conj().T @ A).imag / TWO_PI


def intersection_dim(L0: LagLike, L1: LagLike) -> int:
    """dim(L0 cap L1)."""
    A, B = _graph(L0), _graph(L1)
    _same_dim(A, B)
    return nullity(A - B, rtol=RANK_TOL)


def kashiwara_raw(L0: LagLike, L1: LagLike, L2: LagLike) -> float:
    return tau(L1, L0) + tau(L2, L1) + tau(L0, L2)


def kashiwara_index(L0: LagLike, L1: LagLike, L2: LagLike, tol: float = 1e-6) -> int:
    """omega(L0, L1, L2) = tau(L1, L0) + tau(L2, L1) + tau(L0, L2), an integer."""
    w = kashiwara_raw(L0, L1, L2)
    k = round(w)
    if abs(w - k) > tol:
        raise NumericalConsistencyError(f"Kashiwara index {w!r} is not an integer")
    return int(k)


def triple_defect(L0: LagLike, L1: LagLike, L2: LagLike) -> int:
    """d = dim(J L0 cap L1) + dim(J L1 cap L2) + dim(J L2 cap L0)."""
    A, B, C = _graph(L0), _graph(L1), _graph(L2)
    return nullity(A + B) + nullity(B + C) + nullity(C + A)


def pair_angles(L0: LagLike, L1: LagLike) -> np.ndarray:
    """Angles in (0, 2 pi] of the eigenvalues of T1^{-1} T0."""
    A, B = _graph(L0), _graph(L1)
    _same_dim(A, B)
    return eigen_angles(B.conj().T @ A)


def pair_spectrum(L0: LagLike, L1: LagLike, window: Sequence[float]) -> list[tuple[float, int]]:
    """Spectrum of the two-lagrangian operator on [0, 1]: union of theta_k / 2 + pi Z."""
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise DomainError("window must be a bounded interval")
    ang = np.sort(pair_angles(L0, L1))
    groups: list[list[float]] = []
    for th in ang:
        if groups and abs(th - groups[-1][-1]) < 1e-9:
            groups[-1].append(th)
        else:
            groups.append([th])
    # angles just below 2 pi and just above 0 describe the same progression
    if len(groups) > 1 and groups[0][0] + TWO_PI - groups[-1][-1] < 1e-9:
        groups[0] = [g - TWO_PI for g in groups.pop()] + groups[0]
    out = []
    for g in groups:
        base = 0.5 * float(np.mean(g))
        mult = len(g)
        for m in range(math.floor((lo - base) / math.pi) - 1, math.ceil((hi - base) / math.pi) + 2):
            lam = base + m * math.pi
            if lo <= lam <= hi:
                out.append((lam, mult))
    out.sort()
    return out


def pair_xi(L0: LagLike, L1: LagLike) -> EtaResult:
    """Reduced eta of the two-lagrangian operator from the angles of T1^{-1} T0."""
    ang = pair_angles(L0, L1)
    kernel = int(np.sum(ang == TWO_PI))
    eta0 = float(np.sum(1.0 - ang[ang < TWO_PI] / math.pi))
    rho = frac_part(ang[0] / TWO_PI, tol=RANK_TOL) if ang.size == 1 else None
    return EtaResult(eta0=eta0, xi=0.5 * (kernel + eta0), kernel_dim=kernel, rho=rho)


def xi_via_tau(L0: LagLike, L1: LagLike) -> float:
    """tau(J L1, L0), which equals the reduced eta of the pair."""
    return tau(-_graph(L1), _graph(L0))
