"""End-to-end checks of the index identities on pants scenarios.

Every identity is evaluated along at least two independent routes and the
result is collected in a :class:`VerificationReport` with one row per identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circle import circle_from_omega, crossing_count_flow, eta_from_omega, eta_xi
from .errors import DegenerateError, NumericalConsistencyError
from .interval_bvp import bvp_eta_xi
from .lagrangian import HermitianLagrangian, kashiwara_index, kashiwara_raw, pair_spectrum, tau
from .pants import (
    PantsScenario,
    cauchy_data_lagrangian,
    limit_system,
    omega_limits,
    omega_t,
    omega_t_split,
    transmission_matrices,
)

DEGENERACY_TOL = 1e-9
INTEGER_TOL = 1e-9


@dataclass(frozen=True)
class IdentityRow:
    identity: str
    lhs: float
    rhs: float
    residual: float
    tol: float
    status: str  # "pass", "fail" or "inconclusive"


@dataclass
class VerificationReport:
    scenario_id: str
    rows: list[IdentityRow] = field(default_factory=list)
    reason: str = ""

    def add(self, identity: str, lhs: float, rhs: float, tol: float) -> IdentityRow:
        res = float(lhs) - float(rhs)
        row = IdentityRow(identity, float(lhs), float(rhs), res, tol, "pass" if abs(res) <= tol else "fail")
        self.rows.append(row)
        return row

    def mark_inconclusive(self, identity: str, reason: str) -> None:
        self.rows.append(IdentityRow(identity, math.nan, math.nan, math.nan, 0.0, "inconclusive"))
        self.reason = reason

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.rows)

    @property
    def inconclusive(self) -> bool:
        return any(r.status == "inconclusive" for r in self.rows)

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.rows)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.rows.extend(other.rows)
        return self

    def text(self) -> str:
        lines = [f"scenario {self.scenario_id}"]
        for r in self.rows:
            lines.append(f"  {r.identity:<24} lhs={r.lhs:.12g} rhs={r.rhs:.12g} residual={r.residual:.3e} {r.status}")
        return "\n".join(lines)


def _near_int(x: float, tol: float = DEGENERACY_TOL) -> bool:
    return abs(x - round(x)) < tol


def _as_int(x: float, what: str) -> int:
    k = round(x)
    if abs(x - k) > INTEGER_TOL:
        raise NumericalConsistencyError(f"{what} = {x!r} is not an integer")
    return int(k)


def aps_index(chi: int, H_list: Sequence[float], strict: bool = True) -> tuple[int, bool]:
    """(chi - n) / 2 - sum floor(H_i) for a surface with n boundary circles."""
    n = len(H_list)
    nondeg = not any(_near_int(h) for h in H_list)
    if strict and not nondeg:
        raise DegenerateError("a boundary weight is an integer; the boundary operator has a kernel")
    if (chi - n) % 2:
        raise DegenerateError("chi - n must be even")
    return (chi - n) // 2 - sum(math.floor(h) for h in H_list), nondeg


@dataclass(frozen=True)
class BoundaryData:
    omega_1: float
    omega_m1_a: float
    omega_m1_b: float

    @property
    def omega_m1(self) -> float:
        return self.omega_m1_a + self.omega_m1_b


def boundary_data(sc: PantsScenario) -> BoundaryData:
    a, b = omega_t_split(sc, -1.0)
    return BoundaryData(omega_t(sc, 1.0), a, b)


def _check_boundary(bd: BoundaryData) -> None:
    for name, w in (("omega_1", bd.omega_1), ("omega_-1^a", bd.omega_m1_a), ("omega_-1^b", bd.omega_m1_b)):
        if _near_int(w):
            raise DegenerateError(f"{name} = {w!r} is an integer")


def aps_index_pants_raw(sc: PantsScenario) -> float:
    """-1/2 - omega_1 + omega_-1 - xi(D_1) + xi(D_-1), before rounding."""
    bd = boundary_data(sc)
    _check_boundary(bd)
    xi1 = eta_xi(circle_from_omega(bd.omega_1)).xi
    xim = eta_xi(circle_from_omega(bd.omega_m1_a)).xi + eta_xi(circle_from_omega(bd.omega_m1_b)).xi
    return -0.5 - bd.omega_1 + bd.omega_m1 - xi1 + xim


def aps_index_pants(sc: PantsScenario) -> int:
    return _as_int(aps_index_pants_raw(sc), "APS index")


def aps_index_pants_oracle(sc: PantsScenario) -> int:
    """The general index formula with the incoming boundary carrying the opposite normal."""
    bd = boundary_data(sc)
    return aps_index(-1, (bd.omega_1, -bd.omega_m1_a, -bd.omega_m1_b))[0]


def default_eps_grid(n: int = 80) -> np.ndarray:
    return np.unique(np.concatenate([np.geomspace(1e-9, 1.0, n), np.linspace(0.0, 1.0, n)[1:]]))


@dataclass(frozen=True)
class SFLimits:
    plus: int
    minus: int
    minus_a: int
    minus_b: int
    plus_crossing: int
    minus_crossing: int


def sf_limits(sc: PantsScenario, eps_grid: Optional[Sequence[float]] = None) -> SFLimits:
    """Spectral flows from the one-sided limits to t = 1 and from t = -1 to the limits.

    Route (i): floor differences through the xi form.  Route (ii): crossing
    counts along the sampled omega_t path completed by its limit value.
    """
    grid = np.sort(np.asarray(default_eps_grid() if eps_grid is None else eps_grid, dtype=float))
    grid = grid[grid > 0]
    if grid[-1] != 1.0:
        grid = np.append(grid, 1.0)
    lim = omega_limits(sc)
    bd = boundary_data(sc)
    for name, w in (("omega_0^+", lim.plus), ("omega_0^a-", lim.minus_a), ("omega_0^b-", lim.minus_b)):
        if _near_int(w):
            raise DegenerateError(f"{name} = {w!r} is an integer")
    _check_boundary(bd)

    def via_xi(w0: float, w1: float) -> int:
        return _as_int((w1 + eta_from_omega(w1).xi) - (w0 + eta_from_omega(w0).xi), "spectral flow")

    plus = via_xi(lim.plus, bd.omega_1)
    sf_a = via_xi(bd.omega_m1_a, lim.minus_a)
    sf_b = via_xi(bd.omega_m1_b, lim.minus_b)

    path_plus = [lim.plus] + [omega_t(sc, float(t)) for t in grid]
    neg = -grid[::-1]
    split = [omega_t_split(sc, float(t)) for t in neg]
    path_a = [w[0] for w in split] + [lim.minus_a]
    path_b = [w[1] for w in split] + [lim.minus_b]
    cross_plus = crossing_count_flow(path_plus)
    cross_minus = crossing_count_flow(path_a) + crossing_count_flow(path_b)
    if cross_plus != plus or cross_minus != sf_a + sf_b:
        raise NumericalConsistencyError(
            f"spectral flow routes disagree: plus {plus} vs {cross_plus}, minus {sf_a + sf_b} vs {cross_minus}"
        )
    return SFLimits(plus, sf_a + sf_b, sf_a, sf_b, cross_plus, cross_minus)


def xi_closed_forms(sc: PantsScenario) -> tuple[float, float]:
    """(xi_+, xi_-) from the fractional parts of the one-sided limits."""
    lim = omega_limits(sc)
    xi_p = eta_from_omega(lim.plus).xi
    xi_m = eta_from_omega(lim.minus_a).xi + eta_from_omega(lim.minus_b).xi
    return xi_p, xi_m


def _nondegenerate(sc: PantsScenario) -> Optional[str]:
    lim = omega_limits(sc)
    try:
        bd = boundary_data(sc)
    except Exception as exc:  # model-region errors and the like
        return str(exc)
    checks = {
        "omega_1": bd.omega_1,
        "omega_-1^a": bd.omega_m1_a,
        "omega_-1^b": bd.omega_m1_b,
        "omega_0^+": lim.plus,
        "omega_0^a-": lim.minus_a,
        "omega_0^b-": lim.minus_b,
    }
    for name, w in checks.items():
        if _near_int(w):
            return f"{name} = {w!r} is an integer"
    return None


def verify_main(sc: PantsScenario, eps_grid=None, tol: float = 1e-9) -> VerificationReport:
    rep = VerificationReport(sc.id)
    reason = _nondegenerate(sc)
    if reason:
        rep.mark_inconclusive("main", reason)
        return rep
    i_raw = aps_index_pants_raw(sc)
    i_aps = _as_int(i_raw, "APS index")
    rep.add("ind1_consistency", i_aps, aps_index_pants_oracle(sc), tol)
    sf = sf_limits(sc, eps_grid)
    rep.add("sf_plus_routes", sf.plus, sf.plus_crossing, tol)
    rep.add("sf_minus_routes", sf.minus, sf.minus_crossing, tol)
    xi_p, xi_m = xi_closed_forms(sc)
    rep.add("xi_plus_bvp", xi_p, bvp_eta_xi(limit_system(sc, "plus")).xi, tol)
    rep.add("xi_minus_bvp", xi_m, bvp_eta_xi(limit_system(sc, "minus")).xi, tol)
    lhs = i_raw + sf.plus + sf.minus + (xi_p - xi_m)
    rep.add("main", lhs, 0.0, tol)
    return rep


def predicted_pair_spectra(sc: PantsScenario, window: Sequence[float]):
    """Closed-form spectra of the pair operators for (Gamma_+, Lambda_0) and (Gamma_-, Lambda_0).

    plus: (pi / 4)((theta_+ / 2 pi - omega_0) + Z).
    minus: union over a, b of -(pi / 2)(theta_- / 4 pi + omega_0^*) + (pi / 2) Z.
    """
    lo, hi = window

    def prog(offset, step):
        k0 = math.floor((lo - offset) / step) - 1
        k1 = math.ceil((hi - offset) / step) + 1
        return [offset + k * step for k in range(k0, k1 + 1) if lo <= offset + k * step <= hi]

    plus = prog(math.pi / 4 * (sc.theta_plus / (2 * math.pi) - sc.omega0), math.pi / 4)
    minus = sorted(
        prog(-math.pi / 2 * (sc.theta_minus / (4 * math.pi) + w), math.pi / 2) for w in (sc.omega0_a, sc.omega0_b)
    )
    return plus, sorted(minus[0] + minus[1])


def _spectrum_mismatch(computed: list[tuple[float, int]], predicted: list[float]) -> float:
    vals = sorted(v for v, k in computed for _ in range(k))
    if len(vals) != len(predicted):
        return math.inf
    return float(np.max(np.abs(np.asarray(vals) - np.asarray(predicted)))) if vals else 0.0


def eta_kashi_check(sc: PantsScenario, tol: float = 1e-9, window=(-10.0, 10.0)) -> VerificationReport:
    rep = VerificationReport(sc.id)
    lim = omega_limits(sc)
    for name, w in (("omega_0^+", lim.plus), ("omega_0^a-", lim.minus_a), ("omega_0^b-", lim.minus_b)):
        if _near_int(w):
            rep.mark_inconclusive("eta_kashi", f"{name} is an integer; a limit operator has a kernel")
            return rep
    Tp, Tm = transmission_matrices(sc)
    L0 = cauchy_data_lagrangian(sc)
    JL0 = L0.J()
    rep.add("eta_kashi_plus", bvp_eta_xi(limit_system(sc, "plus")).xi, tau(Tp, JL0), tol)
    rep.add("eta_kashi_minus", bvp_eta_xi(limit_system(sc, "minus")).xi, tau(Tm, JL0), tol)
    pred_p, pred_m = predicted_pair_spectra(sc, window)
    spec_p = pair_spectrum(Tp, L0, window)
    spec_m = pair_spectrum(Tm, L0, window)
    rep.add("pair_spectrum_plus", _spectrum_mismatch(spec_p, pred_p), 0.0, 1e-10)
    rep.add("pair_spectrum_minus", _spectrum_mismatch(spec_m, pred_m), 0.0, 1e-10)
    return rep


def verify_kashi(sc: PantsScenario, eps_grid=None, tol: float = 1e-9) -> VerificationReport:
    rep = VerificationReport(sc.id)
    reason = _nondegenerate(sc)
    if reason:
        rep.mark_inconclusive("kashi", reason)
        return rep
    i_aps = aps_index_pants(sc)
    sf = sf_limits(sc, eps_grid)
    Tp, Tm = transmission_matrices(sc)
    JL0 = cauchy_data_lagrangian(sc).J()
    Gp, Gm = HermitianLagrangian(Tp), HermitianLagrangian(Tm)
    w_raw = kashiwara_raw(JL0, Gp, Gm)
    w = kashiwara_index(JL0, Gp, Gm)
    rep.add("kashiwara_integrality", w_raw, w, tol)
    rep.add("kashi", i_aps + sf.plus + sf.minus, -w, tol)
    rep.add("tau_T+_T-", tau(Tp, Tm), 0.0, 1e-12)
    xi_p, xi_m = xi_closed_forms(sc)
    rep.add("kashi_vs_xi", -w, -(xi_p - xi_m), tol)
    return rep


def verify_all(sc: PantsScenario, eps_grid=None, tol: float = 1e-9) -> VerificationReport:
    """verify_main, eta_kashi_check and verify_kashi merged into one report."""
    rep = verify_main(sc, eps_grid, tol)
    if rep.inconclusive:
        return rep
    rep.extend(eta_kashi_check(sc, tol))
    rep.extend(verify_kashi(sc, eps_grid, tol))
    return rep
