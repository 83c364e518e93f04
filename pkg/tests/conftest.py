import math

import numpy as np
import pytest

from dirac1d.potentials import BumpProfile, MeasurePotential, PiecewisePoly, SumProfile, TrigProfile


def random_unitary(rng, n):
    """Haar-distributed unitary from the QR of a complex gaussian matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_trig(rng, length, modes=3, scale=1.0):
    return TrigProfile(
        length,
        float(rng.normal(0, scale)),
        tuple(rng.normal(0, scale, modes) / np.arange(1, modes + 1)),
        tuple(rng.normal(0, scale, modes) / np.arange(1, modes + 1)),
    )


def random_nice_potential(rng, n_jumps=None, length=None):
    """Smooth part plus a few well separated jumps."""
    L = float(length if length is not None else rng.uniform(0.5, 3.0))
    k = int(rng.integers(0, 4) if n_jumps is None else n_jumps)
    pos = np.sort(rng.uniform(0.05, 0.95, k)) * L
    while k > 1 and np.min(np.diff(pos)) < 0.05 * L:
        pos = np.sort(rng.uniform(0.05, 0.95, k)) * L
    mags = rng.uniform(-3.0, 3.0, k)
    knots = np.linspace(0.0, L, 4)
    coeffs = rng.normal(0, 1.0, (3, 3))
    ac = SumProfile((random_trig(rng, L, 2), PiecewisePoly(tuple(knots), coeffs)), (1.0, 0.5))
    return MeasurePotential(L, ac, tuple(zip(pos.tolist(), mags.tolist())))


def random_partition(rng, P, extra=2):
    pts = set(P.jump_positions.tolist())
    pts |= set((rng.uniform(0.02, 0.98, extra) * P.length).tolist())
    return sorted(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


__all__ = ["random_unitary", "random_trig", "random_nice_potential", "random_partition", "BumpProfile"]


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
