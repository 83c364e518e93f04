"""Spectral invariants of one-dimensional Dirac operators with measure potentials.

The package computes spectra, eta and xi invariants and spectral flows of
Dirac operators on circles and on interval systems with transmission
conditions, the tau invariant and Kashiwara index of hermitian lagrangians,
and checks the index identities of the pair-of-pants degeneration.
"""

from .circle import CircleOperator, EtaResult, eta_xi, spectral_flow, spectrum
from .interval_bvp import IntervalSystem, bvp_eta_xi, bvp_spectrum, from_split
from .lagrangian import HermitianLagrangian, kashiwara_index, tau
from .pants import PantsScenario
from .potentials import MeasurePotential

__version__ = "0.1.0"

__all__ = [
    "CircleOperator",
    "EtaResult",
    "HermitianLagrangian",
    "IntervalSystem",
    "MeasurePotential",
    "PantsScenario",
    "bvp_eta_xi",
    "bvp_spectrum",
    "eta_xi",
    "from_split",
    "kashiwara_index",
    "spectral_flow",
    "spectrum",
    "tau",
]
