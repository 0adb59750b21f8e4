"""Forced 1D Burgers equation: finite-difference solver and POD-Galerkin reduced model."""
from .discretization import ConvectionScheme, Grid, cfl_timestep, central2, make_grid, upwind1, upwind2
from .fdsolver import BlowUpError, SimConfig, SimResult, SnapshotMatrix, euler_step, simulate
from .harness import PRESETS, CaseSpec, percent_error, run_all, run_case
from .linalg import SvdFactors, eigen_sym, svd
from .pod import POD, EnergySpectrum, PodBasis, covariance_crosscheck, energy_spectrum, truncate
from .rom import GalerkinROM, RomOperators, RomTrajectory, assemble, integrate, project_initial, reconstruct, rhs

__version__ = "0.1.0"
