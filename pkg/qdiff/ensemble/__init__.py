"""Ensemble runs, diffusion fits and Monte Carlo checks of the dephasing theory"""

from .runner import EnsembleStats, run_ensemble
from .fitting import DiffusionEstimate, FitQuality, fit_diffusion
from .dephasing import mc_dephasing, mc_pair_factor
from .sweep import SweepPoint, scaling_sweep

__all__ = ['EnsembleStats', 'run_ensemble', 'DiffusionEstimate', 'FitQuality', 'fit_diffusion', 'mc_dephasing', 'mc_pair_factor', 'SweepPoint', 'scaling_sweep']
