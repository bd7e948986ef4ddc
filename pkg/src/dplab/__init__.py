"""Numerical laboratory for double-phase energies on grid-sampled fields:
growth densities and their structural checks, star-shaped covers with
squeeze-mollification operators, Orlicz-type norms, and convergence / gap
experiments.
"""

from .fields import Grid, Mollifier, ScalarField, VectorField, gradient, lp_norm, sample, sup_norm, truncate
from .geometry import Domain, PartitionOfUnity, StarCover, build_cover, build_partition
from .nfunctions import (
    AssumptionReport,
    DoublePhase,
    GrowthData,
    NFunctionSpec,
    Sampled1D,
    VarExpDoublePhase,
    biconjugate,
    exponent_range_ok,
    infimal_envelope,
    legendre,
    lemma_constants,
)
from .modular import luxemburg_norm, modular, sobolev_norm
from .approx import squeeze_mollify_ball, squeeze_mollify_general, squeeze_mollify_star
from .experiments import ExperimentReport, MinimizeResult, convergence_run, eval_functional, gap_probe, minimize

__version__ = "0.1.0"
