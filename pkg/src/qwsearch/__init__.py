"""Quantum walk search with several marked vertices: spectral models,
brute-force simulation, the eigenphase solver and asymptotic formulas."""

from .asymptotics import (
    AsymptoticPrediction,
    HypercubeSums,
    LatticeSums,
    c_estimate,
    conjecture_prediction,
    fubini,
    harmonic,
    hypercube_m2_prediction,
    hypercube_sums,
    lattice_closed_forms,
    lattice_s1,
    lattice_s2,
    lattice_s3,
    lemma_b1_check,
    lemma_b2_check,
)
from .estimator import QuantumWalkSearch
from .exceptions import *  # noqa: F401,F403
from .graphs import Hypercube, Lattice, MarkedSet, make_graph, random_marked
from .simulator import (
    ProbabilityCurve,
    WalkState,
    apply_step,
    dense_operator,
    probability_curve,
    smallest_nonzero_eigenphase,
)
from .solver import (
    LambdaSolution,
    b_coefficient,
    build_lambda_matrix,
    find_lambda,
    model_probability,
    series_lambda,
    solve,
)
from .spectra import (
    PhaseGroup,
    SpectralModel,
    build_generic_model,
    build_hypercube_model,
    build_lattice_model,
    build_model,
    krawtchouk,
)

__version__ = "0.1.0"
