"""scikit-learn style front end: ``fit`` a marked set, ``predict`` p(t)."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import build_graph, check_marked, check_times
from .simulator import probability_curve
from .spectra import build_model
from .solver import model_probability, solve


class QuantumWalkSearch(BaseEstimator):
    """Spectral search model for one graph.

    ``fit(marked)`` builds the analytic spectral model and solves for the
    searching eigenphase; afterwards ``lambda_``, ``t_opt_``, ``p_succ_`` and
    ``t_run_`` hold the results and ``predict(t)`` returns
    ``p_succ sin^2(lambda t)``.

    Parameters
    ----------
    graph : {"lattice", "hypercube"}
    size : int
        Lattice side or hypercube dimension.
    n_probes : int
        Probe count for the root bracket.
    """

    def __init__(self, graph="hypercube", size=10, n_probes=512):
        self.graph = graph
        self.size = size
        self.n_probes = n_probes

    def fit(self, X, y=None):
        g = build_graph(self.graph, self.size)
        marked = check_marked(g, X)
        self.graph_ = g
        self.marked_ = marked
        self.model_ = build_model(g.kind, g.size, marked)
        self.solution_ = solve(self.model_, n_probes=self.n_probes)
        self.lambda_ = self.solution_.lam
        self.t_opt_ = self.solution_.t_opt
        self.p_succ_ = self.solution_.p_succ
        self.t_run_ = self.solution_.t_run
        return self

    def predict(self, t):
        check_is_fitted(self, "solution_")
        return model_probability(self.solution_, check_times(t))

    def simulate(self, t_max=None) -> np.ndarray:
        """Brute-force ``p(t)`` for ``t = 0..t_max`` on the fitted instance."""
        check_is_fitted(self, "solution_")
        if t_max is None:
            t_max = max(1, int(np.ceil(2 * self.t_opt_)))
        return probability_curve(self.graph_, self.marked_, t_max).p

    def score(self, X=None, y=None, t_max=None) -> float:
        """Negative max deviation between model and simulated curves."""
        p_sim = self.simulate(t_max)
        p_mod = self.predict(np.arange(len(p_sim)))
        return -float(np.abs(p_sim - p_mod).max())
