import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qwsearch import QuantumWalkSearch
from qwsearch.exceptions import ConfigError, InvalidMarkedSet


def test_params_and_clone():
    est = QuantumWalkSearch(graph="lattice", size=8)
    assert est.get_params() == {"graph": "lattice", "size": 8, "n_probes": 512}
    c = clone(est.set_params(size=6))
    assert c.size == 6 and not hasattr(c, "solution_")


def test_fit_predict():
    est = QuantumWalkSearch("hypercube", 6).fit([0, 7])
    assert abs(est.lambda_ - 0.22955489205575952) < 1e-10
    assert math.isclose(est.predict(est.t_opt_), est.p_succ_)
    assert est.predict([0.0])[0] == 0.0
    assert est.score() > -0.15


def test_lattice_array_input():
    est = QuantumWalkSearch("lattice", 8).fit(np.array([[0, 0], [4, 4]]))
    assert abs(est.lambda_ - 0.21572980107667103) < 1e-10


def test_validation_errors():
    with pytest.raises(NotFittedError):
        QuantumWalkSearch().predict(1.0)
    with pytest.raises(ConfigError):
        QuantumWalkSearch("torus", 4).fit([0])
    with pytest.raises(ConfigError):
        QuantumWalkSearch("hypercube", 4.5).fit([0])
    with pytest.raises(InvalidMarkedSet):
        QuantumWalkSearch("hypercube", 4).fit([0, 0])
    with pytest.raises(InvalidMarkedSet):
        QuantumWalkSearch("hypercube", 4).fit([])
    with pytest.raises(ValueError):
        QuantumWalkSearch("hypercube", 4).fit([1]).predict([-1])
