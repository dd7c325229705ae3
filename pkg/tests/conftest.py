import numpy as np
import pytest

from sixvertex.model import HighestWeightData, ModelParams
from sixvertex.spectrum import diagonalize_sector, polynomiality_check


REFERENCE = dict(L=4, gamma=0.7, mu=(0.0, 0.0, 0.0, 0.0), phi1=1.0, phi2=1.0)


@pytest.fixture(scope="session")
def params():
    """Reference scenario: L=4, gamma=0.7, homogeneous, untwisted."""
    return ModelParams(**REFERENCE)


@pytest.fixture(scope="session")
def hw(params):
    return HighestWeightData(params)


@pytest.fixture(scope="session")
def generic_params():
    """Generic twisted, inhomogeneous point (away from any special locus)."""
    return ModelParams(L=4, gamma=0.7, mu=(0.11, -0.23, 0.31, 0.05),
                       phi1=1.3, phi2=0.8)


@pytest.fixture(scope="session")
def generic_hw(generic_params):
    return HighestWeightData(generic_params)


class OracleBank:
    """Session-wide store of sector eigendecompositions and fits."""

    def __init__(self):
        self._eigs = {}
        self._fits = {}

    def eigensystem(self, params, n):
        key = (params, n)
        if key not in self._eigs:
            self._eigs[key] = diagonalize_sector(params, n)
        return self._eigs[key]

    def fit(self, params, n, k):
        key = (params, n, k)
        if key not in self._fits:
            self._fits[key] = polynomiality_check(
                self.eigensystem(params, n).lam(k), params)
        return self._fits[key]


@pytest.fixture(scope="session")
def oracle():
    return OracleBank()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
