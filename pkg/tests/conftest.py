import numpy as np
import pytest

from aqsforge.forgery import SchemeSpec
from aqsforge.mat2core import SIGMA
from aqsforge.pauliparam import PRESETS, PauliCoeffs

SX, SY, SZ = SIGMA[1], SIGMA[2], SIGMA[3]
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)

# alpha_1 = 0 with beta_2 * gamma_3 != 0: the two-class case
TWO_CLASS_W = PauliCoeffs.from_array(np.array([np.sqrt(3), 1, np.sqrt(2), np.sqrt(2)]) / np.sqrt(8))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def identity_sx_sz():
    return SchemeSpec.two_general(PRESETS["I"], SX, SZ)


@pytest.fixture(params=["H", "Wa", "T", "I"])
def preset_name(request):
    return request.param


def three_pauli(name):
    return SchemeSpec.three_pauli(PRESETS[name])
