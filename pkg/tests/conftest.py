from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stabedp.encoder import EncoderParams, ProtocolSpec
from stabedp.gf import GFVector, HyperbolicExtension
from stabedp.pauli import Stabilizer

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

V = GFVector.parse

# [[4,2]] example: stabilizer <XXXX, ZZZZ> with its printed completion.  The
# printed eta_1 is replaced by eta_1 + xi_2 (same class) because the printed
# eta_1, eta_2 have symplectic product 1.
XI_42 = ["1111|0000", "0000|1111", "1100|0000", "1010|0000"]
ETA_42_PRINTED = ["0000|1110", "1110|0000", "0000|1010", "1010|1100"]
ETA_42 = ["0000|0001", "1110|0000", "0000|1010", "1010|1100"]


@pytest.fixture(scope="session")
def stab42() -> Stabilizer:
    return Stabilizer.from_generators([V(XI_42[0]), V(XI_42[1])])


@pytest.fixture(scope="session")
def ext42() -> HyperbolicExtension:
    return HyperbolicExtension(tuple(V(s) for s in XI_42), tuple(V(s) for s in ETA_42))


@pytest.fixture(scope="session")
def params42(stab42, ext42) -> EncoderParams:
    return EncoderParams.create(stab42, ext42)


@pytest.fixture(scope="session")
def spec42(stab42, params42) -> ProtocolSpec:
    return ProtocolSpec.from_class(stab42, params42.encoding_class())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
