import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kanmat import synth
from kanmat.additive import FitConfig
from kanmat.matrix import compute_mkan, compute_pkan

DESK_N = 5000
DESK_SEED = 42


@pytest.fixture(scope="session")
def cfg():
    return FitConfig()


@pytest.fixture(scope="session")
def exp1():
    return synth.gen_nonlinear(DESK_N, DESK_SEED)


@pytest.fixture(scope="session")
def exp2():
    return synth.gen_heteroscedastic(DESK_N, DESK_SEED)


@pytest.fixture(scope="session")
def exp3_sorted():
    return synth.gen_lagged(DESK_N, DESK_SEED, ordering="sorted")


@pytest.fixture(scope="session")
def exp3_iid():
    return synth.gen_lagged(DESK_N, DESK_SEED, ordering="iid")


@pytest.fixture(scope="session")
def exp1_pkan(exp1, cfg):
    return compute_pkan(exp1, cfg)


@pytest.fixture(scope="session")
def exp1_mkan(exp1, cfg):
    return compute_mkan(exp1, cfg=cfg)


@pytest.fixture(scope="session")
def exp2_pkan(exp2, cfg):
    return compute_pkan(exp2, cfg)


@pytest.fixture(scope="session")
def exp3_pkan(exp3_sorted, cfg):
    return compute_pkan(exp3_sorted, cfg)
