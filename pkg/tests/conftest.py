import pytest
import sys
import os
sys.path.insert(1, os.path.abspath('.'))
import numpy as np
from cochainlab.models.random_complexes import RandomStreams, counterexample_y, linial_meshulam
from cochainlab.topology.complex import build_complex, complete_complex

ENV_KEYS = ("COCHAINLAB_SEED", "COCHAINLAB_JOBS", "COCHAINLAB_BUDGET", "COCHAINLAB_MAX_ORDER",
            "COCHAINLAB_OUT_DIR", "COCHAINLAB_LOG_LEVEL", "COCHAINLAB_STRICT")


@pytest.fixture
def clean_env(monkeypatch):
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    yield monkeypatch


@pytest.fixture
def tetrahedron_boundary():
    # K_4^2, a 2-sphere
    return complete_complex(4, 2)


@pytest.fixture
def k5_2():
    return complete_complex(5, 2)


@pytest.fixture
def non_pure():
    # K_4 with a single triangle
    return build_complex(4, 2, [(0, 1, 2)], complete_skeleton_dim=1)


@pytest.fixture
def dense_sample():
    return linial_meshulam(14, 2, 0.7, np.random.default_rng(11))


@pytest.fixture
def planted_sample():
    return counterexample_y(20, 2, 1.0, RandomStreams(5, 0))
