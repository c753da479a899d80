import pytest

from evoloop.actor.backends import ScriptedBackend
from evoloop.actor.sampling import SamplingConfig, sample_trajectories
from evoloop.env import instructions_load, registry_load
from evoloop.resources import fixture_path


@pytest.fixture(scope="session")
def registry():
    return registry_load(fixture_path("apis.json"))


@pytest.fixture(scope="session")
def instructions():
    return instructions_load(fixture_path("instructions.json"))


@pytest.fixture(scope="session")
def train_instructions(instructions):
    return [i for i in instructions if i.split == "train"]


@pytest.fixture(scope="session")
def eval_instructions(instructions):
    return [i for i in instructions if i.split == "eval"]


@pytest.fixture(scope="session")
def instructions_by_id(instructions):
    return {i.id: i for i in instructions}


def rollout_script(instruction, registry, raws, m=5, iteration=0):
    """Run one scripted trajectory through the real sampling machinery."""
    backend = ScriptedBackend({instruction.id: list(raws)})
    cfg = SamplingConfig(k=1, m=m, temperature=0.0, seed=0)
    [trajectory] = sample_trajectories([instruction], backend, cfg, registry,
                                       iteration=iteration)
    return trajectory


@pytest.fixture(scope="session")
def rollout():
    return rollout_script
