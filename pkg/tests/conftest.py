import pytest

from mpstlab.config import CommModel, MergeCriterion, SemanticsConfig, preset
from mpstlab.examples import list_examples, load_example


@pytest.fixture(scope="session")
def bundled():
    return {name: load_example(name) for name in list_examples()}


@pytest.fixture(scope="session")
def permissive_full():
    """Everything allowed, full merge; used to obtain locals for execution."""
    return SemanticsConfig(merge=MergeCriterion.FULL)


@pytest.fixture(scope="session")
def sync_cfg(permissive_full):
    return permissive_full.with_overrides(comm_model=CommModel.SYNC)


@pytest.fixture(scope="session")
def ordered_cfg(permissive_full):
    return permissive_full.with_overrides(comm_model=CommModel.ORDERED)


@pytest.fixture(scope="session")
def unordered_cfg(permissive_full):
    return permissive_full.with_overrides(comm_model=CommModel.UNORDERED)
