import pytest

from ordrank.subshift import SubshiftSpec


@pytest.fixture
def full_shift():
    return SubshiftSpec(alphabet=("0", "1"), forbidden=())


@pytest.fixture
def golden_mean():
    return SubshiftSpec(alphabet=("0", "1"), forbidden=("11",))


@pytest.fixture
def forbid_01():
    return SubshiftSpec(alphabet=("0", "1"), forbidden=("01",))
