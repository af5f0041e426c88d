import pytest

from utils import utils_errors
from utils.utils_errors import ErrorCode, GridTooCoarseError, ToolkitError


def toolkit_errors() -> list[type[ToolkitError]]:
    return [getattr(utils_errors, name) for name in utils_errors.__all__ if name.endswith("Error") and name != "ToolkitError"]


def test_every_error_has_its_own_exit_status():
    statuses = [error.exit_code for error in toolkit_errors()]
    assert len(statuses) == len(ErrorCode)
    assert sorted(statuses) == list(range(2, 2 + len(ErrorCode)))


def test_every_error_has_its_own_code():
    assert {error.code for error in toolkit_errors()} == set(ErrorCode)


@pytest.mark.parametrize("error", toolkit_errors())
def test_structured_message(error):
    message = error("something went wrong").structured()
    assert message == f"ERROR {error.code.value}: something went wrong"


def test_detail_is_kept():
    with pytest.raises(ToolkitError) as info:
        raise GridTooCoarseError("spacing 0.1 exceeds epsilon 0.01")
    assert info.value.detail == "spacing 0.1 exceeds epsilon 0.01"
    assert info.value.exit_code == 7
