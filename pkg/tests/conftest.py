import pytest


@pytest.fixture
def announce(capsys):
    """Print an acceptance pass line past pytest's capture (reached only
    when every assertion in the criterion held)."""

    def _announce(criterion: int, message: str) -> None:
        with capsys.disabled():
            print(f"ACCEPTANCE {criterion} PASS: {message}")

    return _announce
