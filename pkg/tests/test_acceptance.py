"""Run every acceptance criterion as its own test.

Each test prints the criterion's one-line verdict directly to the terminal
(bypassing capture) so a plain pytest run shows the full scoreboard.
"""

import pytest

from nlcompete.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize(
    "number", [num for num, _name, _fn in CRITERIA], ids=[name for _num, name, _fn in CRITERIA]
)
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print(result.line())
    assert result.passed, result.line()
