"""Every acceptance criterion at its stated tolerance; one PASS/FAIL line each."""
import pytest

from zetaforms.acceptance import CRITERIA, run_one


@pytest.mark.parametrize("cid", sorted(CRITERIA), ids=lambda c: f"criterion_{c:02d}")
def test_criterion(cid, capsys):
    res = run_one(cid)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
