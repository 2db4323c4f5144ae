import pytest

from slicegm import checks, corpus
from slicegm.deriv import apply, is_lnd, verify_slice
from slicegm.morph import AutomorphismPair

ENTRIES = corpus.entries()


def test_names_unique():
    names = [e.name for e in ENTRIES]
    assert len(names) == len(set(names))


def test_families_present():
    names = {e.name for e in ENTRIES}
    assert {"n1-ddx", "n2-ddy", "n2-ddy-offset", "danielewski"} <= names
    for f, g in (("1", "0"), ("x", "1"), ("x2", "1"), ("x", "1+x")):
        assert f"n3-wang-{f}-{g}" in names
    assert any("shift" in n for n in names)
    assert corpus.get("n1-ddx").ctx.n == 1
    with pytest.raises(KeyError):
        corpus.get("nope")


@pytest.mark.parametrize("entry", corpus.lnd_entries(), ids=lambda e: e.name)
def test_entry_is_consistent(entry):
    assert is_lnd(entry.D).confirmed
    assert verify_slice(entry.D, entry.s)
    for a in entry.kernel_generators:
        assert apply(entry.D, a).is_zero()
    if entry.phi is not None:
        AutomorphismPair(entry.phi.forward, entry.phi.inverse)


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_entry_report_passes(entry):
    rep = checks.corpus_entry_report(entry)
    bad = [c for c in rep.checks if c.status in ("fail", "unknown")]
    assert not bad, bad
    assert rep.exit_code == 0


def test_report_rejects_bare_fail():
    rep = checks.Report("t")
    with pytest.raises(ValueError):
        rep.add("x", checks.FAIL, "no residual")


def test_report_exit_codes():
    rep = checks.Report("t")
    rep.add("a", checks.PASS)
    assert rep.exit_code == 0
    rep.add("b", checks.UNKNOWN)
    assert rep.exit_code == 1
    rep.internal_error = True
    assert rep.exit_code == 3
