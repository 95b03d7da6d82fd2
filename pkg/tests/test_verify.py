import pytest

from convexsplit import verify as vf


@pytest.mark.parametrize("suite", [s for s in vf.SUITE_NAMES if s != "all"])
def test_suite_green(suite):
    results = vf.run_suite(suite, trials=20, seed=3)
    failed = [(r.name, r.worst, r.counterexample) for r in results if not r.passed]
    assert not failed


def test_every_property_has_a_tolerance():
    names = [n for props in vf.SUITES.values() for n, _, _ in props]
    assert sorted(names) == sorted(vf.TOLERANCES)


def test_unknown_suite():
    with pytest.raises(ValueError):
        vf.run_suite("nope")


def test_seeded_runs_repeat():
    a = [r.worst for r in vf.run_suite("core", 10, seed=1)]
    b = [r.worst for r in vf.run_suite("core", 10, seed=1)]
    assert a == b
