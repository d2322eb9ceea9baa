import pytest

from bdgraph.suites import DEFAULT_SUITE_SEED, SUITE_NAMES, run_suite


def test_unknown_suite_raises():
    with pytest.raises(ValueError):
        run_suite("bogus")


def test_suite_names_fixed():
    assert SUITE_NAMES == ("identities", "drift", "limits", "oracle")


def test_quick_reports_are_deterministic():
    r1 = run_suite("oracle", seed=3, quick=True)
    r2 = run_suite("oracle", seed=3, quick=True)
    d1, d2 = r1.to_json_dict(), r2.to_json_dict()
    for d in (d1, d2):
        d.pop("timestamp")
        d.pop("elapsed_seconds")
    assert d1 == d2


def test_records_carry_tags_and_tolerances():
    report = run_suite("drift", seed=DEFAULT_SUITE_SEED, quick=True)
    assert report.passed
    for record in report.records:
        assert record.theorem
        assert record.tolerance
        assert record.estimate
    payload = report.to_json_dict()
    assert payload["suite"] == "drift"
    assert payload["environment"]["numpy"]
