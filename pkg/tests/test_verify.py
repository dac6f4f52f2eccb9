"""The runtime verification suites must come up green on a clean build."""

import pytest

from frozenrank.verify import run_suite


def test_oracle_suite_green():
    results = run_suite("oracle")
    assert all(r.passed for r in results), [r.detail for r in results if not r.passed]


def test_lemmas_suite_green():
    results = run_suite("lemmas")
    assert len(results) >= 8
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_perturb_suite_green():
    results = run_suite("perturb")
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("everything")


def test_results_serialize():
    results = run_suite("oracle")
    payload = results[0].as_dict()
    assert set(payload) == {"name", "passed", "detail"}
