"""
Unit tests for the property suites behind ``verify``.
"""

import math

import pytest

from core import verification
from core.verification import (
    SUITE_NAMES,
    CheckResult,
    SuiteResult,
    run_check,
    run_suite,
    run_suites,
    suite_checks,
)


class TestCheckResult:
    """Test cases for per-check bookkeeping."""

    def test_tracks_worst_slack(self):
        result = CheckResult("c", 1e-9)
        for seed, slack in enumerate([0.3, 0.1, 0.2]):
            result.record(seed, slack)
        assert result.runs == 3
        assert result.worst_slack == 0.1
        assert result.worst_seed == 1
        assert result.passed

    def test_tolerance(self):
        result = CheckResult("c", 1e-6)
        result.record(0, -1e-7)
        assert result.passed
        result.record(1, -1e-5)
        assert result.violations == [1]

    def test_nan_is_a_violation(self):
        result = CheckResult("c", 1e-9)
        result.record(0, 1.0)
        result.record(5, math.nan)
        assert result.violations == [5]
        assert math.isnan(result.worst_slack)

    def test_suite_passes_only_when_every_check_passes(self):
        good, bad = CheckResult("good", 0.0), CheckResult("bad", 0.0)
        good.record(0, 1.0)
        bad.record(0, -1.0)
        assert SuiteResult("s", [good]).passed
        assert not SuiteResult("s", [good, bad]).passed
        assert SuiteResult("s", [good, bad]).to_dict()["checks"][1]["violations"] == [0]


class TestSuites:
    """Test cases for suite assembly and execution."""

    @pytest.mark.parametrize("suite", SUITE_NAMES)
    def test_suites_have_checks(self, suite):
        assert suite_checks(suite)

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            suite_checks("fuzz")

    def test_unseeded_checks_run_once(self):
        result = run_suite("bounds", 0)
        telescoping = next(c for c in result.checks if c.name == "telescoping")
        assert telescoping.runs == 1
        assert telescoping.passed
        assert all(c.runs == 0 for c in result.checks if c.name != "telescoping")

    def test_seed_offset_from_settings(self, mocker, settings_override):
        settings_override(suite_seed_offset=40)
        seen = []
        mocker.patch.object(verification, "suite_checks", return_value=[
            verification.Check("seed_log", lambda seed: seen.append(seed) or 1.0, 0.0)])
        run_suite("bounds", 3)
        assert seen == [40, 41, 42]

    def test_explicit_offset_wins(self, mocker, settings_override):
        settings_override(suite_seed_offset=40)
        seen = []
        mocker.patch.object(verification, "suite_checks", return_value=[
            verification.Check("seed_log", lambda seed: seen.append(seed) or 1.0, 0.0)])
        run_suite("bounds", 2, seed_offset=0)
        assert seen == [0, 1]

    def test_run_check_seed_block(self):
        seen = []
        check = verification.Check("count", lambda seed: seen.append(seed) or 1.0 - seed % 2, 0.0)
        result = run_check(check, 4, seed_offset=10)
        assert seen == [10, 11, 12, 13]
        assert result.runs == 4 and result.passed

    def test_all_expands_to_every_suite(self, mocker):
        run = mocker.patch.object(verification, "run_suite", side_effect=lambda n, s, o: SuiteResult(n))
        results = run_suites("all", 2, 5)
        assert [r.suite for r in results] == list(SUITE_NAMES)
        run.assert_any_call("oracle", 2, 5)

    def test_coincidence_suite_passes(self):
        result = run_suite("coincidence", 2)
        assert result.passed, result.to_dict()


class TestChecks:
    """A few seeds of each property check."""

    @pytest.mark.oracle
    @pytest.mark.parametrize("check", [
        verification.check_markov_oracle,
        verification.check_sleeping_oracle,
        verification.check_fresh_universe,
        verification.check_growing_universe,
        verification.check_sleeping_universe,
    ])
    def test_oracle_checks(self, check):
        for seed in range(2):
            assert check(seed) >= -1e-9

    @pytest.mark.bounds
    @pytest.mark.parametrize("check", [
        verification.check_growing_hedge_bound,
        verification.check_mixture_bound,
        verification.check_specialist_bound,
        verification.check_markov_bound,
        verification.check_exp_concavity,
        verification.check_fresh_admissible_bounds,
        verification.check_sparse_bounds,
        verification.check_sleeping_exact_bound,
        verification.check_sparse_display,
        verification.check_share_bounds,
    ])
    def test_bound_checks(self, check):
        for seed in range(4):
            assert check(seed) >= -1e-9

    def test_telescoping(self):
        assert verification.check_telescoping(0) >= -1e-12
