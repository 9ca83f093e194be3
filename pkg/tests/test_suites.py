"""The randomized suite drivers themselves."""

import pytest

from ammseq import suites


class TestSuiteRunner:
    def test_groups_cover_known_names(self):
        assert set(suites.SUITE_GROUPS) == {
            "pricing", "duality", "greedy", "impossibility", "sandwich",
        }

    def test_unknown_group(self):
        with pytest.raises(KeyError):
            suites.run_suite("nosuch")

    def test_all_runs_everything(self):
        results = suites.run_suite("all", trials=60, seed=5)
        names = [r.name for r in results]
        assert len(names) == len(set(names)) == 11

    def test_fixed_seed_reproduces_summaries(self):
        a = suites.run_suite("pricing", trials=300, seed=9)
        b = suites.run_suite("pricing", trials=300, seed=9)
        assert [(r.name, r.trials, r.violations) for r in a] == [
            (r.name, r.trials, r.violations) for r in b
        ]

    def test_quick_passes(self):
        for r in suites.run_suite("duality", trials=400, seed=3):
            assert r.passed, r.summary()
        for r in suites.run_suite("sandwich", trials=60, seed=3):
            assert r.passed, r.summary()
        for r in suites.run_suite("greedy", trials=400, seed=3):
            assert r.passed, r.summary()

    def test_impossibility_reports_the_known_gap(self):
        (r,) = suites.run_suite("impossibility")
        assert r.trials == 342
        assert r.violations == 1
        assert r.detail["no_selection"] == 1
        assert r.detail["profit"] == 0
        assert r.detail["z_algebra"] == 0
