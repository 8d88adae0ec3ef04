"""The self-check battery: every invariant holds on the corpus."""

import pytest

from specamb.checks import (
    CheckResult,
    check_bivariate_consistency,
    check_closed_form_agreement,
    check_lattice_monotonicity,
    check_mass_normalisation,
    check_partial_nonnegativity,
    check_recombination_identity,
    run_all,
)
from specamb.corpus import CORPUS_NAMES, build
from specamb.decomposition import decompose
from specamb.distribution import SchemaError


class TestRunAll:
    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_corpus_is_green(self, name):
        results = run_all(build(name))
        assert all(result.ok for result in results)

    def test_bivariate_gets_extra_check(self):
        names = [r.name for r in run_all(build("xor"))]
        assert "bivariate-consistency" in names

    def test_trivariate_skips_bivariate_check(self):
        names = [r.name for r in run_all(build("tbep"))]
        assert "bivariate-consistency" not in names

    def test_composite_target_gets_chain_checks(self):
        names = [r.name for r in run_all(build("tbc"))]
        assert "target-chain-rule" in names
        assert "conditional-corollaries" in names

    def test_scalar_target_skips_chain_checks(self):
        names = [r.name for r in run_all(build("and"))]
        assert "target-chain-rule" not in names
        assert "conditional-corollaries" not in names

    def test_composite_parity_runs_fifteen_checks(self):
        results = run_all(build("tbc"))
        assert len(results) == 15

    def test_unreachable_tolerance_fails_honestly(self):
        results = run_all(build("and"), tol=1e-20)
        assert any(not result.ok for result in results)
        assert all(result.worst >= 0.0 for result in results)

    def test_every_result_is_labelled(self):
        for result in run_all(build("unq")):
            assert result.name
            assert result.detail


class TestIndividualChecks:
    def test_mass_normalisation(self):
        result = check_mass_normalisation(build("xor"))
        assert result.ok
        assert result.worst == 0.0

    def test_recombination_identity(self):
        assert check_recombination_identity(build("and")).ok

    def test_monotonicity_accepts_prebuilt_table(self):
        dist = build("pwunq")
        table = decompose(dist)
        assert check_lattice_monotonicity(dist, table).ok

    def test_nonnegativity_worst_is_clamped(self):
        dist = build("rdnerr")
        result = check_partial_nonnegativity(dist, decompose(dist))
        assert result.ok
        assert result.worst == 0.0

    def test_closed_form_agreement(self):
        dist = build("tbep")
        assert check_closed_form_agreement(dist, decompose(dist)).ok

    def test_bivariate_consistency_needs_two_predictors(self):
        dist = build("tbep")
        with pytest.raises(SchemaError):
            check_bivariate_consistency(dist, decompose(dist))


class TestCheckResult:
    def test_str_formats_pass(self):
        line = str(CheckResult("demo", True, 0.0, "4 rows"))
        assert line == "pass  demo: 4 rows (worst 0)"

    def test_str_formats_failure(self):
        line = str(CheckResult("demo", False, 0.25, "broke"))
        assert line.startswith("FAIL  demo:")
        assert "0.25" in line
