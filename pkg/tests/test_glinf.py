import pytest

from fockspace.audit import Status, check_relation, run_suite
from fockspace.coeffring import ONE, R, RS, S
from fockspace.config import AuditConfig
from fockspace.diagram import enumerate_diagrams
from fockspace.errors import ConfigurationError
from fockspace.fock import FockVector
from fockspace.glinf import (
    T_PAPER_W,
    T_STD,
    ConventionTable,
    EpsKind,
    bracket_inf,
    cleared_r4,
    corner_diag,
    e_inf,
    eps_diag,
    f_inf,
    literal_r4_relation,
    pairing_eps_alpha,
    suite_brackets,
    suite_glinf,
)


def basis_vector(diagram, coeff=ONE):
    return FockVector.basis(diagram, coeff)


class TestGenerators:
    def test_creation(self, phi0, y1, y2, y11):
        assert f_inf(0).on(phi0) == basis_vector(y1)
        assert f_inf(1).on(y1) == basis_vector(y11)
        assert f_inf(-1).on(y1) == basis_vector(y2)

    def test_annihilation(self, phi0, y1, y11):
        assert e_inf(1).on(y11) == basis_vector(y1)
        assert e_inf(0).on(y1) == basis_vector(phi0)
        assert e_inf(0).on(phi0).is_zero()

    def test_occupation_cartan(self, phi0, y1):
        assert eps_diag(0, EpsKind.A).on(phi0) == basis_vector(phi0, R)
        assert eps_diag(1, EpsKind.A).on(phi0) == basis_vector(phi0)
        assert eps_diag(0, EpsKind.B).on(y1) == basis_vector(y1)
        assert eps_diag(1, EpsKind.B).on(y1) == basis_vector(y1, S)

    def test_corner_tables(self, phi0, y1):
        assert corner_diag(0, T_PAPER_W).on(phi0) == basis_vector(phi0, S.inverse())
        assert corner_diag(0, T_STD).on(y1) == basis_vector(y1, S)
        assert corner_diag(7, T_PAPER_W).on(y1) == basis_vector(y1)

    def test_table_entries_must_be_monomials(self):
        with pytest.raises(ConfigurationError):
            ConventionTable(R + S, S)

    def test_table_parse(self):
        assert ConventionTable.parse("s^(-1), r^(-1)") == T_PAPER_W
        with pytest.raises(ConfigurationError):
            ConventionTable.parse("r")


class TestScalars:
    @pytest.mark.parametrize(
        "i, j, expected",
        [(3, 3, R * S.inverse()), (2, 3, R.inverse()), (4, 3, S), (0, 9, ONE)],
    )
    def test_bracket(self, i, j, expected):
        assert bracket_inf(i, j) == expected

    @pytest.mark.parametrize("i, j, expected", [(3, 3, 1), (4, 3, -1), (0, 5, 0)])
    def test_pairing(self, i, j, expected):
        assert pairing_eps_alpha(i, j) == expected


class TestCartanLaws:
    def test_ratio_law(self):
        for diagram in enumerate_diagrams(0, 6):
            for j in range(-8, 9):
                image = e_inf(j).on(diagram)
                if image.is_zero():
                    continue
                (target,) = image.terms
                for i in range(-8, 9):
                    before = eps_diag(i, EpsKind.A).eigenvalue(diagram)
                    after = eps_diag(i, EpsKind.A).eigenvalue(target)
                    assert after == before * R ** pairing_eps_alpha(i, j)

    def test_corner_table_matches_root_product(self):
        for diagram in enumerate_diagrams(0, 6) + enumerate_diagrams(3, 6):
            for i in range(diagram.charge - 8, diagram.charge + 9):
                corner = corner_diag(i, T_STD).eigenvalue(diagram)
                root = eps_diag(i, EpsKind.A).eigenvalue(diagram) * eps_diag(i + 1, EpsKind.B).eigenvalue(diagram)
                if (diagram.occupation(i), diagram.occupation(i + 1)) == (1, 1):
                    assert root == corner * RS
                else:
                    assert root == corner


class TestSuite:
    def test_window_must_be_ordered(self):
        with pytest.raises(ConfigurationError):
            suite_glinf((3, 2))

    def test_names_are_distinct_per_instance(self):
        labels = [rel.label for rel in suite_glinf((-2, 2))]
        assert len(labels) == len(set(labels))

    def test_r4_vacuum_member(self, phi0):
        rel = cleared_r4(0, 0)
        result = check_relation(rel, AuditConfig(charges=(0,), max_boxes=6))
        assert result.status is Status.HOLDS

    def test_literal_table_fails_r4_on_vacuum(self, phi0):
        result = check_relation(literal_r4_relation(0), AuditConfig(charges=(0,), max_boxes=6))
        assert result.status is Status.FAILS
        assert result.counterexample.diagram == phi0
        expected = (S.inverse() - R) - (R - S)
        assert result.counterexample.residual == basis_vector(phi0, expected)

    def test_small_suite_holds(self):
        cfg = AuditConfig(charges=(0, 3), max_boxes=3)
        report = run_suite(suite_glinf(cfg.index_window), cfg, name="glinf")
        assert report.failures() == []
        assert report.exit_code == 0

    @pytest.mark.slow
    def test_full_suite_holds(self):
        cfg = AuditConfig(charges=(0, 3), max_boxes=6)
        report = run_suite(suite_glinf(cfg.index_window), cfg, name="glinf")
        assert report.counts() == {"holds": len(report.results), "fails": 0, "unrepresentable": 0}

    def test_nilpotency(self):
        cfg = AuditConfig(charges=(0,), max_boxes=4)
        suite = [rel for rel in suite_glinf(cfg.index_window) if rel.name.startswith("nil_")]
        assert suite
        assert run_suite(suite, cfg).failures() == []


class TestBrackets:
    CFG = AuditConfig(charges=(0,), max_boxes=4)

    @pytest.fixture(scope="class")
    def report(self):
        return run_suite(suite_brackets(self.CFG.index_window), self.CFG, name="brackets")

    def test_proof_steps_hold_for_root_reading(self, report):
        steps = [r for r in report.results if r.relation.startswith("step_") and r.relation.endswith("[root]")]
        assert steps
        assert all(r.status is Status.HOLDS for r in steps)

    def test_e_brackets_hold_for_root_reading(self, report):
        found = [r for r in report.results if r.relation == "bracket_e_w[root]"]
        assert found
        assert all(r.status is Status.HOLDS for r in found)

    def test_every_member_is_classified(self, report):
        assert {r.status for r in report.results} <= {Status.HOLDS, Status.FAILS}
        assert len(report.results) == len(suite_brackets(self.CFG.index_window))
        assert report.config["window"] == list(self.CFG.index_window)
