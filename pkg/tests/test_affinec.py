from fractions import Fraction

import pytest

from fockspace.affinec import (
    FoldedAlgebra,
    GenKind,
    KmmTables,
    RiMode,
    cartan_bracket,
    central_report,
    color_zero_count,
    d_ops,
    folded_cartan,
    folded_gen,
    gamma_ops,
    kmm_compare,
    suite_affine,
    vacuum_report,
)
from fockspace.audit import Status, check_relation, run_suite
from fockspace.coeffring import ONE, R, RS, S, RingElem
from fockspace.config import AuditConfig
from fockspace.diagram import Diagram, color_counts, enumerate_diagrams
from fockspace.errors import CoefficientError, ConfigurationError
from fockspace.fock import FockVector, op_apply, op_power


def _basis(max_boxes, charges=(0, 3)):
    out = []
    for charge in charges:
        out.extend(enumerate_diagrams(charge, max_boxes))
    return out


def _by_name(suite, name, indices=None):
    return [rel for rel in suite if rel.name == name and (indices is None or rel.indices == indices)]


class TestAlgebra:
    def test_normalization(self):
        alg = FoldedAlgebra(3)
        assert [alg.nu(i) for i in alg.nodes] == [1, Fraction(1, 2), Fraction(1, 2), 1]
        assert alg.marks() == (1, 2, 2, 1)

    def test_full_mode_scalars(self, paper_l2):
        assert paper_l2.r_i(0) == R
        assert paper_l2.s_i(2) == S
        assert paper_l2.r_i(1) == RingElem.monomial("1/2", 0)

    def test_half_mode_needs_quarter_powers(self):
        alg = FoldedAlgebra.from_preset(2, "paper", "half")
        assert alg.r_i(0) == RingElem.monomial("1/2", 0)
        with pytest.raises(CoefficientError):
            alg.r_i(1)

    def test_rejects_bad_input(self):
        with pytest.raises(ConfigurationError):
            FoldedAlgebra(1)
        with pytest.raises(ConfigurationError):
            FoldedAlgebra.from_preset(2, "nope")
        with pytest.raises(ConfigurationError):
            FoldedAlgebra(2).check_node(3)


class TestFoldedOperators:
    def test_creation_on_vacuum(self, paper_l2, phi0, y1):
        assert folded_gen(GenKind.F, 0, paper_l2).on(phi0) == FockVector.basis(y1)

    def test_annihilation(self, paper_l2, phi0, y1, y11):
        assert folded_gen(GenKind.E, 1, paper_l2).on(y11) == FockVector.basis(y1)
        assert folded_gen(GenKind.E, 0, paper_l2).on(phi0).is_zero()

    def test_cartan(self, paper_l2, phi0, y1):
        assert folded_cartan(0, False, paper_l2).on(phi0) == FockVector.basis(phi0, S.inverse())
        assert folded_cartan(1, True, paper_l2).on(y1) == FockVector.basis(y1, R)
        assert folded_cartan(2, False, paper_l2).on(phi0) == FockVector.basis(phi0)

    def test_d_operator(self, paper_l2, phi0, y1, y11):
        d = d_ops(paper_l2, primed=False)
        assert d.on(phi0) == FockVector.basis(phi0)
        assert d.on(y1) == FockVector.basis(y1, R)
        assert d.on(y11) == FockVector.basis(y11, R)
        assert d_ops(paper_l2, primed=True).on(y1) == FockVector.basis(y1, S)

    @pytest.mark.parametrize("l", [2, 3])
    def test_d_counts_color_zero_boxes(self, l):
        for diagram in _basis(8):
            assert color_zero_count(diagram, l) == color_counts(diagram, l)[0], diagram

    @pytest.mark.parametrize("charge", [-3, 0, 5])
    def test_d_fixes_every_vacuum(self, paper_l2, charge):
        vacuum = Diagram.vacuum(charge)
        assert d_ops(paper_l2, primed=False).on(vacuum) == FockVector.basis(vacuum)

    @pytest.mark.parametrize("l", [2, 3])
    def test_weight_additivity(self, l):
        alg = FoldedAlgebra(l)
        for diagram in _basis(5):
            base = color_counts(diagram, l)
            for i in alg.nodes:
                for image in folded_gen(GenKind.F, i, alg).on(diagram).terms:
                    expected = list(base)
                    expected[i] += 1
                    assert color_counts(image, l) == tuple(expected)
                    assert image.charge == diagram.charge

    @pytest.mark.parametrize("l", [2, 3])
    def test_finiteness(self, l):
        alg = FoldedAlgebra(l)
        for diagram in _basis(8, charges=(0,)):
            for kind in GenKind:
                for i in alg.nodes:
                    assert len(folded_gen(kind, i, alg).on(diagram)) <= diagram.box_count + 1

    @pytest.mark.parametrize("l", [2, 3])
    def test_raising_is_locally_nilpotent(self, l):
        alg = FoldedAlgebra(l)
        for diagram in _basis(5):
            for i in alg.nodes:
                power = op_power(folded_gen(GenKind.E, i, alg), diagram.box_count + 1)
                assert op_apply(power, FockVector.basis(diagram)).is_zero()


class TestCartanMatrix:
    @pytest.mark.parametrize(
        "i, j, l, expected",
        [
            (0, 0, 2, R * S.inverse()),
            (1, 1, 2, RingElem.monomial("1/2", "-1/2")),
            (0, 2, 2, RS),
            (2, 0, 2, RS.inverse()),
            (0, 1, 2, R.inverse()),
            (1, 0, 2, S),
            (2, 1, 2, S),
            (1, 2, 3, RingElem.monomial("-1/2", 0)),
            (2, 1, 3, RingElem.monomial(0, "1/2")),
            (0, 2, 3, ONE),
        ],
    )
    def test_entries(self, i, j, l, expected):
        assert cartan_bracket(i, j, l) == expected

    def test_out_of_range(self):
        with pytest.raises(ConfigurationError):
            cartan_bracket(0, 3, 2)


class TestCentralAndVacuum:
    def test_vacuum_report(self, paper_l2):
        assert vacuum_report(paper_l2, 0) == {
            "diagram": "0;",
            "Om": ["1*s^(-1)", "1", "1"],
            "Omp": ["1*r^(1)", "1", "1"],
            "weight": [0, 0, 0],
        }

    def test_gamma_on_vacuum(self, paper_l2, phi0):
        gamma, gamma_p = gamma_ops(paper_l2)
        assert gamma.eigenvalue(phi0) == S.inverse()
        assert gamma_p.eigenvalue(phi0) == R

    def test_single_diagram_is_always_constant(self, paper_l2, phi0):
        report = central_report(paper_l2, [phi0])
        assert report["gamma"] == {"constant": True, "scalar": "1*s^(-1)"}
        assert report["gamma_gammap"]["constant"] is True
        assert report["gamma_gammap"]["rs_exponent"] is None


class TestSuite:
    def test_serre_sign_variants_are_both_present(self, paper_l2):
        suite = suite_affine(paper_l2)
        assert _by_name(suite, "C6a") and _by_name(suite, "C6a_plus")
        assert _by_name(suite, "C7a") and _by_name(suite, "C7a_plus")

    def test_serre_sign_variants_cannot_both_hold(self):
        # keep charge 3: at charge 0 with <= 5 boxes both signs hold
        suite = suite_affine(FoldedAlgebra.from_preset(2, "paper"))
        serre = _by_name(suite, "C6a") + _by_name(suite, "C6a_plus")
        at_zero = AuditConfig(charges=(0,), max_boxes=5, l=2, preset="paper")
        assert run_suite(serre, at_zero).failures() == []

        # E_0 E_1 E_0 is nonzero on the charge-3 hook covering diagonals 0..4
        cfg = AuditConfig(charges=(3,), max_boxes=5, l=2, preset="paper")
        report = run_suite(serre, cfg)
        assert Status.FAILS in {result.status for result in report.results}

    def test_half_mode_marks_quarter_power_relations(self):
        alg = FoldedAlgebra.from_preset(2, "paper", RiMode.HALF)
        (c4,) = _by_name(suite_affine(alg), "C4", (1, 1))
        assert not c4.representable
        assert "1/4" in c4.reason

        cfg = AuditConfig(charges=(0,), max_boxes=2, l=2, preset="paper", ri_mode="half")
        result = check_relation(c4, cfg)
        assert result.status is Status.UNREPRESENTABLE
        assert result.to_dict()["reason"] == c4.reason

    def test_d_conjugation_scalar_is_inverted(self, phi0, y1):
        # D counts color-0 boxes and E_0 removes one, so D E_0 = r^-1 E_0 D
        cfg = AuditConfig(charges=(0,), max_boxes=3, l=2, preset="paper")
        (rel,) = _by_name(suite_affine(cfg.algebra()), "C2_D_E", (0,))
        result = check_relation(rel, cfg)
        assert result.status is Status.FAILS
        assert result.counterexample.diagram == y1
        assert result.counterexample.residual == FockVector.basis(phi0, ONE - R ** 2)

    def test_diagonal_block_holds(self):
        cfg = AuditConfig(charges=(0, 3), max_boxes=3, l=3, preset="std")
        suite = [
            rel
            for rel in suite_affine(cfg.algebra())
            if rel.name.startswith("C1inv_") or rel.name in ("C1_Om_Om", "C1_Om_Omp", "C1_D_Dp")
        ]
        assert run_suite(suite, cfg).failures() == []

    def test_fiber_tail_identity_holds_for_the_e_table(self):
        cfg = AuditConfig(charges=(0,), max_boxes=5, l=2, preset="paper")
        suite = _by_name(suite_affine(cfg.algebra(), cfg.index_window), "tail_00")
        assert any(rel.indices == (4, 0) for rel in suite)
        report = run_suite(suite, cfg)
        assert report.counts()["holds"] == len(suite)

    @pytest.mark.slow
    @pytest.mark.parametrize("ri_mode", ["full", "half"])
    @pytest.mark.parametrize("preset", ["paper", "dual", "std"])
    def test_preset_and_ri_mode_matrix(self, preset, ri_mode):
        cfg = AuditConfig(charges=(0,), max_boxes=5, l=2, preset=preset, ri_mode=ri_mode)
        suite = suite_affine(cfg.algebra(), cfg.index_window)
        report = run_suite(suite, cfg, name="affine")

        assert len(report.results) == len(suite)
        assert sum(report.counts().values()) == len(suite)

        tails = [result for result in report.results if result.relation == "tail_00"]
        assert tails
        assert all(result.status is Status.HOLDS for result in tails)

        unrepresentable = [
            (result.relation, result.indices)
            for result in report.results
            if result.status is Status.UNREPRESENTABLE
        ]
        assert unrepresentable == ([("C4", (1, 1))] if ri_mode == "half" else [])

        again = run_suite(suite, cfg, name="affine")
        assert again.to_json(include_meta=False) == report.to_json(include_meta=False)

    def test_tail_block_needs_a_window(self, paper_l2):
        assert not [rel for rel in suite_affine(paper_l2) if rel.name.startswith("tail_")]


class TestOneParameterOracle:
    @pytest.mark.parametrize("l", [2, 3])
    def test_std_preset_agrees(self, l):
        report = kmm_compare(FoldedAlgebra.from_preset(l, "std"), enumerate_diagrams(0, 5))
        assert report.equal, report.mismatch
        assert report.checked == len(enumerate_diagrams(0, 5)) * 2 * (l + 1)

    def test_paper_preset_agrees(self, paper_l2):
        assert kmm_compare(paper_l2, enumerate_diagrams(0, 5)).equal

    def test_corrupted_table_is_flagged(self):
        alg = FoldedAlgebra.from_preset(2, "std")
        report = kmm_compare(alg, enumerate_diagrams(0, 5), KmmTables(4, -2, 4, 2))
        assert not report.equal
        assert set(report.to_dict()["mismatch"]) == {"generator", "diagram", "two_parameter", "one_parameter"}
