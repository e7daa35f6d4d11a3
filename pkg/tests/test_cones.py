import random
from fractions import Fraction as F

import pytest

from divstab.cones import (Decomposition, Infeasible,
                           UnboundedThresholdError, effective_decompose, is_nef,
                           pseudoeffective_threshold)
from divstab.lattice import DivisorClass
from divstab.ratmath import Poly1
from oracles import grid_decompose

U = Poly1.variable("u")


def test_is_nef_on_dp5(dp5):
    curves = dp5.extremal_curves
    cls = DivisorClass(dp5.basis, [4 - F(1, 2) - 1, -1, -1, -1, -1])
    cert = is_nef(cls, curves, dp5.form)
    assert cert.nef and cert.violating_curve is None
    e1 = dp5.basis.unit("E1")
    cert = is_nef(e1, [("E1", e1)], dp5.form)
    assert not cert.nef and cert.violating_curve == "E1" and cert.pairing == -1


def test_is_nef_names_the_violating_line(dp5):
    u, v = F(5, 4), F(1)
    cls = DivisorClass(dp5.basis, [8 - 5 * u - v, u - 2, 2 * u - 3, 2 * u - 3, 2 * u - 3])
    cert = is_nef(cls, dp5.extremal_curves, dp5.form)
    assert not cert.nef
    assert cert.violating_curve in ("L12", "L13", "L14")
    assert cert.pairing == 3 - 2 * u - v == F(-1, 2)


def test_is_nef_against_curve_tables(model):
    cert = is_nef(model.anticanonical, model.mori_curves)
    assert cert.nef
    with pytest.raises(ValueError, match="empty"):
        is_nef(model.anticanonical, [])


def test_effective_decompose_integral_cone(zcone_model):
    cone = zcone_model.effective_cone
    assert cone.names == ("H-EL", "2H-EC", "R", "EL", "EC")
    outcome = effective_decompose(zcone_model.anticanonical, cone)
    assert isinstance(outcome, Decomposition)
    assert outcome.coefficients == (2, 1, 0, 1, 0)
    assert outcome.recombine() == zcone_model.anticanonical


def test_effective_decompose_infeasible_with_witness(model):
    a = F(3, 2)
    cls = DivisorClass(model.basis, [4 - 2 * a, -1, -(1 - 2 * a)])
    outcome = effective_decompose(cls, model.effective_cone)
    assert isinstance(outcome, Infeasible)
    assert not outcome
    witness = outcome.witness
    assert witness is not None
    for g in model.effective_cone.generators:
        assert sum(w * c for w, c in zip(witness, g.coeffs)) >= 0
    assert sum(w * c for w, c in zip(witness, cls.coeffs)) < 0


def test_effective_decompose_zero_class(model):
    outcome = effective_decompose(model.basis.zero(), model.effective_cone)
    assert isinstance(outcome, Decomposition)
    assert all(c == 0 for c in outcome.coefficients)


def test_thresholds(model):
    mk = model.anticanonical
    cone = model.effective_cone
    h = model.basis.unit("H")
    el = model.basis.unit("EL")
    quadric = DivisorClass(model.basis, [2, -1, 0])
    assert pseudoeffective_threshold(mk, h, cone) == F(3, 2)
    assert pseudoeffective_threshold(mk, el, cone) == F(3, 2)
    assert pseudoeffective_threshold(mk, quadric, cone) == F(3, 2)
    assert pseudoeffective_threshold(mk, mk, cone) == 1


def test_threshold_unbounded(model):
    mk = model.anticanonical
    el = model.basis.unit("EL")
    with pytest.raises(UnboundedThresholdError):
        pseudoeffective_threshold(mk, el.scale(-1), model.effective_cone)


def test_threshold_requires_feasible_start(model):
    h = model.basis.unit("H")
    outside = DivisorClass(model.basis, [-1, 0, 0])
    with pytest.raises(ValueError, match="u = 0"):
        pseudoeffective_threshold(outside, h, model.effective_cone)


def test_feasibility_is_an_interval(model):
    """Feasibility of -K - u H in u is an interval containing 0."""
    mk, cone = model.anticanonical, model.effective_cone
    h = model.basis.unit("H")
    tau = F(3, 2)
    for k in range(50):
        u = F(k, 49) * 2  # sweep [0, 2]
        feasible = isinstance(effective_decompose(mk - h.scale(u), cone), Decomposition)
        assert feasible == (u <= tau)


def test_threshold_tightness(model):
    mk, cone = model.anticanonical, model.effective_cone
    for b in (model.basis.unit("H"), model.basis.unit("EL"),
              DivisorClass(model.basis, [2, -1, 0])):
        tau = pseudoeffective_threshold(mk, b, cone)
        assert isinstance(effective_decompose(mk - b.scale(tau), cone), Decomposition)
        bumped = mk - b.scale(tau + F(1, 1000))
        assert isinstance(effective_decompose(bumped, cone), Infeasible)


def test_round_trip_on_random_feasible_classes(zcone_model):
    rng = random.Random(31)
    cone = zcone_model.effective_cone
    for _ in range(50):
        coeffs = [F(rng.randint(0, 3), rng.choice((1, 2))) for _ in cone.generators]
        target = cone.basis.zero()
        for c, g in zip(coeffs, cone.generators):
            target = target + g.scale(c)
        outcome = effective_decompose(target, cone)
        assert isinstance(outcome, Decomposition)
        assert outcome.recombine() == target


def test_brute_force_oracle_agreement(zcone_model):
    """Exhaustive grid search agrees with the subset-enumeration solver."""
    rng = random.Random(1234)
    cone = zcone_model.effective_cone
    generators = [list(g.coeffs) for g in cone.generators]
    values = [F(k) for k in range(7)]
    half_values = [F(k, 2) for k in range(13)]
    for trial in range(100):
        if trial % 2 == 0:
            # feasible by construction, with integer coefficients
            coeffs = [F(rng.randint(0, 2)) for _ in generators]
            target = [sum(c * g[i] for c, g in zip(coeffs, generators))
                      for i in range(3)]
        else:
            target = [F(rng.randint(-2, 4)), F(rng.randint(-3, 1)), F(rng.randint(-3, 1))]
        cls = DivisorClass(cone.basis, target)
        outcome = effective_decompose(cls, cone)
        grid = values if trial % 4 else half_values
        brute = grid_decompose(target, generators, grid)
        if isinstance(outcome, Infeasible):
            assert brute is None
        elif brute is not None:
            recombined = [sum(c * g[i] for c, g in zip(brute, generators))
                          for i in range(3)]
            assert recombined == target


def test_parametric_class_scan_matches_closed_form(model):
    """The residual families leave the cone exactly past the stated multiple."""
    cone = model.effective_cone
    family = DivisorClass(model.basis, [4 - 2 * U, -1, -(1 - 2 * U)])
    for numerator in range(2, 30):
        a = F(numerator, 10)
        cls = family.evaluate(u=a)
        feasible = isinstance(effective_decompose(cls, cone), Decomposition)
        assert feasible == (a <= 1)


def test_decomposition_report_format(zcone_model):
    outcome = effective_decompose(zcone_model.anticanonical,
                                  zcone_model.effective_cone)
    text = str(outcome)
    assert "H-EL: 2" in text and "EC: 0" in text
