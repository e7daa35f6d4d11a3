import random
from fractions import Fraction as F

import pytest

from divstab.projgeo import (PROJ_VARS, DegenerateLineError, GaussianRational, I,
                             IrrationalEigenvalueError, LinearAction, MPoly,
                             ParamCurve, ParamLine, common_fixed_points,
                             contains_param_curve, cubic_quadric_points,
                             equation_character, format_mpoly, identity_action,
                             invariant_line, invariant_quadrics,
                             line_containment_conditions, parse_mpoly,
                             pullback_under_quadric_map, secant_condition_displays,
                             secant_quartic, solve_conic_through_line,
                             standard_involutions, symbolic_conic_pullback,
                             transform_poly, twisted_cubic, verify_secant_lemma)

SWAP, SIGNS = standard_involutions()
QUADRICS = invariant_quadrics()

SYMBOLIC_PULLBACK_DISPLAY = (
    "a1*x3^2*x0^2 - a2*x2*x3*x0^2 + a4*x2^2*x0^2 + a2*x3*x0*x1^2 - 2*a4*x2*x0*x1^2"
    " + a2*x2^2*x0*x1 + (-2*a1 + a5)*x2*x3*x0*x1 - a3*x3^2*x0*x1 + a3*x3*x2^2*x0"
    " - a5*x2^3*x0 + a4*x1^4 - a2*x1^3*x2 - a5*x3*x1^3 + (a1 + a5)*x2^2*x1^2"
    " + a3*x2*x3*x1^2 + a6*x3^2*x1^2 - a3*x2^3*x1 - 2*a6*x2^2*x3*x1 + a6*x2^4")

CLEARED_QUARTIC_DISPLAY = (
    "x2^2*x0^2*s - x3^2*x0^2 - 2*x2*x0*x1^2*s + (s^2 + 3)*x2*x3*x0*x1"
    " + (-s^2 - 1)*x2^3*x0 + s*x1^4 + (-s^2 - 1)*x3*x1^3 + s^2*x1^2*x2^2"
    " + x3^2*x1^2*s - 2*x2^2*x3*x1*s + s*x2^4")


def test_quadrics_contain_the_twisted_cubic():
    cubic = twisted_cubic()
    for name in ("Q1", "Q2", "Q3"):
        assert contains_param_curve(QUADRICS[name], cubic)
    assert not contains_param_curve(parse_mpoly("x0"), cubic)


def test_line_family_on_the_swept_quadric():
    a, b, t = (MPoly.variable(n) for n in ("a", "b", "t"))
    family = dict(zip(PROJ_VARS, (-t * a, b, a, -t * b)))
    assert QUADRICS["Q4"].subs(family).is_zero()


def test_character_table():
    expected = {"Q1": (1, -1), "Q2": (1, 1), "Q3": (-1, 1)}
    seen = {}
    for name, want in expected.items():
        chars = (equation_character(SWAP, QUADRICS[name]),
                 equation_character(SIGNS, QUADRICS[name]))
        assert chars == want
        seen[name] = chars
    assert len(set(seen.values())) == 3


def test_identity_transform_fixes_everything():
    f = parse_mpoly("x0^2*x3 - 2*x1*x2*x3 + x2^3")
    assert transform_poly(identity_action(), f) == f
    assert equation_character(identity_action(), f) == 1


def test_transform_is_ring_homomorphism():
    rng = random.Random(53)
    variables = [MPoly.variable(v) for v in PROJ_VARS]

    def random_poly():
        out = MPoly.constant(0)
        for _ in range(rng.randint(1, 4)):
            term = MPoly.constant(F(rng.randint(-4, 4)))
            for v in variables:
                term = term * v ** rng.randint(0, 2)
            out = out + term
        return out

    for _ in range(20):
        f, h = random_poly(), random_poly()
        for action in (SWAP, SIGNS):
            assert (transform_poly(action, f * h)
                    == transform_poly(action, f) * transform_poly(action, h))
            assert (transform_poly(action, f + h)
                    == transform_poly(action, f) + transform_poly(action, h))


def test_common_fixed_points_of_the_involution_pair():
    report = common_fixed_points(SWAP, SIGNS)
    assert report.is_empty()


def test_fixed_locus_of_one_involution():
    report = common_fixed_points(SIGNS, identity_action())
    assert not report.points
    assert len(report.loci) == 2
    assert all(locus.dimension == 1 for locus in report.loci)
    spans = {frozenset(tuple(v) for v in locus.basis) for locus in report.loci}
    e = [tuple(F(1 if i == j else 0) for i in range(4)) for j in range(4)]
    assert frozenset((e[0], e[2])) in spans
    assert frozenset((e[1], e[3])) in spans


def test_fixed_locus_of_identity_pair():
    report = common_fixed_points(identity_action(), identity_action())
    assert len(report.loci) == 1
    assert report.loci[0].dimension == 3
    assert "all of projective space" in report.loci[0].describe()


def test_non_commuting_actions_rejected():
    shear = LinearAction([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(ValueError, match="commute"):
        common_fixed_points(shear, SIGNS)


def test_irrational_eigenvalues_rejected():
    rotation = LinearAction([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(IrrationalEigenvalueError):
        common_fixed_points(rotation, identity_action())


def test_six_intersection_points():
    q4 = QUADRICS["Q4"]
    points = cubic_quadric_points()
    assert len(points) == 6
    for point in points:
        value = q4.evaluate(dict(zip(PROJ_VARS, point)))
        assert GaussianRational(F(0)) == value or value == 0
    # the restriction of the quadric to the cubic is exactly x*y*(x^4 - y^4)
    x, y = MPoly.variable("x"), MPoly.variable("y")
    cubic = twisted_cubic()
    restricted = q4.subs(dict(zip(PROJ_VARS, cubic.components)))
    assert restricted == x ** 5 * y - x * y ** 5


def test_swap_exchanges_the_first_two_points():
    points = cubic_quadric_points()
    p1, p2 = points[0], points[1]
    image = SWAP.apply(list(p1))
    lead = next(c for c in image if not c.is_zero())
    conj = [(GaussianRational(c.re, c.im) if isinstance(c, GaussianRational)
             else GaussianRational(F(c))) for c in image]
    assert all((a - b).is_zero() for a, b in zip(conj, p2))


def test_gaussian_rational_arithmetic():
    z = GaussianRational(F(1), F(2))
    assert z * z == GaussianRational(F(-3), F(4))
    assert I * I == GaussianRational(F(-1))
    assert (z - z).is_zero()
    assert F(2) * z == GaussianRational(F(2), F(4))


def test_pullback_symbolic_display():
    assert symbolic_conic_pullback() == parse_mpoly(SYMBOLIC_PULLBACK_DISPLAY)


def test_pullback_single_coefficient():
    assert (pullback_under_quadric_map([0, 0, 0, 0, 0, 1])
            == parse_mpoly("(x2^2 - x1*x3)^2"))


def test_solved_conic_coefficients():
    solved = solve_conic_through_line("s")
    s = MPoly.variable("s")
    one = MPoly.constant(1)
    expected = {
        "a1": (MPoly.constant(-1), s),
        "a2": (MPoly.constant(0), one),
        "a3": (MPoly.constant(0), one),
        "a4": (one, one),
        "a5": (s * s + 1, s),
        "a6": (one, one),
    }
    for name, (num, den) in expected.items():
        got_num, got_den = solved[name]
        assert got_num * den == num * got_den, name


def test_cleared_quartic_matches_display():
    assert secant_quartic("s") == parse_mpoly(CLEARED_QUARTIC_DISPLAY)


def test_two_display_forms_are_equivalent():
    """Substituting the solved conic into the symbolic pullback and clearing
    the parameter reproduces the cleared quartic."""
    solved = solve_conic_through_line("s")
    s = MPoly.variable("s")
    # multiply each a-coefficient by s/denominator and substitute back
    cleared = []
    for k in range(1, 7):
        num, den = solved[f"a{k}"]
        factor = s if den == MPoly.constant(1) else MPoly.constant(1)
        cleared.append(num * factor)
    assert pullback_under_quadric_map(cleared) == parse_mpoly(CLEARED_QUARTIC_DISPLAY)


def test_line_containment_conditions_for_the_second_parameter():
    conditions = line_containment_conditions(secant_quartic("s"), invariant_line("t"))
    first, second = secant_condition_displays()
    assert len(conditions) == 2
    for target in (first.primitive(), second.primitive()):
        assert any(c == target or c == -target for c in conditions)


def test_trivial_containment():
    line = ParamLine((parse_mpoly("x2"), parse_mpoly("x3")), "t")
    assert line_containment_conditions(parse_mpoly("x3"), line) == []


def test_degenerate_line_rejected():
    line = ParamLine((parse_mpoly("x0"), parse_mpoly("2*x0")), "t")
    with pytest.raises(DegenerateLineError):
        line.parametrization()


def test_secant_lemma_certificates():
    report = verify_secant_lemma()
    assert report.closure
    assert report.conditions_match
    assert report.factor_identity
    assert report.reciprocal_eliminated
    assert report.diagonal_checked
    assert report.all_verified()
    s = MPoly.variable("s")
    assert report.reciprocal_branch == (s * s - 1) ** 3


def test_factor_identity_display():
    s, t = MPoly.variable("s"), MPoly.variable("t")
    _, second = secant_condition_displays()
    assert second == (s - t) * (1 - s * t)


def test_diagonal_point_values():
    first, second = secant_condition_displays()
    assert first.evaluate({"s": F(2), "t": F(2)}) == 0
    assert second.evaluate({"s": F(2), "t": F(2)}) == 0
    assert first.evaluate({"s": F(2), "t": F(3)}) != 0


def test_param_curve_rejects_common_factors():
    x, y = MPoly.variable("x"), MPoly.variable("y")
    with pytest.raises(ValueError, match="common factor"):
        ParamCurve((x * x, x * y, x * y, x * x))
    with pytest.raises(ValueError, match="degree"):
        ParamCurve((x, x * y, y, x))


def test_mpoly_parse_format_round_trip():
    rng = random.Random(8)
    for _ in range(40):
        poly = MPoly.constant(0)
        for _ in range(rng.randint(1, 5)):
            term = MPoly.constant(F(rng.randint(-5, 5), rng.randint(1, 3)))
            for v in ("x0", "x1", "s"):
                term = term * MPoly.variable(v) ** rng.randint(0, 2)
            poly = poly + term
        assert parse_mpoly(format_mpoly(poly)) == poly


def test_mpoly_evaluate_requires_all_variables():
    f = parse_mpoly("x0*x1")
    with pytest.raises(KeyError):
        f.evaluate({"x0": F(1)})
