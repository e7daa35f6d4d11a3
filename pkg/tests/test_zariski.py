import random
from fractions import Fraction as F

import pytest

from divstab.lattice import DivisorClass, LatticeBasis, SurfaceForm, restrict, surface_pair
from divstab.ratmath import (IrrationalBreakpointError, Poly1, to_poly2)
from divstab.zariski import (FitMismatchError, IndefiniteSupportError,
                             NotPseudoEffectiveError, build_chart, v_sweep,
                             zariski_decompose)
from conftest import curve_input

U = Poly1.variable("u")


def dp5_ray(dp5, u, v):
    """The restricted second-chamber class of the plane scenario at (u, v)."""
    return DivisorClass(dp5.basis,
                        [8 - 5 * u - v, u - 2, 2 * u - 3, 2 * u - 3, 2 * u - 3])


def test_decompose_in_the_line_support_chamber(dp5):
    u, v = F(5, 4), F(9, 16)
    result = zariski_decompose(dp5_ray(dp5, u, v), dp5.extremal_curves, dp5.form)
    assert set(result.support) == {"L12", "L13", "L14"}
    expected = 2 * u + v - 3
    assert all(coeff == expected for _, coeff in result.negative)
    curves = dict(dp5.extremal_curves)
    for name in result.support:
        assert surface_pair(result.positive, curves[name], dp5.form) == 0
    rebuilt = result.positive + result.negative_class(curves)
    assert rebuilt == dp5_ray(dp5, u, v)


def test_decompose_rejects_point_outside_the_effective_cone(dp5):
    # at (1, 3/2) the ray has already left the pseudo-effective cone
    bad = dp5_ray(dp5, F(1), F(3, 2))
    with pytest.raises((NotPseudoEffectiveError, IndefiniteSupportError)):
        zariski_decompose(bad, dp5.extremal_curves, dp5.form)


def test_decompose_of_nef_class_is_trivial(dp5):
    cls = dp5_ray(dp5, F(9, 8), F(1, 4))  # inside the nef chamber
    result = zariski_decompose(cls, dp5.extremal_curves, dp5.form)
    assert result.support == ()
    assert result.negative == ()
    assert result.positive == cls


def test_decompose_not_pseudoeffective_on_ruled_surface(ruled):
    cls = DivisorClass(ruled.basis, [2, -1])
    with pytest.raises(NotPseudoEffectiveError, match="nef curve"):
        zariski_decompose(cls, ruled.extremal_curves, ruled.form)


def test_v_sweep_breakpoints_on_dp5(dp5, model):
    d0 = DivisorClass(dp5.basis, [8 - 5 * U, U - 2, 2 * U - 3, 2 * U - 3, 2 * U - 3])
    z = dp5.basis.unit("l")
    chambers = v_sweep(d0, z, F(5, 4), dp5.extremal_curves, dp5.form)
    assert [(c.v_lo, c.v_hi) for c in chambers] == [(0, F(1, 2)), (F(1, 2), F(5, 8))]
    assert chambers[0].support == ()
    assert set(chambers[1].support) == {"L12", "L13", "L14"}


def test_v_sweep_single_chamber_low_u(dp5):
    d0 = DivisorClass(dp5.basis, [4 - U, -1, -1, -1, -1])
    z = dp5.basis.unit("l")
    chambers = v_sweep(d0, z, F(1, 2), dp5.extremal_curves, dp5.form)
    assert len(chambers) == 1
    assert chambers[0].v_hi == F(3, 2)


def test_v_sweep_terminal_wall_on_quadric(dp6, model):
    p1 = DivisorClass(model.basis, [4 - 2 * U, 0, -1])
    d0 = restrict(p1, dp6.restriction)
    chambers = v_sweep(d0, dp6.basis.unit("l1"), F(29, 20),
                       dp6.extremal_curves, dp6.form)
    assert chambers[-1].v_hi == F(1, 5) == 6 - 4 * F(29, 20)


def test_v_sweep_errors_on_irrational_terminal():
    # contrived pairing data whose volume quadratic has irrational roots and
    # no wall intercedes: the sweep must fail loudly, never approximate
    basis = LatticeBasis(["A", "B"])
    form = SurfaceForm(basis, {("A", "A"): F(2), ("B", "B"): F(-1)})
    d0 = DivisorClass(basis, [3 + 0 * U, 0 * U])
    z = DivisorClass(basis, [1, 1])
    with pytest.raises(IrrationalBreakpointError):
        v_sweep(d0, z, F(1, 2), [("B", basis.unit("B"))], form)


def test_chart_reproduces_displayed_walls(dp5):
    d0a = DivisorClass(dp5.basis, [4 - U, -1, -1, -1, -1])
    d0b = DivisorClass(dp5.basis, [8 - 5 * U, U - 2, 2 * U - 3, 2 * U - 3, 2 * U - 3])
    z = dp5.basis.unit("l")
    chart_a = build_chart(d0a, z, [0, 1], dp5.extremal_curves, dp5.form)
    assert [ch.v_hi for ch in chart_a.chambers] == [2 - U]
    chart_b = build_chart(d0b, z, [1, F(3, 2)], dp5.extremal_curves, dp5.form)
    cells = chart_b.u_cells()
    assert cells == [(1, F(7, 5)), (F(7, 5), F(3, 2))]
    first = chart_b.stack(*cells[0])
    second = chart_b.stack(*cells[1])
    assert [ch.v_hi for ch in first] == [3 - 2 * U, (5 - 3 * U) * F(1, 2)]
    assert [ch.v_hi for ch in second] == [3 - 2 * U, 6 - 4 * U]
    assert first[1].support == second[1].support == ("L12", "L13", "L14")


def test_chart_on_ruled_surface(ruled):
    d0a = DivisorClass(ruled.basis, [1 + U, 3 - U])
    d0b = DivisorClass(ruled.basis, [2, 6 - 4 * U])
    z = ruled.basis.unit("s")
    chart_a = build_chart(d0a, z, [0, 1], ruled.extremal_curves, ruled.form)
    chart_b = build_chart(d0b, z, [1, F(3, 2)], ruled.extremal_curves, ruled.form)
    assert [ch.v_hi for ch in chart_a.chambers] == [1 + U]
    assert [ch.v_hi for ch in chart_b.chambers] == [Poly1("u", [2])]
    assert all(ch.support == () for ch in chart_a.chambers + chart_b.chambers)


def test_chart_trivial_when_z_has_positive_square(ruled):
    d0 = DivisorClass(ruled.basis, [2 + 0 * U, 3])
    z = DivisorClass(ruled.basis, [1, 1])
    chart = build_chart(d0, z, [0, 1], ruled.extremal_curves, ruled.form)
    assert len(chart.chambers) == 1
    assert chart.chambers[0].support == ()
    assert chart.chambers[0].v_hi == Poly1("u", [2])


def _charts_for(scenario):
    from divstab import sinv
    return sinv.volume_charts(curve_input(scenario))


def test_chart_invariants_at_random_samples(scenarios):
    rng = random.Random(99)
    for name in ("lemma_4_1", "lemma_4_2_s", "lemma_4_2_r",
                 "lemma_4_3_l1", "lemma_4_3_l2", "lemma_4_3_mixed"):
        scenario = scenarios[name]
        surface = scenario.surface
        curves = dict(surface.extremal_curves)
        for chart in _charts_for(scenario):
            for ch in chart.chambers:
                for _ in range(12):
                    u = ch.u_lo + (ch.u_hi - ch.u_lo) * F(rng.randint(1, 63), 64)
                    lo, hi = ch.v_lo(u), ch.v_hi(u)
                    if lo >= hi:
                        continue
                    v = lo + (hi - lo) * F(rng.randint(1, 63), 64)
                    d = _chamber_class(scenario, ch, u, v)
                    result = zariski_decompose(d, surface.extremal_curves, surface.form)
                    assert set(result.support) == set(ch.support)
                    assert result.positive == ch.positive.evaluate(u=u, v=v)
                    assert all(coeff >= 0 for _, coeff in result.negative)
                    assert surface_pair(result.positive, result.positive,
                                        surface.form) == ch.vol(u, v)
                    for cname, ccls in surface.extremal_curves:
                        pairing = surface_pair(result.positive, ccls, surface.form)
                        if cname in result.support:
                            assert pairing == 0
                        else:
                            assert pairing >= 0


def _chamber_class(scenario, chamber, u, v):
    from divstab.lattice import restrict
    sched_chamber = next(c for c in scenario.schedule.chambers
                         if c.u_lo <= u <= c.u_hi)
    p = scenario.schedule.positive_part(scenario.surface.cls,
                                        scenario.model.anticanonical, sched_chamber)
    return (restrict(p, scenario.surface.restriction).evaluate(u=u)
            - scenario.z.scale(v))


def test_volume_continuity_across_chambers(scenarios):
    """Adjacent chambers' volumes agree identically on the shared wall."""
    for name in ("lemma_4_1", "lemma_4_3_l1", "lemma_4_3_l2", "lemma_4_3_mixed"):
        for chart in _charts_for(scenarios[name]):
            for lo, hi in chart.u_cells():
                stack = chart.stack(lo, hi)
                for below, above in zip(stack, stack[1:]):
                    assert below.v_hi == above.v_lo
                    wall = below.v_hi
                    assert below.vol.subs_v(wall) == above.vol.subs_v(wall)
                # outer boundary: volume vanishes identically
                assert stack[-1].vol.subs_v(stack[-1].v_hi).is_zero()


def test_charts_reproduce_displayed_integrands(scenarios):
    """Every chamber volume equals its displayed closed form, exactly."""
    from divstab.ratmath import Poly2
    u, v = to_poly2(U), to_poly2(Poly1.variable("v"))
    displayed = {
        "lemma_4_1": [
            (4 - u - v) ** 2 - 4,
            12 * u * u + 10 * u * v + v * v - 40 * u - 16 * v + 33,
            24 * u * u + 22 * u * v + 4 * v * v - 76 * u - 34 * v + 60,
        ],
        "lemma_4_2_s": [2 * (3 - u) * (1 + u - v), 4 * (v - 2) * (2 * u - 3)],
        "lemma_4_2_r": [2 * (1 + u - v) * (3 - u - 3 * v),
                        2 * (2 - v) * (6 - 4 * u - 3 * v)],
        "lemma_4_3_l1": [10 - 4 * u - 4 * v, 2 * (3 - u - v) ** 2,
                         8 * u * u + 4 * u * v - 32 * u - 8 * v + 30,
                         2 * (4 - 2 * u - v) * (6 - 4 * u - v)],
        "lemma_4_3_l2": [2 * u * v - 4 * u - 6 * v + 10, 2 * (v - 2) * (v - 3 + u),
                         8 * u * u + 4 * u * v - 32 * u - 8 * v + 30,
                         2 * (4 - 2 * u - v) * (6 - 4 * u - v)],
        "lemma_4_3_mixed": [2 * u * v - 4 * u - 6 * v + 10,
                            2 * (v - 2) * (-3 + u + v),
                            2 * (2 * u - 3) * (2 * u + 2 * v - 5),
                            2 * (-4 + 2 * u + v) ** 2],
    }
    for name, expected in displayed.items():
        vols = []
        for chart in _charts_for(scenarios[name]):
            for ch in chart.chambers:
                if ch.vol not in vols:
                    vols.append(ch.vol)
        assert vols == expected, name


def test_volume_monotone_in_v(scenarios):
    rng = random.Random(3)
    for name in ("lemma_4_1", "lemma_4_3_l1"):
        for chart in _charts_for(scenarios[name]):
            for ch in chart.chambers:
                for _ in range(8):
                    u = ch.u_lo + (ch.u_hi - ch.u_lo) * F(rng.randint(1, 15), 16)
                    lo, hi = ch.v_lo(u), ch.v_hi(u)
                    if lo >= hi:
                        continue
                    v1 = lo + (hi - lo) * F(1, 3)
                    v2 = lo + (hi - lo) * F(2, 3)
                    assert ch.vol(u, v1) >= ch.vol(u, v2)


def test_chart_requires_two_breakpoints(dp5):
    d0 = DivisorClass(dp5.basis, [4 - U, -1, -1, -1, -1])
    with pytest.raises(ValueError, match="two"):
        build_chart(d0, dp5.basis.unit("l"), [0], dp5.extremal_curves, dp5.form)


def test_fit_mismatch_reported_beyond_depth(ruled):
    """A quadratic wall cannot be fit affinely and must fail loudly."""
    d0 = DivisorClass(ruled.basis, [to_poly2(2 - U * U), to_poly2(3 + 0 * U)])
    z = ruled.basis.unit("s")
    with pytest.raises(FitMismatchError):
        build_chart(d0, z, [0, 1], ruled.extremal_curves, ruled.form, max_depth=3)
