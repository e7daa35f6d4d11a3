"""Stability functionals: the divisor invariant and the curve invariant.

The divisor invariant of Y is the normalized integral of ``P(u)^3`` along
the ray ``-K - u Y``, where the positive part P(u) is supplied per u-chamber
by a :class:`Schedule` (the threefold-level decompositions are validated
input data, not computed: each negative part is stated explicitly, and
deciding such decompositions in general is out of scope).

The curve invariant of an irreducible curve Z inside a surface Y adds two
contributions: a line integral of ``(P(u)^2 . Y) * ord_Z(N(u)|_Y)`` over the
chambers where Z appears in the restricted negative part, and the double
integral of the chamber-chart volumes of ``P(u)|_Y - v Z``.  The ord
coefficient is scenario data with a consistency check: components of N(u)
whose restriction is an exact rational multiple of Z must reproduce the
declared coefficient (identifying Z inside an arbitrary restricted divisor
needs geometric input the lattice alone does not carry).

All eight golden fractions of the verification suite come out of
:func:`s_curve` / :func:`negative_part_term` / :func:`dominance_bound`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from .cones import (ConeSpec, Decomposition, effective_decompose,
                    pseudoeffective_threshold)
from .lattice import (CurvePairing, DivisorClass, LatticeBasis, RestrictionMap,
                      SurfaceForm, ThreefoldForm, pair_with_curve, restrict,
                      triple_product)
from .ratmath import (Poly1, demote, format_rational, integrate_univariate,
                      to_poly2)
from .zariski import NamedCurve, ZariskiChart, build_chart


class ScheduleError(ValueError):
    """Schedule data violates one of its invariants; names the bad sample."""


class OrdMismatchError(ValueError):
    """Declared ord coefficient disagrees with the restricted negative part."""


class DominanceError(ValueError):
    """The bounding curve class is not componentwise dominated."""


@dataclass(frozen=True)
class ThreefoldModel:
    """The ambient threefold: basis, intersection tensor, cones, curve tables."""

    basis: LatticeBasis
    form: ThreefoldForm
    anticanonical: DivisorClass
    mori_curves: tuple[CurvePairing, ...]
    effective_cone: ConeSpec

    def degree(self) -> Fraction:
        k = self.anticanonical
        return triple_product(k, k, k, self.form)


@dataclass(frozen=True)
class SurfaceData:
    """An embedded surface: its class on X, its own lattice, and restriction."""

    name: str
    cls: DivisorClass
    basis: LatticeBasis
    form: SurfaceForm
    restriction: RestrictionMap
    extremal_curves: tuple[NamedCurve, ...]


@dataclass(frozen=True)
class ScheduleChamber:
    u_lo: Fraction
    u_hi: Fraction
    # negative part on X: (divisor name, class, coefficient polynomial in u)
    negative: tuple[tuple[str, DivisorClass, Poly1], ...] = ()


@dataclass(frozen=True)
class Schedule:
    """u-chambers of the threefold decomposition of ``-K - u Y``."""

    chambers: tuple[ScheduleChamber, ...]

    @property
    def tau(self) -> Fraction:
        return self.chambers[-1].u_hi

    def positive_part(self, y: DivisorClass, anticanonical: DivisorClass,
                      chamber: ScheduleChamber) -> DivisorClass:
        p = anticanonical - y.scale(Poly1.variable("u"))
        for _, cls, coeff in chamber.negative:
            p = p - cls.scale(coeff)
        return p


@dataclass(frozen=True)
class SCurveInput:
    """Everything one curve-invariant evaluation needs."""

    model: ThreefoldModel
    surface: SurfaceData
    z: DivisorClass                       # curve class on the surface lattice
    schedule: Schedule
    ord_coeffs: tuple[Poly1, ...]         # one per schedule chamber
    dominating: DivisorClass | None = None


def _chamber_samples(ch: ScheduleChamber) -> list[Fraction]:
    return [ch.u_lo, (3 * ch.u_lo + ch.u_hi) / 4, (ch.u_lo + ch.u_hi) / 2,
            (ch.u_lo + 3 * ch.u_hi) / 4, ch.u_hi]


def validate_schedule(model: ThreefoldModel, y: DivisorClass,
                      sched: Schedule) -> None:
    """Check every schedule invariant; raise ScheduleError naming the sample."""
    if not sched.chambers:
        raise ScheduleError("schedule has no chambers")
    if sched.chambers[0].u_lo != 0:
        raise ScheduleError("schedule must start at u = 0")
    for a, b in zip(sched.chambers, sched.chambers[1:]):
        if a.u_hi != b.u_lo:
            raise ScheduleError(
                f"chambers are not contiguous at u = {format_rational(a.u_hi)}")
    mk = model.anticanonical
    tau = sched.tau
    recomputed = pseudoeffective_threshold(mk, y, model.effective_cone)
    if recomputed != tau:
        raise ScheduleError(
            f"schedule ends at u = {format_rational(tau)} but the pseudo-effective "
            f"threshold is {format_rational(recomputed)}")
    for ch in sched.chambers:
        if ch.u_lo >= ch.u_hi:
            raise ScheduleError("empty schedule chamber")
        p = sched.positive_part(y, mk, ch)
        # exact identity P + N + uY = -K
        total = p + y.scale(Poly1.variable("u"))
        for _, cls, coeff in ch.negative:
            total = total + cls.scale(coeff)
        if total != mk:
            raise ScheduleError("P(u) + N(u) + u*Y does not reproduce the anticanonical class")
        cube = to_poly2(triple_product(p, p, p, model.form)).subs_v(0)
        for u0 in _chamber_samples(ch):
            for _, _, coeff in ch.negative:
                if coeff(u0) < 0:
                    raise ScheduleError(
                        f"negative-part coefficient below zero at u = {format_rational(u0)}")
            for curve in model.mori_curves:
                value = to_poly2(pair_with_curve(p, curve)).subs_v(0)(u0)
                if value < 0:
                    raise ScheduleError(
                        f"P(u) pairs negatively with {curve.name} at u = {format_rational(u0)}")
            if cube(u0) < 0:
                raise ScheduleError(
                    f"P(u)^3 is negative at u = {format_rational(u0)}")
    final = sched.positive_part(y, mk, sched.chambers[-1])
    cube_tau = to_poly2(triple_product(final, final, final, model.form)).subs_v(0)(tau)
    if cube_tau != 0:
        raise ScheduleError(
            f"P(u)^3 does not vanish at the terminal u = {format_rational(tau)}")


def s_divisor(model: ThreefoldModel, y: DivisorClass, sched: Schedule) -> Fraction:
    """Normalized volume integral of the ray ``-K - u Y``."""
    validate_schedule(model, y, sched)
    total = Fraction(0)
    for ch in sched.chambers:
        p = sched.positive_part(y, model.anticanonical, ch)
        cube = to_poly2(triple_product(p, p, p, model.form)).subs_v(0)
        total += integrate_univariate(cube, ch.u_lo, ch.u_hi)
    return total / model.degree()


def _multiple_of(cls: DivisorClass, z: DivisorClass) -> Fraction | None:
    """m with cls = m * z, if the restricted class is an exact multiple."""
    m = None
    for a, b in zip(cls.coeffs, z.coeffs):
        pa, pb = to_poly2(a), to_poly2(b)
        if pb.is_zero():
            if not pa.is_zero():
                return None
            continue
        if pa.is_zero():
            ratio = Fraction(0)
        else:
            da, db = demote(pa), demote(pb)
            if not isinstance(da, Fraction) or not isinstance(db, Fraction):
                return None
            ratio = da / db
        if m is None:
            m = ratio
        elif m != ratio:
            return None
    return m


def expected_ord_coeffs(inp: SCurveInput) -> tuple[Poly1, ...]:
    """ord coefficient per chamber, from components restricting to multiples of Z."""
    out = []
    for ch in inp.schedule.chambers:
        total = Poly1("u", [])
        for _, cls, coeff in ch.negative:
            m = _multiple_of(restrict(cls, inp.surface.restriction), inp.z)
            if m:
                total = total + coeff * m
        out.append(total)
    return tuple(out)


def check_ord_coeffs(inp: SCurveInput) -> None:
    expected = expected_ord_coeffs(inp)
    if len(inp.ord_coeffs) != len(inp.schedule.chambers):
        raise OrdMismatchError("one ord coefficient per schedule chamber is required")
    for k, (declared, computed) in enumerate(zip(inp.ord_coeffs, expected)):
        if declared != computed:
            raise OrdMismatchError(
                f"chamber {k}: declared ord coefficient {declared} does not match "
                f"the restricted negative part ({computed})")


def negative_part_term(inp: SCurveInput) -> Fraction:
    """The line-integral contribution of Z sitting inside N(u)|_Y."""
    check_ord_coeffs(inp)
    model, sched = inp.model, inp.schedule
    total = Fraction(0)
    for ch, ord_coeff in zip(sched.chambers, inp.ord_coeffs):
        if ord_coeff.is_zero():
            continue
        p = sched.positive_part(inp.surface.cls, model.anticanonical, ch)
        p2y = to_poly2(triple_product(p, p, inp.surface.cls, model.form)).subs_v(0)
        total += integrate_univariate(p2y * ord_coeff, ch.u_lo, ch.u_hi)
    return 3 * total / model.degree()


def volume_charts(inp: SCurveInput, z: DivisorClass | None = None
                  ) -> list[ZariskiChart]:
    """One chart per schedule chamber for ``P(u)|_Y - v Z``."""
    z = inp.z if z is None else z
    charts = []
    for ch in inp.schedule.chambers:
        p = inp.schedule.positive_part(inp.surface.cls, inp.model.anticanonical, ch)
        d0 = restrict(p, inp.surface.restriction)
        charts.append(build_chart(d0, z, [ch.u_lo, ch.u_hi],
                                  inp.surface.extremal_curves, inp.surface.form))
    return charts


def volume_term(inp: SCurveInput, z: DivisorClass | None = None) -> Fraction:
    total = sum((chart.volume_integral() for chart in volume_charts(inp, z)),
                Fraction(0))
    return 3 * total / inp.model.degree()


def s_curve(inp: SCurveInput) -> Fraction:
    """The full curve invariant: negative-part term plus chart volumes."""
    validate_schedule(inp.model, inp.surface.cls, inp.schedule)
    return negative_part_term(inp) + volume_term(inp)


def dominance_bound(inp: SCurveInput, z_lower: DivisorClass) -> Fraction:
    """Curve invariant of a dominated class.

    Volumes are monotone: replacing Z by a class it dominates (Z minus the
    replacement decomposes over the surface's extremal curves) can only grow
    every integrand, so the returned value is an upper bound for the curve
    invariant of Z.  The ord coefficients of the replacement are recomputed
    from the schedule (they belong to the replacement curve, not to Z).
    """
    diff = inp.z - z_lower
    curve_cone = ConeSpec(list(inp.surface.extremal_curves))
    dominated = (not z_lower.is_zero()
                 and isinstance(effective_decompose(diff, curve_cone), Decomposition))
    if not dominated:
        raise DominanceError(
            "dominance violation: the bound class must be nonzero and dominated "
            "by Z over the surface's extremal curves")
    lowered = replace(inp, z=z_lower, ord_coeffs=())
    lowered = replace(lowered, ord_coeffs=expected_ord_coeffs(lowered))
    return s_curve(lowered)
