"""Zariski decomposition on surfaces: pointwise, along a v-ray, and as charts.

``zariski_decompose`` is the classical fixpoint: repeatedly enlarge the
support by every extremal curve pairing negatively with the current positive
part, re-solving the square Gram system each round.  The decomposition
exists exactly when the input is pseudo-effective; two failure modes are
distinguished:

* a curve of nonnegative self-intersection pairing negatively (on these
  surfaces such curves are nef, so the class has left the effective cone),
  or a solved negative-part coefficient going negative, both reported as
  :class:`NotPseudoEffectiveError`;
* a candidate support whose Gram matrix is not negative definite, reported
  as :class:`IndefiniteSupportError` (for honest geometric data this also
  means the input was not pseudo-effective).

``v_sweep`` walks ``D0 - v Z`` upward in v from 0: walls occur where an
affine pairing function crosses zero (a curve enters the support; ties enter
together) and the sweep terminates at the smallest rational root of the
quadratic ``vol(v)``.

``build_chart`` reconstructs the symbolic picture over each u-interval by
sampling sweeps at five interior rational points, fitting affine data from
three of them, and re-verifying everything at the other two.  A fit mismatch
means a wall crossing hides inside the interval; its exact location is
recovered from the rational roots of the fitted volume's v-discriminant (or
from intersections of inconsistent boundary fits) and the interval is
subdivided there, to a bounded depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .lattice import DivisorClass, SurfaceForm, surface_pair
from .ratmath import (IrrationalBreakpointError, Poly1, Poly2, demote, format_poly,
                      format_rational, integrate_region, rational_roots, to_poly2)

NamedCurve = tuple[str, DivisorClass]


class NotPseudoEffectiveError(ArithmeticError):
    """The class lies outside the pseudo-effective cone of the surface."""


class IndefiniteSupportError(ArithmeticError):
    """A candidate support's Gram matrix is not negative definite."""


class FitMismatchError(ArithmeticError):
    """Sampled sweeps refuse to fit affine data even after subdivision."""


@dataclass(frozen=True)
class ZariskiResult:
    positive: DivisorClass
    negative: tuple[tuple[str, Fraction], ...]  # curve name -> coefficient >= 0
    support: tuple[str, ...]

    def negative_class(self, curves: dict[str, DivisorClass]) -> DivisorClass:
        out = self.positive.basis.zero()
        for name, coeff in self.negative:
            out = out + curves[name].scale(coeff)
        return out


def _solve_support(d: DivisorClass, support: list[NamedCurve], form: SurfaceForm):
    """Coefficients n with (d - sum n_i C_i) . C_j = 0 for all j in support."""
    gram = form.gram([cls for _, cls in support])
    if not linalg.is_negative_definite(gram):
        names = [name for name, _ in support]
        raise IndefiniteSupportError(
            f"support {names} has a Gram matrix that is not negative definite "
            "(the input class is not pseudo-effective, or the curve data is wrong)")
    rhs = [surface_pair(d, cls, form) for _, cls in support]
    solution = linalg.solve_unique(gram, rhs)
    assert solution is not None  # negative definite => nonsingular
    return solution


def zariski_decompose(d: DivisorClass, extremal_curves: Sequence[NamedCurve],
                      form: SurfaceForm) -> ZariskiResult:
    """Unique decomposition d = P + N for a pseudo-effective rational class."""
    if not all(isinstance(c, Fraction) for c in d.coeffs):
        raise ValueError("pointwise decomposition needs rational coefficients")
    support: list[NamedCurve] = []
    coeffs: list[Fraction] = []
    p = d
    for _ in range(len(extremal_curves) + 1):
        entering = []
        for name, cls in extremal_curves:
            if name in (n for n, _ in support):
                continue
            value = surface_pair(p, cls, form)
            if value < 0:
                if surface_pair(cls, cls, form) >= 0:
                    raise NotPseudoEffectiveError(
                        f"not pseudo-effective: pairing with the nef curve {name!r} "
                        f"is {format_rational(value)} < 0")
                entering.append((name, cls))
        if not entering:
            break
        support.extend(entering)
        coeffs = _solve_support(d, support, form)
        p = d
        for (name, cls), n in zip(support, coeffs):
            p = p - cls.scale(n)
    if any(n < 0 for n in coeffs):
        raise NotPseudoEffectiveError(
            "not pseudo-effective: a negative-part coefficient came out negative")
    vol = surface_pair(p, p, form)
    if vol < 0:
        raise NotPseudoEffectiveError(
            f"not pseudo-effective: positive part has self-intersection {format_rational(vol)}")
    return ZariskiResult(
        positive=p,
        negative=tuple((name, n) for (name, _), n in zip(support, coeffs)),
        support=tuple(name for name, _ in support))


@dataclass(frozen=True)
class SweepChamber:
    """One v-interval of constant support along a sweep at fixed u."""

    v_lo: Fraction
    v_hi: Fraction
    support: tuple[str, ...]
    positive: DivisorClass       # coefficients are affine in v
    vol: Poly1                   # quadratic in v

    def positive_at(self, v: Fraction) -> DivisorClass:
        return self.positive.evaluate(v=v)


def _as_v_poly(x) -> Poly1:
    x = demote(to_poly2(x))
    if isinstance(x, Fraction):
        return Poly1.constant("v", x)
    if isinstance(x, Poly1) and x.var == "v":
        return x
    raise ValueError("expected a value depending on v only")


def _terminal_root(vol: Poly1, after: Fraction, at_most: Fraction | None):
    """Smallest root of vol in (after, at_most], or None.

    Screens with exact sign evaluations first, so root extraction (which
    errors on irrational roots) only runs when a root really is inside.
    """
    if vol.degree <= 0:
        return None
    if vol.degree == 1:
        root = -vol.coefficient(0) / vol.coefficient(1)
        if root > after and (at_most is None or root <= at_most):
            return root
        return None
    lead = vol.coefficient(2)
    disc = vol.coefficient(1) ** 2 - 4 * lead * vol.coefficient(0)
    if disc < 0:
        return None
    if at_most is not None:
        hi = vol(at_most)
        if hi > 0:
            if lead < 0:
                return None  # concave, positive at both ends
            vertex = -vol.coefficient(1) / (2 * lead)
            if not (after < vertex < at_most) or vol(vertex) > 0:
                return None
    roots = [r for r in rational_roots(vol) if r > after]
    if at_most is not None:
        roots = [r for r in roots if r <= at_most]
    return min(roots) if roots else None


def v_sweep(d0: DivisorClass, z: DivisorClass, u: Fraction,
            extremal_curves: Sequence[NamedCurve],
            form: SurfaceForm) -> list[SweepChamber]:
    """Chambers of the Zariski decomposition of ``d0(u) - v z`` for v >= 0."""
    u = Fraction(u)
    start = d0.evaluate(u=u)
    base = zariski_decompose(start, extremal_curves, form)  # validates v = 0
    if surface_pair(base.positive, base.positive, form) == 0:
        raise NotPseudoEffectiveError(
            f"the ray at u={format_rational(u)} starts on the pseudo-effective boundary")
    v = Poly1.variable("v")
    ray = DivisorClass(start.basis, [a - v * b for a, b in zip(start.coeffs, z.coeffs)])
    support = [(name, cls) for name, cls in extremal_curves if name in base.support]
    chambers: list[SweepChamber] = []
    v0 = Fraction(0)
    for _ in range(2 * len(extremal_curves) + 2):
        if support:
            coeffs = _solve_support(ray, support, form)
            p = ray
            for (_, cls), n in zip(support, coeffs):
                p = p - cls.scale(n)
        else:
            p = ray
        vol = _as_v_poly(surface_pair(p, p, form))
        walls: list[tuple[Fraction, str, DivisorClass]] = []
        for name, cls in extremal_curves:
            if name in (n for n, _ in support):
                continue
            g = _as_v_poly(surface_pair(p, cls, form))
            if g.degree != 1 or g.coefficient(1) >= 0:
                continue  # constant or nondecreasing: never crosses downward
            root = -g.coefficient(0) / g.coefficient(1)
            if root >= v0:
                walls.append((root, name, cls))
        wall_v = min((w for w, _, _ in walls), default=None)
        if wall_v == v0:
            # a curve is exactly on its wall at the chamber floor: absorb it
            support.extend((n, c) for w, n, c in walls if w == v0)
            continue
        terminal = _terminal_root(vol, v0, wall_v)
        if terminal is not None:
            chambers.append(SweepChamber(v0, terminal, tuple(n for n, _ in support), p, vol))
            return chambers
        if wall_v is None:
            raise NotPseudoEffectiveError(
                "sweep does not terminate: the subtracted curve class is not constraining")
        chambers.append(SweepChamber(v0, wall_v, tuple(n for n, _ in support), p, vol))
        support.extend((n, c) for w, n, c in walls if w == wall_v)
        v0 = wall_v
    raise AssertionError("support cannot grow beyond the supplied curve list")


@dataclass(frozen=True)
class ChartChamber:
    """One chamber of a symbolic (u, v) chart."""

    u_lo: Fraction
    u_hi: Fraction
    v_lo: Poly1                  # affine in u
    v_hi: Poly1
    support: tuple[str, ...]
    positive: DivisorClass       # coefficients affine in u and v
    vol: Poly2

    def describe(self) -> str:
        return (f"u in [{format_rational(self.u_lo)}, {format_rational(self.u_hi)}], "
                f"v in [{format_poly(self.v_lo)}, {format_poly(self.v_hi)}], "
                f"support {{{', '.join(self.support)}}}, "
                f"vol = {format_poly(self.vol)}")


@dataclass(frozen=True)
class ZariskiChart:
    chambers: tuple[ChartChamber, ...]

    def volume_integral(self) -> Fraction:
        total = Fraction(0)
        for ch in self.chambers:
            total += integrate_region(ch.vol, ch.u_lo, ch.u_hi, ch.v_lo, ch.v_hi)
        return total

    def v_max(self, u: Fraction) -> Fraction:
        """Outer pseudo-effective boundary above a given u."""
        tops = [ch.v_hi(u) for ch in self.chambers if ch.u_lo <= u <= ch.u_hi]
        if not tops:
            raise ValueError(f"u={format_rational(u)} is outside the chart")
        return max(tops)

    def u_cells(self) -> list[tuple[Fraction, Fraction]]:
        return sorted({(ch.u_lo, ch.u_hi) for ch in self.chambers})

    def stack(self, u_lo: Fraction, u_hi: Fraction) -> list[ChartChamber]:
        column = [ch for ch in self.chambers if (ch.u_lo, ch.u_hi) == (u_lo, u_hi)]
        return sorted(column, key=lambda ch: ch.v_lo((u_lo + u_hi) / 2))

    def describe(self) -> str:
        return "\n".join(ch.describe() for ch in self.chambers)


def build_chart(d0: DivisorClass, z: DivisorClass, u_breaks: Sequence[Fraction],
                extremal_curves: Sequence[NamedCurve], form: SurfaceForm,
                max_depth: int = 8) -> ZariskiChart:
    """Symbolic chamber chart of ``d0(u) - v z`` over consecutive u-intervals.

    ``u_breaks`` must include every u where the input family itself changes
    (the schedule's chamber endpoints); wall crossings interior to a cell are
    discovered by fit verification and exact subdivision.
    """
    breaks = sorted(set(Fraction(b) for b in u_breaks))
    if len(breaks) < 2:
        raise ValueError("need at least two u-breakpoints")
    chambers: list[ChartChamber] = []
    for lo, hi in zip(breaks, breaks[1:]):
        chambers.extend(_chart_cell(d0, z, lo, hi, extremal_curves, form, max_depth))
    return ZariskiChart(tuple(chambers))


def _sample_points(u_lo: Fraction, u_hi: Fraction) -> list[Fraction]:
    width = u_hi - u_lo
    return [u_lo + width * Fraction(k, 8) for k in (2, 4, 6, 1, 7)]  # 3 fit + 2 verify


def _chart_cell(d0, z, u_lo, u_hi, curves, form, depth) -> list[ChartChamber]:
    samples = _sample_points(u_lo, u_hi)
    sweeps = [v_sweep(d0, z, u, curves, form) for u in samples]
    fitted = _fit_cell(d0, u_lo, u_hi, samples[:3], sweeps[:3], form)
    if fitted is not None and all(
            _matches(fitted, u, sw) for u, sw in zip(samples, sweeps)):
        return fitted
    if depth <= 0:
        raise FitMismatchError(
            f"no affine chamber structure on u in [{format_rational(u_lo)}, "
            f"{format_rational(u_hi)}] after exhausting the subdivision depth")
    split = _find_split(fitted, samples, sweeps, u_lo, u_hi)
    return (_chart_cell(d0, z, u_lo, split, curves, form, depth - 1)
            + _chart_cell(d0, z, split, u_hi, curves, form, depth - 1))


def _fit_affine(samples: list[tuple[Fraction, Fraction]]) -> Poly1 | None:
    """Affine polynomial in u through all sample points, or None."""
    (u1, w1), (u2, w2) = samples[0], samples[1]
    slope = (w2 - w1) / (u2 - u1)
    fit = Poly1("u", [w1 - slope * u1, slope])
    if all(fit(u) == w for u, w in samples):
        return fit
    return None


def _fit_affine_uv(samples: list[tuple[Fraction, Poly1]]) -> Poly2 | None:
    """Jointly affine polynomial in (u, v) matching affine-in-v sample slices."""
    v_slopes = {p.coefficient(1) for _, p in samples}
    if len(v_slopes) != 1:
        return None
    const = _fit_affine([(u, p.coefficient(0)) for u, p in samples])
    if const is None:
        return None
    return to_poly2(const) + to_poly2(Poly1.variable("v")) * v_slopes.pop()


def _fit_cell(d0, u_lo, u_hi, samples, sweeps, form) -> list[ChartChamber] | None:
    if len({tuple(ch.support for ch in sw) for sw in sweeps}) != 1:
        return None
    out: list[ChartChamber] = []
    for k in range(len(sweeps[0])):
        v_lo = _fit_affine([(u, sw[k].v_lo) for u, sw in zip(samples, sweeps)])
        v_hi = _fit_affine([(u, sw[k].v_hi) for u, sw in zip(samples, sweeps)])
        if v_lo is None or v_hi is None:
            return None
        coeff_fits = []
        for i in range(d0.basis.rank):
            slices = [(u, _as_v_poly(sw[k].positive.coeffs[i]))
                      for u, sw in zip(samples, sweeps)]
            fit = _fit_affine_uv(slices)
            if fit is None:
                return None
            coeff_fits.append(fit)
        positive = DivisorClass(d0.basis, coeff_fits)
        vol = to_poly2(surface_pair(positive, positive, form))
        out.append(ChartChamber(u_lo, u_hi, v_lo, v_hi,
                                sweeps[0][k].support, positive, vol))
    return out


def _matches(chambers: list[ChartChamber], u: Fraction, sweep: list[SweepChamber]) -> bool:
    """Does the symbolic cell reproduce the sweep at this sample exactly?"""
    if len(chambers) != len(sweep):
        return False
    for ch, sw in zip(chambers, sweep):
        if ch.support != sw.support:
            return False
        if ch.v_lo(u) != sw.v_lo or ch.v_hi(u) != sw.v_hi:
            return False
        for a, b in zip(ch.positive.coeffs, sw.positive.coeffs):
            if to_poly2(a).subs_u(u) != _as_v_poly(b):
                return False
        if ch.vol.subs_u(u) != sw.vol:
            return False
    return True


def _find_split(fitted, samples, sweeps, u_lo, u_hi) -> Fraction:
    """Exact interior u where the chamber structure changes.

    The fitted volume of a chamber knows both of its wall branches even when
    the sweeps only ever report the smaller one, so wall crossovers show up
    as rational roots of the v-discriminant.  Failing that, intersect
    inconsistent affine fits of the chamber boundaries; failing that, bisect.
    """
    if fitted is not None:
        crossings: list[Fraction] = []
        for ch in fitted:
            vol = ch.vol
            lead = vol.coefficient(0, 2)
            if vol.degree_v == 2:
                b = Poly1("u", [vol.coefficient(i, 1) for i in range(vol.degree_u + 1)])
                c = Poly1("u", [vol.coefficient(i, 0) for i in range(vol.degree_u + 1)])
                disc = b * b - 4 * lead * c
                if not disc.is_zero() and disc.degree <= 2:
                    try:
                        crossings.extend(rational_roots(disc))
                    except IrrationalBreakpointError:
                        pass
        crossings = sorted(c for c in crossings if u_lo < c < u_hi)
        if crossings:
            return crossings[0]
    candidates: list[Fraction] = []
    ordered = sorted(zip(samples, sweeps))
    depth = min(len(sw) for _, sw in ordered)
    for k in range(depth):
        for pick in (lambda sw: sw[k].v_hi, lambda sw: sw[k].v_lo):
            lines = []
            for (u1, s1), (u2, s2) in zip(ordered, ordered[1:]):
                slope = (pick(s2) - pick(s1)) / (u2 - u1)
                lines.append(Poly1("u", [pick(s1) - slope * u1, slope]))
            for f1, f2 in zip(lines, lines[1:]):
                diff = f1 - f2
                if not diff.is_zero() and diff.degree == 1:
                    candidates.extend(rational_roots(diff))
    interior = sorted(c for c in candidates if u_lo < c < u_hi)
    if interior:
        return interior[0]
    return (u_lo + u_hi) / 2
