"""Divisor and curve classes with exact intersection pairings.

A :class:`LatticeBasis` fixes an ordered list of generator names (for the
threefold: the plane pullback and the two exceptional surfaces; for each
embedded surface: its own curve basis).  A :class:`DivisorClass` is a
coefficient vector over such a basis; coefficients may be rational or
polynomial in the parameters u, v, and all arithmetic promotes kinds
automatically.

Intersection data is shipped as value tables:

* :class:`ThreefoldForm` -- symmetric trilinear form, nonzero triples only.
* :class:`SurfaceForm` -- symmetric bilinear form.
* :class:`RestrictionMap` -- threefold generator -> surface class.
* :class:`CurvePairing` -- intersection numbers of a fixed curve against the
  threefold generators (given directly as data: some of these curves are not
  divisor-class intersections in the modeled lattice).

All values are immutable and all operations are pure, so everything here may
be shared freely between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .ratmath import Coeff, Poly1, Poly2, demote, format_poly, to_poly2

CoeffIn = Union[int, Fraction, Poly1, Poly2]


class BasisMismatchError(ValueError):
    """Classes from different bases were combined."""


@dataclass(frozen=True)
class LatticeBasis:
    """Ordered generator names; order is fixed for the lifetime of a scenario."""

    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def rank(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}; basis is {self.names}") from None

    def unit(self, name: str) -> "DivisorClass":
        coeffs = [Fraction(0)] * self.rank
        coeffs[self.index(name)] = Fraction(1)
        return DivisorClass(self, coeffs)

    def zero(self) -> "DivisorClass":
        return DivisorClass(self, [Fraction(0)] * self.rank)


def _unify(coeffs: Sequence[CoeffIn]) -> tuple[Coeff, ...]:
    """Promote a coefficient vector to a single kind (the class invariant)."""
    cs = [demote(c) if isinstance(c, (Poly1, Poly2)) else Fraction(c) for c in coeffs]
    if any(isinstance(c, Poly2) for c in cs):
        return tuple(to_poly2(c) for c in cs)
    vars_used = {c.var for c in cs if isinstance(c, Poly1)}
    if len(vars_used) > 1:
        return tuple(to_poly2(c) for c in cs)
    if vars_used:
        var = vars_used.pop()
        return tuple(c if isinstance(c, Poly1) else Poly1.constant(var, c) for c in cs)
    return tuple(cs)


class DivisorClass:
    """Exact coefficient vector over a named lattice basis."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: LatticeBasis, coeffs: Sequence[CoeffIn]):
        coeffs = tuple(coeffs)
        if len(coeffs) != basis.rank:
            raise ValueError(f"expected {basis.rank} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", _unify(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("DivisorClass is immutable")

    def coefficient(self, name: str) -> Coeff:
        return self.coeffs[self.basis.index(name)]

    def is_zero(self) -> bool:
        return all(to_poly2(c).is_zero() for c in self.coeffs)

    def _check(self, other: "DivisorClass") -> None:
        if self.basis != other.basis:
            raise BasisMismatchError(
                f"basis mismatch: {self.basis.names} vs {other.basis.names}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return (self.basis == other.basis
                and all(to_poly2(a) == to_poly2(b)
                        for a, b in zip(self.coeffs, other.coeffs)))

    def __hash__(self):
        return hash((self.basis, tuple(to_poly2(c) for c in self.coeffs)))

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.basis, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.basis, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.basis, [-c for c in self.coeffs])

    def scale(self, factor: CoeffIn) -> "DivisorClass":
        if isinstance(factor, (int, Fraction)) and all(
                isinstance(c, Fraction) for c in self.coeffs):
            return DivisorClass(self.basis, [factor * c for c in self.coeffs])
        return DivisorClass(self.basis, [to_poly2(factor) * c for c in self.coeffs])

    def __rmul__(self, factor) -> "DivisorClass":
        return self.scale(factor)

    def evaluate(self, u=None, v=None) -> "DivisorClass":
        """Evaluate parametric coefficients at rational u and/or v."""
        out = []
        for c in self.coeffs:
            if isinstance(c, Poly2):
                if u is not None and v is not None:
                    out.append(c(Fraction(u), Fraction(v)))
                elif u is not None:
                    out.append(c.subs_u(Fraction(u)))
                elif v is not None:
                    out.append(c.subs_v(Fraction(v)))
                else:
                    out.append(c)
            elif isinstance(c, Poly1):
                point = u if c.var == "u" else v
                out.append(c(Fraction(point)) if point is not None else c)
            else:
                out.append(c)
        return DivisorClass(self.basis, out)

    def __str__(self):
        terms = []
        for name, c in zip(self.basis.names, self.coeffs):
            p = to_poly2(c)
            if p.is_zero():
                continue
            if p == Poly2.constant(1):
                terms.append(f"+ {name}")
            elif p == Poly2.constant(-1):
                terms.append(f"- {name}")
            elif p.degree_u <= 0 and p.degree_v <= 0 and p.coefficient(0, 0) < 0:
                terms.append(f"- {format_poly(-p.coefficient(0, 0))}*{name}")
            elif p.degree_u <= 0 and p.degree_v <= 0:
                terms.append(f"+ {format_poly(p.coefficient(0, 0))}*{name}")
            else:
                terms.append(f"+ ({format_poly(demote(p))})*{name}")
        if not terms:
            return "0"
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"DivisorClass({self})"


def _sym_key(indices: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(indices))


@dataclass(frozen=True)
class ThreefoldForm:
    """Symmetric trilinear form given by its nonzero values on basis triples."""

    basis: LatticeBasis
    values: Mapping[tuple[int, int, int], Fraction] = field(default_factory=dict)

    def __init__(self, basis: LatticeBasis,
                 entries: Mapping[tuple[str, str, str], Fraction]):
        table: dict[tuple[int, int, int], Fraction] = {}
        for names, value in entries.items():
            key = _sym_key(basis.index(n) for n in names)
            value = Fraction(value)
            if key in table and table[key] != value:
                raise ValueError(f"tensor symmetry violated at {names}: "
                                 f"{table[key]} vs {value}")
            table[key] = value
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "values", dict(table))

    def value(self, i: int, j: int, k: int) -> Fraction:
        return self.values.get(_sym_key((i, j, k)), Fraction(0))


@dataclass(frozen=True)
class SurfaceForm:
    """Symmetric bilinear form on a surface lattice."""

    basis: LatticeBasis
    values: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __init__(self, basis: LatticeBasis, entries: Mapping[tuple[str, str], Fraction]):
        table: dict[tuple[int, int], Fraction] = {}
        for names, value in entries.items():
            key = _sym_key(basis.index(n) for n in names)
            value = Fraction(value)
            if key in table and table[key] != value:
                raise ValueError(f"pairing symmetry violated at {names}")
            table[key] = value
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "values", dict(table))

    def value(self, i: int, j: int) -> Fraction:
        return self.values.get(_sym_key((i, j)), Fraction(0))

    def gram(self, classes: Sequence[DivisorClass]) -> list[list[Fraction]]:
        return [[surface_pair(a, b, self) for b in classes] for a in classes]


@dataclass(frozen=True)
class RestrictionMap:
    """Linear map from the threefold lattice to a surface lattice."""

    source: LatticeBasis
    target: LatticeBasis
    images: tuple[DivisorClass, ...]

    def __init__(self, source: LatticeBasis, target: LatticeBasis,
                 images: Mapping[str, DivisorClass]):
        missing = set(source.names) - set(images)
        if missing:
            raise ValueError(f"restriction map is missing generators {sorted(missing)}")
        ordered = []
        for name in source.names:
            img = images[name]
            if img.basis != target:
                raise BasisMismatchError(f"image of {name} is not over the target basis")
            ordered.append(img)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "images", tuple(ordered))


@dataclass(frozen=True)
class CurvePairing:
    """Intersection numbers of one named curve against the threefold generators."""

    name: str
    basis: LatticeBasis
    table: tuple[Fraction, ...]

    def __init__(self, name: str, basis: LatticeBasis, table: Mapping[str, Fraction]):
        missing = set(basis.names) - set(table)
        if missing:
            raise ValueError(f"curve table {name!r} is missing generators {sorted(missing)}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "table",
                           tuple(Fraction(table[n]) for n in basis.names))


def _all_rational(*classes: DivisorClass) -> bool:
    return all(isinstance(c, Fraction) for d in classes for c in d.coeffs)


def triple_product(d1: DivisorClass, d2: DivisorClass, d3: DivisorClass,
                   form: ThreefoldForm) -> Coeff:
    """Trilinear expansion of the intersection form; exact."""
    for d in (d1, d2, d3):
        if d.basis != form.basis:
            raise BasisMismatchError("class is not over the form's basis")
    if _all_rational(d1, d2, d3):
        total = Fraction(0)
        for (i, j, k), t in form.values.items():
            for a, b, c in {(i, j, k), (i, k, j), (j, i, k),
                            (j, k, i), (k, i, j), (k, j, i)}:
                total += d1.coeffs[a] * d2.coeffs[b] * d3.coeffs[c] * t
        return total
    rank = form.basis.rank
    total = Poly2.constant(0)
    for i in range(rank):
        a = to_poly2(d1.coeffs[i])
        if a.is_zero():
            continue
        for j in range(rank):
            b = to_poly2(d2.coeffs[j])
            if b.is_zero():
                continue
            ab = a * b
            for k in range(rank):
                t = form.value(i, j, k)
                if t == 0:
                    continue
                c = to_poly2(d3.coeffs[k])
                if c.is_zero():
                    continue
                total = total + ab * c * t
    return demote(total)


def surface_pair(a: DivisorClass, b: DivisorClass, form: SurfaceForm) -> Coeff:
    """Bilinear expansion of a surface intersection form; exact."""
    if a.basis != form.basis or b.basis != form.basis:
        raise BasisMismatchError("class is not over the form's basis")
    if _all_rational(a, b):
        total = Fraction(0)
        for (i, j), t in form.values.items():
            total += a.coeffs[i] * b.coeffs[j] * t
            if i != j:
                total += a.coeffs[j] * b.coeffs[i] * t
        return total
    rank = form.basis.rank
    total = Poly2.constant(0)
    for i in range(rank):
        x = to_poly2(a.coeffs[i])
        if x.is_zero():
            continue
        for j in range(rank):
            t = form.value(i, j)
            if t == 0:
                continue
            y = to_poly2(b.coeffs[j])
            if y.is_zero():
                continue
            total = total + x * y * t
    return demote(total)


def restrict(d: DivisorClass, rmap: RestrictionMap) -> DivisorClass:
    """Linear image of a threefold class on the surface."""
    if d.basis != rmap.source:
        raise BasisMismatchError("class is not over the restriction map's source basis")
    out = rmap.target.zero()
    for coeff, image in zip(d.coeffs, rmap.images):
        out = out + image.scale(coeff)
    return out


def pair_with_curve(d: DivisorClass, curve: CurvePairing) -> Coeff:
    """Linear extension of a curve's intersection table."""
    if d.basis != curve.basis:
        raise BasisMismatchError("class is not over the curve table's basis")
    total = Poly2.constant(0)
    for coeff, value in zip(d.coeffs, curve.table):
        if value:
            total = total + to_poly2(coeff) * value
    return demote(total)
