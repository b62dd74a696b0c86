"""Group algebra of finitely piecewise homeomorphisms.

A group element is a bisection whose source and range cylinders both
partition the whole space.  Elements are kept in canonical form:
complete sibling families of pieces with the same behaviour are merged
(odometer: equal powers; shift: suffix-compatible targets) and pieces
are sorted by source, so syntactic equality coincides with equality of
the underlying homeomorphisms.

Composition f * g denotes x -> f(g(x)); group words read left to right
in the same order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .backends import (Bisection, BackendId, OdometerPiece, Piece, ShiftPiece,
                       apply_piece, check_bisection, piece_carry,
                       piece_range_word, split_piece)
from .clopen import ClopenSet, Cylinder, PointName, Word, is_prefix
from .errors import MalformedInput, PostconditionError, PreconditionError


def _mergeable(family: list[Piece], parent: Word, base: int) -> Piece | None:
    family.sort(key=lambda p: p.source)
    if any(p.source != parent + (a,) for a, p in enumerate(family)):
        return None
    first = family[0]
    if isinstance(first, OdometerPiece):
        if any(p.power != first.power for p in family[1:]):
            return None
        return OdometerPiece(parent, first.power)
    if any(not p.target or p.target[-1] != p.source[-1] for p in family):
        return None
    stem = first.target[:-1]
    if any(p.target[:-1] != stem for p in family[1:]):
        return None
    return ShiftPiece(parent, stem)


def _merge_pieces(pieces: Iterable[Piece], base: int) -> tuple[Piece, ...]:
    """Greedily merge complete sibling families with compatible behaviour."""
    pieces = list(pieces)
    pool: dict[Word, Piece] = {p.source: p for p in pieces}
    if len(pool) != len(pieces):
        raise MalformedInput("duplicate source cylinders among pieces")
    changed = True
    while changed:
        changed = False
        parents: dict[Word, list[Piece]] = {}
        for w, p in pool.items():
            if w:
                parents.setdefault(w[:-1], []).append(p)
        for parent, family in parents.items():
            if len(family) != base:
                continue
            merged = _mergeable(family, parent, base)
            if merged is None:
                continue
            for p in family:
                del pool[p.source]
            pool[parent] = merged
            changed = True
    return tuple(sorted(pool.values(), key=lambda p: p.source))


def _check_partition(words: Sequence[Word], base: int, which: str) -> None:
    if not words:
        raise MalformedInput(f"{which} cylinders do not cover the whole space")
    ordered = sorted(words)
    for a, b in zip(ordered, ordered[1:]):
        if is_prefix(a, b):
            raise MalformedInput(f"{which} cylinders overlap: {a} vs {b}")
    deepest = max(len(w) for w in words)
    total = sum(base ** (deepest - len(w)) for w in words)
    if total != base ** deepest:
        raise MalformedInput(f"{which} cylinders do not cover the whole space")


@dataclass(frozen=True)
class GroupElement:
    """A full-group element with finitely many prefix-map pieces."""

    bisection: Bisection

    def __post_init__(self):
        base = self.bisection.base
        canon = _merge_pieces(self.bisection.pieces, base)
        object.__setattr__(self, "bisection", Bisection(self.bisection.backend, canon))
        _check_partition(self.bisection.source_words(), base, "source")
        _check_partition(self.bisection.range_words(), base, "range")

    @classmethod
    def _trusted(cls, backend: BackendId, pieces: Iterable[Piece]) -> "GroupElement":
        """Canonicalize without partition checks.  Only for pieces coming
        out of compose/inverse, which preserve validity by construction."""
        elem = object.__new__(cls)
        canon = _merge_pieces(pieces, backend.base)
        object.__setattr__(elem, "bisection", Bisection(backend, canon))
        return elem

    @property
    def backend(self) -> BackendId:
        return self.bisection.backend

    @property
    def base(self) -> int:
        return self.bisection.base

    @property
    def pieces(self) -> tuple[Piece, ...]:
        return self.bisection.pieces

    def is_identity(self) -> bool:
        return all(p.is_identity() for p in self.pieces)

    def _check_backend(self, other: "GroupElement") -> None:
        if other.backend != self.backend:
            raise MalformedInput(
                f"backend mismatch: {self.backend.tag} vs {other.backend.tag}")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def __invert__(self) -> "GroupElement":
        return inverse(self)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return inverse(self) ** (-n)
        result = identity(self.backend)
        for _ in range(n):
            result = compose(result, self)
        return result

    def support(self) -> ClopenSet:
        return support(self)

    def image(self, A: ClopenSet) -> ClopenSet:
        return image_of_clopen(self, A)

    def __str__(self):
        from .encoding import format_element
        return format_element(self)


def identity(backend: BackendId) -> GroupElement:
    piece: Piece = OdometerPiece((), 0) if backend.is_odometer else ShiftPiece((), ())
    return GroupElement(Bisection(backend, (piece,)))


def element_from_pieces(backend: BackendId, pieces: Iterable[Piece],
                        fill_identity: bool = True) -> GroupElement:
    """Build an element from a partial list of pieces.

    With fill_identity, the complement of the union of sources (which
    must equal the complement of the union of ranges) is filled with
    identity pieces.
    """
    pieces = list(pieces)
    bis = check_bisection(Bisection(backend, tuple(pieces)))
    if fill_identity:
        src = ClopenSet.from_words(backend.base, bis.source_words())
        rng = ClopenSet.from_words(backend.base, bis.range_words())
        if src != rng:
            raise MalformedInput(
                "cannot fill with the identity: sources and ranges cover different sets")
        for w in src.complement().words:
            pieces.append(OdometerPiece(w, 0) if backend.is_odometer else ShiftPiece(w, w))
    return GroupElement(Bisection(backend, tuple(pieces)))


def involution_from_partial(backend: BackendId, pieces: Iterable[Piece]) -> GroupElement:
    """The involution acting by the given pieces on their disjoint sources,
    by their inverses on the ranges, and trivially elsewhere."""
    pieces = list(pieces)
    base = backend.base
    src = ClopenSet.from_words(base, [p.source for p in pieces])
    rng = ClopenSet.from_words(base, [piece_range_word(p, base) for p in pieces])
    if not src.intersect(rng).is_empty():
        raise PreconditionError("involution pieces must have disjoint sources and ranges")
    both = pieces + [_invert_piece(p, base) for p in pieces]
    return element_from_pieces(backend, both, fill_identity=True)


def _invert_piece(piece: Piece, base: int) -> Piece:
    if isinstance(piece, OdometerPiece):
        return OdometerPiece(piece_range_word(piece, base), -piece.power)
    return ShiftPiece(piece.target, piece.source)


def compose(f: GroupElement, g: GroupElement) -> GroupElement:
    """The element x -> f(g(x))."""
    f._check_backend(g)
    base = f.base
    by_source = {p.source: p for p in f.pieces}
    out: list[Piece] = []
    stack = list(g.pieces)
    while stack:
        p = stack.pop()
        w = piece_range_word(p, base)
        hit = None
        for i in range(len(w), -1, -1):
            q = by_source.get(w[:i])
            if q is not None:
                hit = q
                break
        if hit is None:
            stack.extend(split_piece(p, base))
            continue
        if isinstance(p, OdometerPiece):
            out.append(OdometerPiece(p.source, p.power + hit.power))
        else:
            out.append(ShiftPiece(p.source, hit.target + w[len(hit.source):]))
    return GroupElement._trusted(f.backend, out)


def inverse(f: GroupElement) -> GroupElement:
    base = f.base
    return GroupElement._trusted(
        f.backend, [_invert_piece(p, base) for p in f.pieces])


def equals(f: GroupElement, g: GroupElement) -> bool:
    f._check_backend(g)
    return f.bisection == g.bisection


def support(f: GroupElement) -> ClopenSet:
    """Closure of the moved points: the union of the sources of the
    non-identity pieces.  Exact on both backends (odometer pieces with
    nonzero power are fixed-point free; a shift piece with distinct
    source and target moves a dense subset of its source)."""
    return ClopenSet.from_words(
        f.base, [p.source for p in f.pieces if not p.is_identity()])


def image_of_clopen(f: GroupElement, A: ClopenSet) -> ClopenSet:
    if A.base != f.base:
        raise MalformedInput("base mismatch between element and clopen set")
    out: list[Word] = []
    for w in A.words:
        for p in f.pieces:
            s = p.source
            if len(s) <= len(w):
                if is_prefix(s, w):
                    # sources form an antichain: the ancestor is unique
                    out.append(apply_piece(p, Cylinder(f.base, w)).word)
                    break
            elif is_prefix(w, s):
                out.append(piece_range_word(p, f.base))
    return ClopenSet.from_words(f.base, out)


def apply_point(f: GroupElement, point: PointName) -> PointName:
    if point.base != f.base:
        raise MalformedInput("base mismatch between element and point")
    for p in f.pieces:
        if point.prefix(len(p.source)) == p.source:
            tail = point.drop(len(p.source))
            if isinstance(p, OdometerPiece):
                carried = tail.add_integer(piece_carry(p, f.base))
                return carried.prepend(piece_range_word(p, f.base))
            return tail.prepend(p.target)
    raise PostconditionError("element sources do not cover the point")


def commutator(f: GroupElement, g: GroupElement) -> tuple[GroupElement, "DerivedWitness"]:
    """f g f^-1 g^-1 together with its one-leaf derived witness."""
    f._check_backend(g)
    elem = compose(compose(compose(f, g), inverse(f)), inverse(g))
    return elem, DerivedWitness(((f, g),))


def conjugate(g: GroupElement, f: GroupElement) -> GroupElement:
    """g f g^-1."""
    return compose(compose(g, f), inverse(g))


@dataclass(frozen=True)
class DerivedWitness:
    """A product of commutator leaves certifying membership in the
    derived subgroup; evaluates to the element it accompanies."""

    factors: tuple[tuple[GroupElement, GroupElement], ...]

    def evaluate(self, backend: BackendId | None = None) -> GroupElement:
        if not self.factors:
            if backend is None:
                raise MalformedInput("empty witness needs an explicit backend")
            return identity(backend)
        leaves = [commutator(f, g)[0] for f, g in self.factors]
        return reduce(compose, leaves)

    def __mul__(self, other: "DerivedWitness") -> "DerivedWitness":
        return DerivedWitness(self.factors + other.factors)


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    vacuous: bool
    failures: tuple[ClopenSet, ...]


def check_measure_invariance(f: GroupElement,
                             trials: Iterable[ClopenSet]) -> InvarianceReport:
    """Exact check that mu(f(A)) = mu(A) for each trial set A.

    On the full shift the invariant measure set is empty, so the check
    passes vacuously.
    """
    if not f.backend.is_odometer:
        return InvarianceReport(passed=True, vacuous=True, failures=())
    bad = tuple(A for A in trials
                if image_of_clopen(f, A).measure() != A.measure())
    return InvarianceReport(passed=not bad, vacuous=False, failures=bad)
