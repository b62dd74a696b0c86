"""The two concrete ample groupoid models on the Cantor set.

* Odometer: the "+1 with carry" action of the integers on {0,..,b-1}^N
  read as base-b integers, least-significant digit first.  A piece
  (u, n) is the restriction of "add n" to the cylinder [u]; its image is
  the same-depth cylinder of (value(u) + n) mod b**|u| and the leftover
  carry propagates into the tail.  Uniquely ergodic: the Bernoulli
  measure is the single invariant measure.

* Full shift: prefix-rewrite pieces u.y -> v.y of arbitrary lag
  |u| - |v|.  No invariant probability measure exists, so comparison of
  clopen sets is unconditional.

Both are minimal and second countable; this is a documented fact about
the models, not a runtime check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

from .clopen import ClopenSet, Cylinder, Word, is_prefix
from .errors import MalformedInput, PreconditionError

ODOMETER = "odometer"
FULL_SHIFT = "full-shift"

UNIQUE_ERGODIC = "unique-ergodic"
NO_INVARIANT_MEASURE = "empty"


@dataclass(frozen=True)
class BackendId:
    kind: str
    base: int

    def __post_init__(self):
        if self.kind not in (ODOMETER, FULL_SHIFT):
            raise MalformedInput(f"unknown groupoid kind {self.kind!r}")
        if self.base < 2:
            raise MalformedInput(f"base must be >= 2, got {self.base}")

    @property
    def is_odometer(self) -> bool:
        return self.kind == ODOMETER

    @property
    def measure_class(self) -> str:
        return UNIQUE_ERGODIC if self.is_odometer else NO_INVARIANT_MEASURE

    @property
    def tag(self) -> str:
        return ("odo" if self.is_odometer else "shift") + str(self.base)

    def __str__(self):
        return self.tag


def odometer(base: int) -> BackendId:
    return BackendId(ODOMETER, base)


def full_shift(base: int) -> BackendId:
    return BackendId(FULL_SHIFT, base)


@dataclass(frozen=True)
class OdometerPiece:
    """Restriction of "add n in base b" to the source cylinder."""

    source: Word
    power: int

    def is_identity(self) -> bool:
        return self.power == 0


@dataclass(frozen=True)
class ShiftPiece:
    """Prefix rewrite source.y -> target.y (lengths may differ)."""

    source: Word
    target: Word

    def is_identity(self) -> bool:
        return self.source == self.target


Piece = Union[OdometerPiece, ShiftPiece]


def word_value(word: Word, base: int) -> int:
    """Base-b integer value, least-significant digit first."""
    value = 0
    for d in reversed(word):
        value = value * base + d
    return value


def value_word(value: int, depth: int, base: int) -> Word:
    out = []
    for _ in range(depth):
        value, digit = divmod(value, base)
        out.append(digit)
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _odometer_range_word(source: Word, power: int, base: int) -> Word:
    d = len(source)
    return value_word((word_value(source, base) + power) % base ** d, d, base)


def piece_range_word(piece: Piece, base: int) -> Word:
    if isinstance(piece, OdometerPiece):
        return _odometer_range_word(piece.source, piece.power, base)
    return piece.target


def piece_carry(piece: OdometerPiece, base: int) -> int:
    """Integer carried into the tail beyond the source depth (may be < 0)."""
    d = len(piece.source)
    return (word_value(piece.source, base) + piece.power) // base ** d


def apply_piece(piece: Piece, cyl: Cylinder) -> Cylinder:
    """Exact image of a cylinder contained in the piece's source."""
    base = cyl.base
    if not is_prefix(piece.source, cyl.word):
        raise PreconditionError(
            f"cylinder {cyl.word} not contained in piece source {piece.source}")
    if isinstance(piece, OdometerPiece):
        d = len(cyl.word)
        return Cylinder(base, value_word(
            (word_value(cyl.word, base) + piece.power) % base ** d, d, base))
    return Cylinder(base, piece.target + cyl.word[len(piece.source):])


def split_piece(piece: Piece, base: int) -> list[Piece]:
    """The b sub-pieces on the children of the source; same partial map."""
    if isinstance(piece, OdometerPiece):
        return [OdometerPiece(piece.source + (a,), piece.power) for a in range(base)]
    return [ShiftPiece(piece.source + (a,), piece.target + (a,)) for a in range(base)]


def refine_piece_to(piece: Piece, depth: int, base: int) -> list[Piece]:
    """Sub-pieces with sources of exactly max(depth, current) digits."""
    d = len(piece.source)
    if depth <= d:
        return [piece]
    tails = itertools.product(range(base), repeat=depth - d)
    if isinstance(piece, OdometerPiece):
        return [OdometerPiece(piece.source + t, piece.power) for t in tails]
    return [ShiftPiece(piece.source + t, piece.target + t) for t in tails]


@dataclass(frozen=True)
class Bisection:
    """A compact open bisection given by finitely many pieces."""

    backend: BackendId
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        want = OdometerPiece if self.backend.is_odometer else ShiftPiece
        for p in self.pieces:
            if not isinstance(p, want):
                raise MalformedInput(
                    f"piece {p!r} does not belong to backend {self.backend.tag}")

    @property
    def base(self) -> int:
        return self.backend.base

    def source_words(self) -> tuple[Word, ...]:
        return tuple(p.source for p in self.pieces)

    def range_words(self) -> tuple[Word, ...]:
        return tuple(piece_range_word(p, self.base) for p in self.pieces)


@dataclass(frozen=True)
class Violation:
    which: str           # "source" | "range"
    first: Word
    second: Word

    def __str__(self):
        return f"{self.which} cylinders overlap: {self.first} vs {self.second}"


def _overlapping_pair(words: Iterable[Word]) -> tuple[Word, Word] | None:
    ordered = sorted(words)
    for a, b in zip(ordered, ordered[1:]):
        if is_prefix(a, b):
            return (a, b)
    return None


def validate_bisection(bis: Bisection) -> Violation | None:
    """None if sources and ranges are both pairwise disjoint, else the
    first offending pair."""
    pair = _overlapping_pair(bis.source_words())
    if pair is not None:
        return Violation("source", *pair)
    pair = _overlapping_pair(bis.range_words())
    if pair is not None:
        return Violation("range", *pair)
    return None


def check_bisection(bis: Bisection) -> Bisection:
    violation = validate_bisection(bis)
    if violation is not None:
        raise MalformedInput(f"invalid bisection: {violation}")
    return bis


def source_range(bis: Bisection) -> tuple[ClopenSet, ClopenSet]:
    return (ClopenSet.from_words(bis.base, bis.source_words()),
            ClopenSet.from_words(bis.base, bis.range_words()))


def refine_bisection(bis: Bisection, depth: int) -> Bisection:
    pieces: list[Piece] = []
    for p in bis.pieces:
        pieces.extend(refine_piece_to(p, depth, bis.base))
    return Bisection(bis.backend, tuple(pieces))


def _suffix_length(count: int, base: int) -> int:
    """Length of the disjointness suffixes for shift comparison witnesses."""
    width = 1
    while base ** width < count:
        width += 1
    return width


def compare_clopen(backend: BackendId, A: ClopenSet, B: ClopenSet) -> Bisection:
    """A bisection U with source exactly A and range inside B.

    Odometer: requires the exact measure inequality mu(A) < mu(B); both
    sets are refined to a common depth and cylinders are matched
    injectively in lexicographic order by carry-free translation pieces.

    Full shift: unconditional (no invariant measure); every source
    cylinder is rewritten into the picked cylinder of B with a distinct
    fixed-length suffix, assigned in counting order.
    """
    if A.base != backend.base or B.base != backend.base:
        raise MalformedInput("clopen sets do not match the backend base")
    if B.is_empty():
        raise PreconditionError("comparison target must be nonempty")
    if A.is_empty():
        return Bisection(backend, ())
    if backend.is_odometer:
        if not A.measure() < B.measure():
            raise PreconditionError(
                f"comparison unavailable: mu(A)={A.measure()} is not below mu(B)={B.measure()}")
        depth = max(A.max_depth(), B.max_depth())
        src = A.refine_to(depth)
        dst = B.refine_to(depth)
        pieces = tuple(
            OdometerPiece(u, word_value(v, backend.base) - word_value(u, backend.base))
            for u, v in zip(src, dst))
        return check_bisection(Bisection(backend, pieces))
    v = B.pick().word
    sources = sorted(A.words)
    width = _suffix_length(len(sources), backend.base)
    pieces = tuple(
        ShiftPiece(u, v + value_word(i, width, backend.base)[::-1])
        for i, u in enumerate(sources))
    return check_bisection(Bisection(backend, pieces))
