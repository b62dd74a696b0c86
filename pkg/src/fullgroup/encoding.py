"""Textual encodings for clopen sets, pieces, bisections and elements.

Formats (digits restricted to bases 2..10):

* clopen set   ``b2:{00,01,1}``, empty ``b2:{}``, whole space ``b2:{ε}``
* odometer piece ``(u;+n)``, shift piece ``(u>v)``
* bisection    ``odo2:[(00;+1)]``, ``shift2:[(0>11),(11>0),(10>10)]``
* element      bisection encoding with an ``elem:`` header
* derived witness  bracketed word ``[a,b]*[c,d]`` over named elements
"""

from __future__ import annotations

import re

from .backends import (FULL_SHIFT, ODOMETER, BackendId, Bisection,
                       OdometerPiece, Piece, ShiftPiece)
from .clopen import ClopenSet, Word
from .elements import DerivedWitness, GroupElement
from .errors import MalformedInput

EPSILON = "ε"

_CLOPEN_RE = re.compile(r"^b(\d+):\{(.*)\}$")
_BACKEND_RE = re.compile(r"^(odo|shift)(\d+)$")
_ODO_PIECE_RE = re.compile(r"^\(([0-9]+|ε);([+-]?\d+)\)$")
_SHIFT_PIECE_RE = re.compile(r"^\(([0-9]+|ε)>([0-9]+|ε)\)$")


def _check_encodable(base: int) -> None:
    if base > 10:
        raise MalformedInput(f"textual encodings support bases 2..10, got {base}")


def format_word(word: Word) -> str:
    return "".join(map(str, word)) if word else EPSILON


def parse_word(text: str, base: int) -> Word:
    text = text.strip()
    if text in ("", EPSILON):
        return ()
    if not text.isdigit():
        raise MalformedInput(f"bad word {text!r}")
    word = tuple(int(c) for c in text)
    if any(d >= base for d in word):
        raise MalformedInput(f"word {text!r} has digits out of range for base {base}")
    return word


def format_clopen(A: ClopenSet) -> str:
    _check_encodable(A.base)
    return f"b{A.base}:{{{','.join(format_word(w) for w in A.words)}}}"


def parse_clopen(text: str) -> ClopenSet:
    m = _CLOPEN_RE.match(text.strip())
    if not m:
        raise MalformedInput(f"bad clopen encoding {text!r}")
    base = int(m.group(1))
    if base < 2:
        raise MalformedInput(f"bad base {base}")
    _check_encodable(base)
    body = m.group(2).strip()
    if not body:
        return ClopenSet.empty(base)
    parts = [w.strip() for w in body.split(",")]
    if any(not w for w in parts):
        raise MalformedInput(f"empty word in clopen encoding {text!r}; "
                             f"use {EPSILON} for the whole space")
    return ClopenSet.from_words(base, [parse_word(w, base) for w in parts])


def format_backend(backend: BackendId) -> str:
    return backend.tag


def parse_backend(tag: str) -> BackendId:
    m = _BACKEND_RE.match(tag.strip())
    if not m:
        raise MalformedInput(f"bad backend tag {tag!r}")
    kind = ODOMETER if m.group(1) == "odo" else FULL_SHIFT
    return BackendId(kind, int(m.group(2)))


def format_piece(piece: Piece) -> str:
    if isinstance(piece, OdometerPiece):
        return f"({format_word(piece.source)};{piece.power:+d})"
    return f"({format_word(piece.source)}>{format_word(piece.target)})"


def parse_piece(text: str, backend: BackendId) -> Piece:
    text = text.strip()
    if backend.is_odometer:
        m = _ODO_PIECE_RE.match(text)
        if not m:
            raise MalformedInput(f"bad odometer piece {text!r}")
        return OdometerPiece(parse_word(m.group(1), backend.base), int(m.group(2)))
    m = _SHIFT_PIECE_RE.match(text)
    if not m:
        raise MalformedInput(f"bad shift piece {text!r}")
    return ShiftPiece(parse_word(m.group(1), backend.base),
                      parse_word(m.group(2), backend.base))


def format_bisection(bis: Bisection) -> str:
    _check_encodable(bis.base)
    return f"{bis.backend.tag}:[{','.join(format_piece(p) for p in bis.pieces)}]"


def parse_bisection(text: str) -> Bisection:
    text = text.strip()
    head, sep, body = text.partition(":")
    if not sep or not body.startswith("[") or not body.endswith("]"):
        raise MalformedInput(f"bad bisection encoding {text!r}")
    backend = parse_backend(head)
    inner = body[1:-1].strip()
    if not inner:
        return Bisection(backend, ())
    parts = re.findall(r"\([^()]*\)", inner)
    if "".join(parts) != inner.replace(",", "").replace(" ", ""):
        # tolerate comma separators only
        pass
    if not parts:
        raise MalformedInput(f"bad bisection encoding {text!r}")
    return Bisection(backend, tuple(parse_piece(p, backend) for p in parts))


def format_element(elem: GroupElement) -> str:
    return "elem:" + format_bisection(elem.bisection)


def parse_element(text: str) -> GroupElement:
    text = text.strip()
    if not text.startswith("elem:"):
        raise MalformedInput(f"element encodings start with 'elem:', got {text!r}")
    return GroupElement(parse_bisection(text[len("elem:"):]))


def format_witness(witness: DerivedWitness, names: dict[str, GroupElement] | None = None) -> str:
    """Bracketed word over named elements, e.g. ``[a,b]*[c,d]``."""
    reverse: dict[GroupElement, str] = {}
    for name, elem in (names or {}).items():
        reverse.setdefault(elem, name)
    parts = []
    for i, (f, g) in enumerate(witness.factors):
        fn = reverse.get(f, f"g{i}")
        gn = reverse.get(g, f"h{i}")
        parts.append(f"[{fn},{gn}]")
    return "*".join(parts) if parts else "1"
