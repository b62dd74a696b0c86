"""Seeded random generation of clopen sets, admissible pairs and
elements for the property suites.

All generators take an explicit random.Random; suites derive their
generators from a run seed by labelled hashing so that counterexamples
are reproducible and reports byte-identical.
"""

from __future__ import annotations

import hashlib
import random

from .backends import BackendId, OdometerPiece, ShiftPiece
from .clopen import ClopenSet, Word
from .elements import GroupElement, compose, element_from_pieces, identity
from .transfers import exact_swap_involution


def substream(seed: int, label: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def random_word(rng: random.Random, base: int, max_len: int, min_len: int = 0) -> Word:
    return tuple(rng.randrange(base) for _ in range(rng.randint(min_len, max_len)))


def random_clopen(rng: random.Random, base: int, max_depth: int, *,
                  nonempty: bool = False, proper: bool = False) -> ClopenSet:
    """A clopen set from a handful of random cylinder words."""
    while True:
        count = rng.randint(0 if not nonempty else 1, 4)
        words = [random_word(rng, base, max_depth, 1) for _ in range(count)]
        A = ClopenSet.from_words(base, words)
        if nonempty and A.is_empty():
            continue
        if proper and A.is_whole():
            continue
        return A


def random_partition_pick(rng: random.Random, base: int, depth: int,
                          count: int, avoid: frozenset[Word] = frozenset()) -> list[Word]:
    pool = [w for w in ClopenSet.whole(base).refine_to(depth) if w not in avoid]
    return rng.sample(pool, count)


def equal_measure_pair(rng: random.Random, base: int, max_depth: int, *,
                       disjoint: bool = False,
                       region: ClopenSet | None = None) -> tuple[ClopenSet, ClopenSet]:
    """Two distinct equal-measure clopen sets (equal cylinder counts at a
    common depth), optionally disjoint and/or inside a given region."""
    lo = 2 if region is None else max(2, region.max_depth())
    while True:
        depth = rng.randint(lo, max(lo, max_depth))
        if region is None:
            pool = list(ClopenSet.whole(base).refine_to(depth))
        else:
            pool = list(region.refine_to(depth))
        if len(pool) < 2:
            continue
        k = rng.randint(1, max(1, min(3, len(pool) // 2)))
        if disjoint:
            if 2 * k > len(pool):
                continue
            both = rng.sample(pool, 2 * k)
            aw, bw = both[:k], both[k:]
        else:
            aw = rng.sample(pool, k)
            bw = rng.sample(pool, k)
        A = ClopenSet.from_words(base, aw)
        B = ClopenSet.from_words(base, bw)
        if set(aw) == set(bw):
            continue
        if (A - B).is_empty() or (B - A).is_empty():
            continue
        return A, B


def swap_equivalent_pair(rng: random.Random, backend: BackendId,
                         max_depth: int, *,
                         region: ClopenSet | None = None) -> tuple[ClopenSet, ClopenSet]:
    """An admissible input pair for exact_swap_involution: equal measures
    on the odometer, congruent cylinder counts mod base-1 on the shift."""
    base = backend.base
    if backend.is_odometer:
        return equal_measure_pair(rng, base, max_depth, region=region)
    while True:
        A = random_clopen(rng, base, max_depth, nonempty=True, proper=True)
        B = random_clopen(rng, base, max_depth, nonempty=True, proper=True)
        if region is not None:
            A, B = A & region, B & region
        A1, B1 = A - B, B - A
        if A1.is_empty() or B1.is_empty():
            continue
        if (len(A1.words) - len(B1.words)) % (base - 1) != 0:
            continue
        return A, B


def comparison_pair(rng: random.Random, backend: BackendId, max_depth: int,
                    factor: int = 1) -> tuple[ClopenSet, ClopenSet]:
    """A pair admissible for comparison/transfer: B nonempty, A proper,
    and factor * mu(A) < mu(B) on the odometer."""
    base = backend.base
    while True:
        A = random_clopen(rng, base, max_depth, proper=True)
        B = random_clopen(rng, base, max_depth, nonempty=True)
        if backend.is_odometer:
            if not factor * A.volume() < B.volume():
                continue
        return A, B


def rotation_element(backend: BackendId, rng: random.Random) -> GroupElement:
    """A full-support sample element: a power of the adding machine on
    the odometer, a cyclic top-level relabelling on the shift."""
    base = backend.base
    if backend.is_odometer:
        return element_from_pieces(
            backend, [OdometerPiece((), rng.randint(1, base))], fill_identity=False)
    shift = rng.randint(1, base - 1)
    return element_from_pieces(
        backend, [ShiftPiece((a,), (((a + shift) % base),)) for a in range(base)],
        fill_identity=False)


def random_element(rng: random.Random, backend: BackendId, max_depth: int, *,
                   nontrivial: bool = False,
                   proper_support: bool = False,
                   moves: int | None = None) -> GroupElement:
    """A random element: a product of exact swap involutions, optionally
    mixed with a full-support rotation.

    With proper_support, all swaps happen inside the complement of a
    reserved cylinder, so the support is never the whole space.
    """
    base = backend.base
    region = None
    if proper_support:
        reserve = random_word(rng, base, 2, 1)
        region = ClopenSet.from_words(base, [reserve]).complement()
        if region.is_empty():
            region = ClopenSet.from_words(base, [(0,)]).complement()
    while True:
        result = identity(backend)
        for _ in range(moves if moves is not None else rng.randint(1, 3)):
            A, B = swap_equivalent_pair(rng, backend, max_depth, region=region)
            result = compose(result, exact_swap_involution(backend, A, B))
        if not proper_support and rng.random() < 0.35:
            result = compose(result, rotation_element(backend, rng))
        if nontrivial and result.is_identity():
            continue
        return result
