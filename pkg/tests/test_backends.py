"""Backend pieces, bisections, refinement and the comparison primitive."""

import pytest

from fullgroup.backends import (BackendId, Bisection, OdometerPiece,
                                ShiftPiece, apply_piece, compare_clopen,
                                full_shift, odometer, refine_bisection,
                                source_range, validate_bisection)
from fullgroup.clopen import ClopenSet, Cylinder
from fullgroup.errors import MalformedInput, PreconditionError
from fullgroup.randomize import comparison_pair, substream


def cs(base, *words):
    return ClopenSet.from_words(base, words)


class TestBackendId:
    def test_measure_classes(self):
        assert odometer(2).measure_class == "unique-ergodic"
        assert full_shift(2).measure_class == "empty"

    def test_tags(self):
        assert odometer(2).tag == "odo2"
        assert full_shift(3).tag == "shift3"

    def test_bad_kind(self):
        with pytest.raises(MalformedInput):
            BackendId("interval-exchange", 2)


class TestApplyPiece:
    def test_odometer_no_carry(self):
        # two-digit value 0 plus 3 stays below 4
        got = apply_piece(OdometerPiece((0, 0), 3), Cylinder(2, (0, 0)))
        assert got.word == (1, 1)

    def test_odometer_with_carry(self):
        # value 3 plus 1 is 4 = 0 mod 4 with carry 1
        got = apply_piece(OdometerPiece((1, 1), 1), Cylinder(2, (1, 1)))
        assert got.word == (0, 0)

    def test_shift_suffix(self):
        got = apply_piece(ShiftPiece((0,), (1, 1, 0)), Cylinder(2, (0, 1)))
        assert got.word == (1, 1, 0, 1)

    def test_requires_containment(self):
        with pytest.raises(PreconditionError):
            apply_piece(OdometerPiece((0, 0), 1), Cylinder(2, (1,)))


class TestValidate:
    def test_ok_shift(self):
        bis = Bisection(full_shift(2), (
            ShiftPiece((0,), (1, 1)), ShiftPiece((1, 1), (0,)), ShiftPiece((1, 0), (1, 0))))
        assert validate_bisection(bis) is None

    def test_range_violation(self):
        bis = Bisection(full_shift(2), (
            ShiftPiece((0,), (1,)), ShiftPiece((1, 0), (1, 1))))
        violation = validate_bisection(bis)
        assert violation is not None and violation.which == "range"
        assert (violation.first, violation.second) == ((1,), (1, 1))

    def test_odometer_involution(self):
        bis = Bisection(odometer(2), (OdometerPiece((0,), 1), OdometerPiece((1,), -1)))
        assert validate_bisection(bis) is None
        _, rng = source_range(bis)
        assert rng.is_whole()

    def test_wrong_piece_kind(self):
        with pytest.raises(MalformedInput):
            Bisection(odometer(2), (ShiftPiece((0,), (1,)),))


class TestSourceRange:
    def test_empty(self):
        src, rng = source_range(Bisection(odometer(2), ()))
        assert src.is_empty() and rng.is_empty()

    def test_translation(self):
        src, rng = source_range(Bisection(odometer(2), (OdometerPiece((0, 0), 1),)))
        assert src == cs(2, (0, 0))
        assert rng == cs(2, (1, 0))

    def test_whole(self):
        bis = Bisection(full_shift(2), (
            ShiftPiece((0,), (1, 1)), ShiftPiece((1, 1), (0,)), ShiftPiece((1, 0), (1, 0))))
        src, rng = source_range(bis)
        assert src.is_whole() and rng.is_whole()


class TestRefine:
    def test_odometer_refine(self):
        bis = Bisection(odometer(2), (OdometerPiece((), 1),))
        got = refine_bisection(bis, 1)
        assert got.pieces == (OdometerPiece((0,), 1), OdometerPiece((1,), 1))

    def test_shift_refine(self):
        bis = Bisection(full_shift(2), (ShiftPiece((0,), (1,)),))
        got = refine_bisection(bis, 2)
        assert got.pieces == (ShiftPiece((0, 0), (1, 0)), ShiftPiece((0, 1), (1, 1)))

    def test_refine_is_idempotent_at_depth(self):
        bis = Bisection(odometer(2), (OdometerPiece((0, 1), 2), OdometerPiece((1, 1), 0)))
        assert refine_bisection(bis, 2) == bis

    def test_refine_preserves_map(self):
        bis = Bisection(odometer(2), (OdometerPiece((0,), 3),))
        fine = refine_bisection(bis, 3)
        for piece in fine.pieces:
            cyl = Cylinder(2, piece.source)
            assert apply_piece(piece, cyl) == apply_piece(bis.pieces[0], cyl)


class TestCompare:
    def test_odometer_example(self):
        U = compare_clopen(odometer(2), cs(2, (0, 0)), cs(2, (1,)))
        assert U.pieces == (OdometerPiece((0, 0), 1),)
        src, rng = source_range(U)
        assert src == cs(2, (0, 0))
        assert rng == cs(2, (1, 0))

    def test_empty_source(self):
        U = compare_clopen(odometer(2), ClopenSet.empty(2), cs(2, (1,)))
        assert U.pieces == ()

    def test_shift_example(self):
        U = compare_clopen(full_shift(2), cs(2, (0,)), cs(2, (1, 1)))
        assert U.pieces == (ShiftPiece((0,), (1, 1, 0)),)
        src, rng = source_range(U)
        assert src == cs(2, (0,))
        assert rng.is_subset(cs(2, (1, 1)))

    def test_odometer_measure_precondition(self):
        with pytest.raises(PreconditionError):
            compare_clopen(odometer(2), cs(2, (0,)), cs(2, (1, 0)))

    def test_empty_target(self):
        with pytest.raises(PreconditionError):
            compare_clopen(full_shift(2), cs(2, (0,)), ClopenSet.empty(2))

    @pytest.mark.parametrize("kind", ["odometer", "shift"])
    @pytest.mark.parametrize("base", [2, 3])
    def test_randomized_postconditions(self, kind, base):
        backend = odometer(base) if kind == "odometer" else full_shift(base)
        rng = substream(101, f"cmp:{backend.tag}")
        for _ in range(60):
            A, B = comparison_pair(rng, backend, 5)
            U = compare_clopen(backend, A, B)
            assert validate_bisection(U) is None
            src, dst = source_range(U)
            assert src == A
            assert dst.is_subset(B)
            if backend.is_odometer:
                # same-depth pieces preserve the measure cylinder-wise
                for piece in U.pieces:
                    assert len(piece.source) == len(
                        apply_piece(piece, Cylinder(base, piece.source)).word)


class TestFreeness:
    def test_odometer_piece_moves_all(self):
        # a nonzero power never fixes a base-b integer
        from fullgroup.elements import apply_point, element_from_pieces
        from fullgroup.clopen import PointName
        elem = element_from_pieces(odometer(2), [OdometerPiece((), 1)],
                                   fill_identity=False)
        for pre in ((0,), (1,), (0, 1), (1, 1)):
            p = PointName.zeros_tail(2, pre)
            assert apply_point(elem, p) != p
        assert apply_point(elem, PointName(2, (), (1,))) == PointName(2, (), (0,))

    def test_shift_piece_single_fixed_point(self):
        # (u > u t) fixes exactly the point u t t t ...
        from fullgroup.clopen import PointName
        piece = ShiftPiece((0,), (0, 1))
        fixed = PointName(2, (0,), (1,))
        image = Cylinder(2, fixed.prefix(6))
        assert apply_piece(piece, Cylinder(2, fixed.prefix(5))).word == fixed.prefix(6)
