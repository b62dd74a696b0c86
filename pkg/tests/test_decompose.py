"""Small-support decomposition and the proper-support splitting."""

from fractions import Fraction
from functools import reduce

import pytest

from fullgroup.backends import OdometerPiece, ShiftPiece, full_shift, odometer
from fullgroup.clopen import ClopenSet
from fullgroup.decompose import (decompose_small_support, separated_cylinder,
                                 split_nontrivial_support)
from fullgroup.elements import (compose, element_from_pieces, equals,
                                identity, image_of_clopen, inverse, support)
from fullgroup.encoding import parse_clopen
from fullgroup.errors import PreconditionError
from fullgroup.randomize import random_element, substream


def cs(base, *words):
    return ClopenSet.from_words(base, words)


def full_flip(base=2):
    return element_from_pieces(
        full_shift(base), [ShiftPiece((0,), (1,)), ShiftPiece((1,), (0,))],
        fill_identity=True)


def odo_flip():
    return element_from_pieces(
        odometer(2), [OdometerPiece((0,), 1), OdometerPiece((1,), -1)],
        fill_identity=True)


ALL_BACKENDS = [odometer(2), full_shift(2), odometer(3), full_shift(3)]


class TestSeparatedCylinder:
    def test_odometer_flip(self):
        A = separated_cylinder(odo_flip())
        image = image_of_clopen(odo_flip(), A)
        assert A.intersect(image).is_empty()
        assert not (A | image).is_whole()

    def test_identity_rejected(self):
        with pytest.raises(PreconditionError):
            separated_cylinder(identity(odometer(2)))

    def test_volume_bound(self):
        A = separated_cylinder(odo_flip(), volume_bound=Fraction(1, 16))
        assert A.volume() < Fraction(1, 16)

    def test_nested_shift_piece(self):
        # source a prefix of target: the single fixed point must be avoided
        e = element_from_pieces(full_shift(2), [
            ShiftPiece((0,), (0, 0)), ShiftPiece((1, 0), (0, 1)),
            ShiftPiece((1, 1), (1,))], fill_identity=False)
        A = separated_cylinder(e)
        assert A.intersect(image_of_clopen(e, A)).is_empty()


class TestDecompose:
    def test_identity_empty(self):
        res = decompose_small_support(identity(odometer(2)), Fraction(1, 4))
        assert res.factors == () and res.bounds == ()

    def test_odometer_flip_three_eighths(self):
        alpha = odo_flip()
        res = decompose_small_support(alpha, Fraction(3, 8))
        prod = reduce(compose, res.factors, identity(odometer(2)))
        assert equals(prod, alpha)
        assert all(b.volume() < Fraction(3, 8) for b in res.bounds)
        assert all(b.is_proper() for b in res.bounds)
        assert all(support(f).is_subset(b)
                   for f, b in zip(res.factors, res.bounds))

    def test_shift_two_factors(self):
        alpha = full_flip()
        res = decompose_small_support(alpha)
        assert len(res.factors) == 2
        prod = reduce(compose, res.factors, identity(full_shift(2)))
        assert equals(prod, alpha)
        assert all(b.is_proper() for b in res.bounds)

    def test_epsilon_required_on_odometer(self):
        with pytest.raises(PreconditionError):
            decompose_small_support(odo_flip(), None)
        with pytest.raises(PreconditionError):
            decompose_small_support(odo_flip(), Fraction(0))

    def test_measure_value_epsilon_accepted(self):
        from fullgroup.measure import MeasureValue
        res = decompose_small_support(odo_flip(), MeasureValue(2, 1, 2))
        assert res.epsilon == Fraction(1, 4)

    def test_residual_telescoping(self):
        # replay the peeling loop: after each factor the residual must be
        # the identity on everything peeled so far
        alpha = random_element(substream(31, "tele"), odometer(2), 4,
                               nontrivial=True)
        res = decompose_small_support(alpha, Fraction(1, 4))
        residual = alpha
        cleared = ClopenSet.empty(2)
        for factor, bound in zip(res.factors, res.bounds):
            residual = compose(inverse(factor), residual)
            cleared = cleared | (bound - image_of_clopen(residual, bound))
        assert residual.is_identity()

    @pytest.mark.parametrize("backend", ALL_BACKENDS, ids=lambda b: b.tag)
    def test_randomized_reconstruction(self, backend):
        rng = substream(32, f"dec:{backend.tag}")
        for i in range(30):
            alpha = random_element(rng, backend, 4, nontrivial=True)
            eps = [Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)][i % 3]
            res = decompose_small_support(alpha, eps)
            prod = reduce(compose, res.factors, identity(backend))
            assert equals(prod, alpha)
            assert all(b.is_proper() for b in res.bounds)
            assert all(support(f).is_subset(b)
                       for f, b in zip(res.factors, res.bounds))
            if backend.is_odometer:
                assert all(b.volume() < eps for b in res.bounds)


class TestSplit:
    def test_full_flip(self):
        tau = full_flip()
        res = split_nontrivial_support(tau)
        assert equals(compose(res.tau1, res.tau2), tau)
        assert not support(res.tau1).is_whole()
        assert not support(res.tau2).is_whole()

    def test_certificate_evaluates_to_tau1(self):
        res = split_nontrivial_support(full_flip())
        assert equals(res.certificate.evaluate(res.environment), res.tau1)
        assert len(res.certificate.factors) == 2
        signs = [f.sign for f in res.certificate.factors]
        assert signs == [1, -1]

    def test_support_omits_shrunk_annulus(self):
        # supp(tau1) misses A \ A0 from the construction trace
        for backend in ALL_BACKENDS:
            rng = substream(33, f"splitA:{backend.tag}")
            tau = random_element(rng, backend, 3, nontrivial=True)
            res = split_nontrivial_support(tau)
            A = parse_clopen(res.trace["separating"])
            A0 = parse_clopen(res.trace["shrunk"])
            assert support(res.tau1).intersect(A - A0).is_empty()

    def test_identity_rejected(self):
        with pytest.raises(PreconditionError):
            split_nontrivial_support(identity(full_shift(2)))

    @pytest.mark.parametrize("backend", ALL_BACKENDS, ids=lambda b: b.tag)
    def test_randomized(self, backend):
        rng = substream(34, f"split:{backend.tag}")
        for _ in range(15):
            tau = random_element(rng, backend, 4, nontrivial=True)
            res = split_nontrivial_support(tau)
            assert equals(compose(res.tau1, res.tau2), tau)
            assert not support(res.tau1).is_whole()
            assert not support(res.tau2).is_whole()
            assert equals(res.certificate.evaluate(res.environment), res.tau1)
