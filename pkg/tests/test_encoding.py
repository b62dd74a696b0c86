"""Textual encodings: round-trips and malformed-input rejection."""

import pytest

from fullgroup.backends import (Bisection, OdometerPiece, ShiftPiece,
                                full_shift, odometer)
from fullgroup.clopen import ClopenSet
from fullgroup.elements import DerivedWitness, element_from_pieces, identity
from fullgroup.encoding import (format_bisection, format_clopen,
                                format_element, format_witness, parse_backend,
                                parse_bisection, parse_clopen, parse_element,
                                parse_word)
from fullgroup.errors import MalformedInput


class TestClopenCodec:
    @pytest.mark.parametrize("text", ["b2:{00,01,1}", "b2:{}", "b2:{ε}",
                                      "b3:{012,2}"])
    def test_roundtrip(self, text):
        A = parse_clopen(text)
        assert parse_clopen(format_clopen(A)) == A

    def test_canonical_output(self):
        assert format_clopen(parse_clopen("b2:{00,01,1}")) == "b2:{ε}"

    def test_examples(self):
        assert parse_clopen("b2:{10}") == ClopenSet.from_words(2, [(1, 0)])
        assert parse_clopen("b2:{}").is_empty()
        assert parse_clopen("b2:{ε}").is_whole()

    @pytest.mark.parametrize("bad", ["b2:{2}", "x2:{0}", "b1:{0}", "b2:(0)",
                                     "b2:{0,}", "{0}"])
    def test_malformed(self, bad):
        with pytest.raises(MalformedInput):
            parse_clopen(bad)

    def test_word_epsilon(self):
        assert parse_word("ε", 2) == ()
        assert parse_word("011", 2) == (0, 1, 1)


class TestBackendCodec:
    def test_roundtrip(self):
        for backend in (odometer(2), full_shift(3)):
            assert parse_backend(backend.tag) == backend

    @pytest.mark.parametrize("bad", ["odo", "shift", "odo1", "torus2", "2odo"])
    def test_malformed(self, bad):
        with pytest.raises(MalformedInput):
            parse_backend(bad)


class TestBisectionCodec:
    def test_odometer_example(self):
        bis = Bisection(odometer(2), (OdometerPiece((0, 0), 1),))
        assert format_bisection(bis) == "odo2:[(00;+1)]"
        assert parse_bisection("odo2:[(00;+1)]") == bis

    def test_shift_example(self):
        text = "shift2:[(0>11),(11>0),(10>10)]"
        bis = parse_bisection(text)
        assert bis.pieces == (ShiftPiece((0,), (1, 1)), ShiftPiece((1, 1), (0,)),
                              ShiftPiece((1, 0), (1, 0)))
        assert format_bisection(bis) == text

    def test_negative_power(self):
        bis = parse_bisection("odo2:[(1;-1)]")
        assert bis.pieces == (OdometerPiece((1,), -1),)

    def test_epsilon_source(self):
        bis = parse_bisection("odo2:[(ε;+1)]")
        assert bis.pieces == (OdometerPiece((), 1),)

    def test_empty(self):
        assert parse_bisection("shift3:[]").pieces == ()

    @pytest.mark.parametrize("bad", ["odo2:[(0>1)]", "shift2:[(0;+1)]",
                                     "odo2:(0;+1)", "odo2:[(2;+1)]"])
    def test_malformed(self, bad):
        with pytest.raises(MalformedInput):
            parse_bisection(bad)


class TestElementCodec:
    def test_roundtrip(self):
        elem = element_from_pieces(
            odometer(2), [OdometerPiece((0,), 1), OdometerPiece((1,), -1)],
            fill_identity=False)
        assert parse_element(format_element(elem)) == elem

    def test_header_required(self):
        with pytest.raises(MalformedInput):
            parse_element("odo2:[(ε;+0)]")

    def test_non_element_bisection_rejected(self):
        with pytest.raises(MalformedInput):
            parse_element("elem:odo2:[(00;+1)]")


class TestWitnessCodec:
    def test_named(self):
        backend = odometer(2)
        e = identity(backend)
        w = DerivedWitness(((e, e),))
        assert format_witness(w, {"a": e}) == "[a,a]"

    def test_positional(self):
        backend = odometer(2)
        e = identity(backend)
        f = element_from_pieces(backend, [OdometerPiece((), 1)],
                                fill_identity=False)
        w = DerivedWitness(((e, f), (f, e)))
        assert format_witness(w) == "[g0,h0]*[g1,h1]"

    def test_empty(self):
        assert format_witness(DerivedWitness(())) == "1"
