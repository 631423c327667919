"""PaN assertions and the Linear, Quartic, Weak and Strict completions."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fmd.completions import (
    CompletionKind,
    PaNAssertion,
    build_predictive,
    completion_value,
    completion_values,
    parse_assertion,
    quartic_coefficients,
)
from fmd.errors import InvalidAssertionError, NonMonotoneCompletionError

PA8 = PaNAssertion(8, 2, 5, 0.1, 0.7)
APIARY = PaNAssertion(100, 25, 60, 0.1, 0.7)
KINDS = list(CompletionKind)


@st.composite
def assertions(draw, max_n=400):
    N = draw(st.integers(2, max_n))
    a1 = draw(st.integers(1, N - 1))
    a2 = draw(st.integers(a1, N - 1))
    pL = draw(st.floats(1e-4, 1.0)) * a1 / N
    pU = a2 / N + draw(st.floats(0.0, 0.999)) * (1 - a2 / N)
    assume(pL > 0 and pU < 1)
    return PaNAssertion(N, a1, a2, pL, pU)


class TestAssertion:
    def test_fields_and_str(self):
        assert APIARY.x1 == 0.25 and APIARY.x2 == 0.6
        assert str(APIARY) == "Pa100[25,60,0.1,0.7]"

    def test_parse_roundtrip(self):
        assert parse_assertion("Pa100[25,60,.1,.7]") == APIARY
        assert parse_assertion(str(APIARY)) == APIARY
        assert parse_assertion(" pa8[2, 5, 0.1, 0.7] ") == PA8

    @pytest.mark.parametrize("text", ["Pa100[25,60,.1]", "P100[1,2,.1,.9]", "Pa100[25,60,x,.7]"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidAssertionError):
            parse_assertion(text)

    @pytest.mark.parametrize(
        "args",
        [
            (100, 0, 60, 0.1, 0.7),  # a1 = 0 would force pL = 0
            (100, 25, 100, 0.1, 0.7),  # a2 = N would force pU = 1
            (100, 60, 25, 0.1, 0.7),  # a1 > a2
            (100, 25, 60, 0.3, 0.7),  # pL above a1/N
            (100, 25, 60, 0.1, 0.5),  # pU below a2/N
            (100, 25, 60, 0.0, 0.7),
            (100, 25, 60, 0.1, 1.0),
            (1, 1, 1, 0.5, 0.9),
        ],
    )
    def test_invariants(self, args):
        with pytest.raises(InvalidAssertionError):
            PaNAssertion(*args)

    def test_kind_parse(self):
        assert CompletionKind.parse("Strict") is CompletionKind.STRICT
        assert CompletionKind.parse("q") is CompletionKind.QUARTIC
        with pytest.raises(InvalidAssertionError):
            CompletionKind.parse("cubic")


class TestCompletionValues:
    def test_strict(self):
        assert completion_value(PA8, "strict", 0) == 0.25
        assert completion_value(PA8, "strict", 7) == 0.625

    def test_weak(self):
        assert completion_value(PA8, "weak", 1) == 0.1
        assert completion_value(PA8, "weak", 6) == 0.7

    def test_linear(self):
        assert completion_value(PA8, "linear", 1) == pytest.approx(0.175, rel=1e-15)

    @pytest.mark.parametrize("kind", ["linear", "weak", "strict"])
    def test_window(self, kind):
        assert completion_value(PA8, kind, 4) == 0.5

    def test_strict_vector(self):
        np.testing.assert_array_equal(
            build_predictive(PA8, "strict").values, [0.25, 0.25, 0.25, 0.375, 0.5, 0.625, 0.625, 0.625, 0.625]
        )

    def test_weak_vector(self):
        np.testing.assert_array_equal(
            build_predictive(PA8, "weak").values, [0.1, 0.1, 0.25, 0.375, 0.5, 0.625, 0.7, 0.7, 0.7]
        )

    @pytest.mark.parametrize("kind", KINDS)
    def test_window_exact(self, kind):
        p = build_predictive(APIARY, kind).values
        a = np.arange(25, 61)
        assert np.array_equal(p[25:61], a / 100)

    def test_out_of_range_count(self):
        with pytest.raises(InvalidAssertionError):
            completion_values(PA8, "linear", [9])

    @settings(max_examples=80, deadline=None)
    @given(assertions(), st.sampled_from([CompletionKind.LINEAR, CompletionKind.WEAK, CompletionKind.STRICT]))
    def test_monotone_and_bounded(self, A, kind):
        p = build_predictive(A, kind).values
        assert np.all(np.diff(p) >= 0)
        assert p.min() >= A.pL and p.max() <= A.pU

    @settings(max_examples=80, deadline=None)
    @given(assertions())
    def test_ordering(self, A):
        w, l, s = (build_predictive(A, k).values for k in ("weak", "linear", "strict"))
        lo, hi = slice(0, A.a1), slice(A.a2 + 1, A.N + 1)
        assert np.all(w[lo] <= l[lo]) and np.all(l[lo] <= s[lo])
        assert np.all(s[hi] <= l[hi]) and np.all(l[hi] <= w[hi])


class TestQuartic:
    def test_lower_conditions(self):
        piece = quartic_coefficients(APIARY, "lower")
        assert piece(0.0) == pytest.approx(0.1, abs=1e-14)
        assert piece(0.25) == pytest.approx(0.25, abs=1e-14)
        assert piece.deriv(1)(0.0) == pytest.approx(0.0, abs=1e-14)
        assert piece.deriv(1)(0.25) == pytest.approx(1.0, abs=1e-14)
        assert piece.deriv(2)(0.0) == pytest.approx(0.0, abs=1e-14)

    def test_upper_conditions(self):
        piece = quartic_coefficients(APIARY, "upper")
        assert piece(0.6) == pytest.approx(0.6, abs=1e-14)
        assert piece(1.0) == pytest.approx(0.7, abs=1e-14)
        assert piece.deriv(1)(0.6) == pytest.approx(1.0, abs=1e-13)
        assert piece.deriv(1)(1.0) == pytest.approx(0.0, abs=1e-13)
        assert piece.deriv(2)(1.0) == pytest.approx(0.0, abs=1e-12)

    def test_apiary_monotone(self):
        p = build_predictive(APIARY, "quartic").values
        assert np.all(np.diff(p) >= 0)
        assert p[0] == 0.1 and p[-1] == 0.7

    def test_pl_at_window_edge_flagged(self):
        A = PaNAssertion(100, 25, 60, 0.25, 0.7)
        with pytest.raises(NonMonotoneCompletionError):
            build_predictive(A, "quartic")

    def test_small_upper_gap_flagged(self):
        # (pU - x2)/(1 - x2) = 0.2 < 1/4
        with pytest.raises(NonMonotoneCompletionError):
            build_predictive(PA8, "quartic")

    @settings(max_examples=80, deadline=None)
    @given(assertions())
    def test_monotone_when_accepted(self, A):
        try:
            p = build_predictive(A, "quartic").values
        except NonMonotoneCompletionError:
            return
        assert np.all(np.diff(p) >= 0)
        assert p.min() >= min(A.pL, A.a1 / A.N) and p.max() <= max(A.pU, A.a2 / A.N)

    def test_bad_side(self):
        with pytest.raises(ValueError):
            quartic_coefficients(APIARY, "middle")
