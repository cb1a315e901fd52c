import numpy as np
import pytest

from ncmoments.algebra import matrix_unit, word_trace
from ncmoments.evenp import (
    PreconditionFailedError,
    alternating_moment,
    alternating_norms_match,
    direct_even_norm,
    even_norm_expansion,
    even_norm_weight,
    even_p_transfer_check,
    expand_even_norm,
)

from conftest import random_matrix, random_unitary


class TestWeights:
    def test_empty_word(self):
        assert even_norm_weight(2, 0, ()) == 1.0

    def test_single_letter(self):
        # k=1: only j=1 contributes with binom(alpha, 0) = 1
        assert even_norm_weight(2, 1, (False,)) == 2.0
        assert even_norm_weight(3, 1, (True,)) == 3.0

    def test_star_transition_weights(self):
        # m=1, k=2: only the patterns with a cyclic (star, plain)
        # transition survive, each weighing 1/2; together they produce the
        # tau(x* x) term of ||1 + x||_2^2
        assert even_norm_weight(1, 2, (False, False)) == 0.0
        assert even_norm_weight(1, 2, (True, False)) == 0.5
        assert even_norm_weight(1, 2, (False, True)) == 0.5
        # length beyond 2m carries no j <= m with k - j <= alpha
        assert even_norm_weight(1, 4, (False, False, False, False)) == 0.0


class TestExpansion:
    def test_zero_elements(self, rng):
        coeffs = [random_matrix(rng, 2)]
        assert abs(expand_even_norm(coeffs, [np.zeros((2, 2))], 2) - 1.0) < 1e-12

    def test_m1_single_element(self, rng):
        a = random_matrix(rng, 2)
        x = random_matrix(rng, 2)
        got = expand_even_norm([a], [x], 1)
        want = direct_even_norm([a], [x], 1)
        assert abs(got - want) <= 1e-9

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_matches_direct_norm(self, rng, m):
        for _ in range(5):
            coeffs = [random_matrix(rng, 2)]
            elems = [random_matrix(rng, 2)]
            got = expand_even_norm(coeffs, elems, m)
            want = direct_even_norm(coeffs, elems, m)
            assert abs(got - want) <= 1e-9

    def test_two_elements(self, rng):
        coeffs = [random_matrix(rng, 2) for _ in range(2)]
        elems = [random_matrix(rng, 2) for _ in range(2)]
        got = expand_even_norm(coeffs, elems, 2)
        want = direct_even_norm(coeffs, elems, 2)
        assert abs(got - want) <= 1e-9

    def test_expansion_scheme_evaluates_to_the_norm(self, rng):
        from ncmoments.algebra import adjoint, word_trace

        coeffs = [random_matrix(rng, 2)]
        elems = [random_matrix(rng, 2)]
        scheme = even_norm_expansion(1, 2)
        assert scheme.terms[0] == ((), 1.0)
        total = 0.0
        for word, weight in scheme.terms:
            total += weight * (
                word_trace(coeffs, word) * word_trace(elems, word)
            ).real
        assert abs(total - direct_even_norm(coeffs, elems, 2)) <= 1e-9

    def test_guard(self, rng):
        coeffs = [random_matrix(rng, 2) for _ in range(10)]
        elems = [random_matrix(rng, 2) for _ in range(10)]
        with pytest.raises(ValueError):
            expand_even_norm(coeffs, elems, 3)


class TestAlternatingMoment:
    def test_matches_word_trace(self, rng):
        for m in (1, 2):
            elems = [random_matrix(rng, 2) for _ in range(2)]
            for _ in range(3):
                indices = [int(rng.integers(1, 3)) for _ in range(2 * m)]
                got = alternating_moment(elems, indices, m)
                word = [(indices[t], t % 2 == 0) for t in range(2 * m)]
                want = word_trace(elems, word)
                assert abs(got - want) <= 1e-8

    def test_rejects_bad_arity(self, rng):
        with pytest.raises(ValueError):
            alternating_moment([random_matrix(rng, 2)], [1, 1, 1], 2)


class TestTransferCheck:
    def test_same_family(self, rng):
        x = random_matrix(rng, 2)
        rep = even_p_transfer_check([x], [x], 2, [1, 2, 3], trials=3, seed=1)
        assert rep.passed and rep.worst_norm_gap <= 1e-12

    def test_conjugated_family(self, rng):
        xs = [random_matrix(rng, 2) for _ in range(2)]
        u = random_unitary(rng, 2)
        ys = [u @ x @ u.conj().T for x in xs]
        rep = even_p_transfer_check(xs, ys, 2, [1, 2, 3, 4], trials=3, seed=2)
        assert rep.passed
        assert rep.worst_norm_gap <= 1e-8

    def test_transposed_units_fail_precondition(self):
        units = [matrix_unit(2, i, j) for i in range(2) for j in range(2)]
        tunits = [u.T.copy() for u in units]
        with pytest.raises(PreconditionFailedError) as err:
            even_p_transfer_check(units, tunits, 2, [1, 2], trials=2, seed=3)
        assert len(err.value.word) <= 4

    def test_single_element_transpose_is_not_a_witness(self):
        # a lone element and its transpose share all weighted words up to
        # degree 2m; the transfer precondition genuinely holds here
        x = np.array([[0.0, 1.0], [2.0, 0.0]], dtype=complex)
        rep = even_p_transfer_check([x], [x.T.copy()], 2, [1, 2], trials=3, seed=4)
        assert rep.passed


class TestAlternatingTransfer:
    def test_conjugated_family(self, rng):
        xs = [random_matrix(rng, 2)]
        u = random_unitary(rng, 2)
        ys = [u @ x @ u.conj().T for x in xs]
        rep = alternating_norms_match(xs, ys, 2, [1, 2, 3, 4], trials=3, seed=5)
        assert rep.passed
        assert rep.worst_norm_gap <= 1e-8

    def test_scaled_family_fails(self, rng):
        x = random_matrix(rng, 2)
        with pytest.raises(PreconditionFailedError):
            alternating_norms_match([x], [2 * x], 1, [1], trials=1, seed=6)
