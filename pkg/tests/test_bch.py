"""
Unit Tests for the Baker–Campbell–Hausdorff module

Tests descent-number coefficient tables, φ_k and the BCH series against
log(exp α ⋆ exp β) on forest and word bases.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from roughforge.core.bch import (
    bch,
    bch_degree_arrays,
    bch_term,
    descent_coefficients,
    descent_number,
    dynkin_operator,
    pattern_coefficients,
    phi_k,
    table_rows,
)
from roughforge.core.construct import forest_algebra, word_algebra
from roughforge.core.dual import (
    DualElement,
    bracket,
    convolve,
    exp_N,
    log_N,
    random_infinitesimal,
)
from roughforge.core.errors import PreconditionError, ResourceLimitError
from roughforge.core.shuffle import Alphabet


class TestDescentCoefficients:
    """Test cases for the a_σ tables"""

    def test_descent_number(self):
        """Test descents of small permutations"""
        assert descent_number((1, 2, 3)) == 0
        assert descent_number((3, 2, 1)) == 2
        assert descent_number((2, 1, 3)) == 1

    def test_order_one_and_two(self):
        """Test a_σ for k = 1 and k = 2"""
        assert [r.coefficient for r in descent_coefficients(1)] == [1]
        rows = descent_coefficients(2)
        assert [(r.one_line, r.coefficient) for r in rows] == [
            ("12", Fraction(1, 2)),
            ("21", Fraction(-1, 2)),
        ]

    def test_order_three(self):
        """Test the six rows for k = 3"""
        table = {r.one_line: r.coefficient for r in descent_coefficients(3)}
        assert table["123"] == Fraction(1, 3)
        assert table["321"] == Fraction(1, 3)
        for perm in ("132", "213", "231", "312"):
            assert table[perm] == Fraction(-1, 6)

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_coefficients_sum_to_zero(self, k):
        """Test Σ_σ a_σ = 0 for k ≥ 2"""
        assert sum(r.coefficient for r in descent_coefficients(k)) == 0

    def test_order_cap(self):
        """Test orders outside 1..max_bch_order are rejected"""
        with pytest.raises(ResourceLimitError):
            descent_coefficients(7)
        with pytest.raises(PreconditionError):
            descent_coefficients(0)

    def test_table_rows(self):
        """Test CSV rows carry text fields"""
        assert table_rows(2)[1] == {
            "k": "2",
            "permutation": "21",
            "descents": "1",
            "coefficient": "-1/2",
        }

    def test_second_order_patterns(self):
        """Test BCH_(2) keeps only the αβ and βα patterns with ±1/2"""
        assert pattern_coefficients(2) == {
            (False, True): Fraction(-1, 2),
            (True, False): Fraction(1, 2),
        }


class TestPhi:
    """Test cases for φ_k"""

    def setup_method(self):
        """Setup test fixtures"""
        self.algebra = forest_algebra(3, (1, 2))
        self.rng = random.Random(5)

    def test_phi_one_is_identity(self):
        """Test φ_1(α) = α"""
        alpha = random_infinitesimal(self.algebra, self.rng)
        assert phi_k([alpha]).equals(alpha)

    def test_phi_two_vanishes_on_diagonal(self):
        """Test φ_2(α⊗α) = 0"""
        alpha = random_infinitesimal(self.algebra, self.rng)
        assert phi_k([alpha, alpha]).equals(DualElement.zero(self.algebra))

    def test_phi_two_is_half_bracket(self):
        """Test φ_2(α⊗β) = [α, β]/2"""
        alpha = random_infinitesimal(self.algebra, self.rng)
        beta = random_infinitesimal(self.algebra, self.rng)
        assert phi_k([alpha, beta]).equals(bracket(alpha, beta).scale(Fraction(1, 2)))

    def test_rejects_non_infinitesimal(self):
        """Test inputs must satisfy the Leibniz rule"""
        unit = DualElement.unit(self.algebra)
        with pytest.raises(PreconditionError):
            phi_k([unit])


class TestBCH:
    """Test cases for the truncated BCH series"""

    def setup_method(self):
        """Setup test fixtures"""
        self.rng = random.Random(2024)
        self.algebras = [
            forest_algebra(3, (1, 2)),
            forest_algebra(4, (1,)),
            word_algebra(Alphabet.integers(2, Fraction(1, 5)), 4),
        ]

    @pytest.mark.slow
    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_agrees_with_exp_log(self, index):
        """Test BCH_N(α, β) = log_N(exp_N α ⋆ exp_N β) exactly on 50 pairs"""
        algebra = self.algebras[index]
        for _ in range(50):
            alpha = random_infinitesimal(algebra, self.rng)
            beta = random_infinitesimal(algebra, self.rng)
            expected = log_N(convolve(exp_N(alpha), exp_N(beta)))
            assert bch(alpha, beta).equals(expected)

    def test_inverse_pair(self):
        """Test BCH(α, −α) = 0"""
        algebra = self.algebras[0]
        alpha = random_infinitesimal(algebra, self.rng)
        assert bch(alpha, -alpha).equals(DualElement.zero(algebra))

    def test_first_two_terms(self):
        """Test BCH_(1) = α + β and BCH_(2) = [α, β]/2"""
        algebra = self.algebras[0]
        alpha = random_infinitesimal(algebra, self.rng)
        beta = random_infinitesimal(algebra, self.rng)
        assert bch_term(alpha, beta, 1).equals(alpha + beta)
        assert bch_term(alpha, beta, 2).equals(bracket(alpha, beta).scale(Fraction(1, 2)))

    def test_homogeneous_degrees(self):
        """Test BCH_(k) only sees levels ≥ k"""
        algebra = self.algebras[1]
        alpha = random_infinitesimal(algebra, self.rng)
        beta = random_infinitesimal(algebra, self.rng)
        term = bch_term(alpha, beta, 3)
        assert all(term.coeffs[algebra.levels < 3] == 0)

    def test_degree_part(self):
        """Test bch_degree_arrays extracts one level of the full series"""
        algebra = self.algebras[1]
        alpha = random_infinitesimal(algebra, self.rng)
        beta = random_infinitesimal(algebra, self.rng)
        full = bch(alpha, beta).coeffs
        part = bch_degree_arrays(algebra, alpha.coeffs, beta.coeffs, 3)
        mask = algebra.levels == 3
        assert np.all(part[mask] == full[mask])
        assert np.all(part[~mask] == 0)

    def test_float_batch(self):
        """Test float BCH with a trailing batch axis"""
        algebra = self.algebras[0]
        alpha = random_infinitesimal(algebra, self.rng)
        beta = random_infinitesimal(algebra, self.rng)
        exact = bch(alpha, beta).coeffs.astype(np.float64)
        a = np.stack([alpha.coeffs.astype(np.float64)] * 2, axis=1)
        b = np.stack([beta.coeffs.astype(np.float64)] * 2, axis=1)
        total = sum(bch_degree_arrays(algebra, a, b, k) for k in range(1, 4))
        assert np.allclose(total[:, 0], exact)
        assert np.allclose(total[:, 1], exact)


class TestDynkin:
    """Test cases for the Dynkin operator on words"""

    def test_lie_elements_scale_by_degree(self):
        """Test D(α) = Σ_k k α_k for infinitesimal characters"""
        algebra = word_algebra(Alphabet.integers(2, Fraction(1, 5)), 4)
        rng = random.Random(9)
        for _ in range(10):
            alpha = random_infinitesimal(algebra, rng)
            result = dynkin_operator(alpha)
            expected = alpha.coeffs * np.array([Fraction(int(k)) for k in algebra.levels], dtype=object)
            assert np.all(result.coeffs == expected)

    def test_forest_basis_rejected(self):
        """Test the operator needs a word basis"""
        algebra = forest_algebra(2, (1,))
        with pytest.raises(PreconditionError):
            dynkin_operator(DualElement.zero(algebra))
