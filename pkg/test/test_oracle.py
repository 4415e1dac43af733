'''Unittests for the partition function oracles.'''

import unittest

from hypothesis import given
from hypothesis import settings
from hypothesis import strategies

import test
import vertexspectra
from vertexspectra import model
from vertexspectra import oracle

# Number of alternating sign matrices of size n.
ASM_COUNTS = {1: 1, 2: 2, 3: 7, 4: 42, 5: 429, 6: 7436}


class TestOracles(unittest.TestCase):
    '''Test case for enumeration, contraction and determinant oracles.'''

    def test_configuration_count(self):
        for L in range(1, 7):
            (params, points) = test.random_model(L, L)
            result = oracle.z_enumerate(params, points)
            self.assertEqual(ASM_COUNTS[L], result.cost['configurations'])
            self.assertEqual(oracle.Method.ENUMERATION, result.method)

    def test_single_site(self):
        (params, points) = test.random_model(1, 0)
        for evaluate in (oracle.z_enumerate, oracle.z_contract,
                oracle.z_izergin):
            self.assertAlmostEqual(model.weight_c(params),
                evaluate(params, points).value, places=12)

    def test_two_site_closed_form(self):
        for seed in range(20):
            (params, points) = test.random_model(2, seed)
            expected = oracle.z2_closed_form(params, points).value
            for evaluate in (oracle.z_enumerate, oracle.z_contract,
                    oracle.z_izergin):
                self.assertLess(test.relative(evaluate(params,
                    points).value, expected), 1e-10)

    def test_three_site_homogeneous(self):
        for seed in range(10):
            (params, points) = test.random_model(3, seed, homogeneous=True)
            expected = oracle.z3_homogeneous(params, points).value
            self.assertLess(test.relative(oracle.z_enumerate(params,
                points).value, expected), 1e-10)
            self.assertLess(test.relative(oracle.z_contract(params,
                points).value, expected), 1e-10)

    @settings(max_examples=20, deadline=None)
    @given(strategies.integers(2, 6), strategies.integers(0, 10000))
    def test_oracles_agree(self, L, seed):
        (params, points) = test.random_model(L, seed)
        contract = oracle.z_contract(params, points).value
        self.assertLess(test.relative(oracle.z_enumerate(params,
            points).value, contract), 1e-10)
        self.assertLess(test.relative(oracle.z_izergin(params,
            points).value, contract), 1e-9)

    def test_symmetric_in_lambda(self):
        (params, points) = test.random_model(4, 11)
        values = list(points)
        swapped = model.SpectralPoints(params,
            [values[2], values[0], values[3], values[1]])
        self.assertLess(test.relative(oracle.z_contract(params,
            swapped).value, oracle.z_contract(params, points).value), 1e-10)

    def test_diagonal(self):
        for L in range(1, 7):
            (params, _points) = test.random_model(L, L + 20)
            points = model.SpectralPoints(params, params.mu)
            expected = oracle.diagonal_z(params).value
            self.assertLess(test.relative(oracle.z_enumerate(params,
                points).value, expected), 1e-10)
            limit = oracle.z_izergin_limit(params, points).value
            self.assertLess(test.relative(limit, expected), 1e-9)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.z_izergin_limit, params, points, levels=0)

    def test_izergin_singular(self):
        (params, _points) = test.random_model(2, 5)
        points = model.SpectralPoints(params, params.mu)
        try:
            oracle.z_izergin(params, points)
        except oracle.SingularDenominator as exception:
            self.assertEqual('SINGULAR_DENOMINATOR', exception.code)
        else:
            self.fail('SingularDenominator not raised')

    def test_corrupted_weights(self):
        (params, points) = test.random_model(2, 3)

        def weights(row, _column, difference):
            (a, b, c) = model.vertex_weights(params, difference)
            return (a, -b if row == 0 else b, c)

        expected = oracle.z2_closed_form(params, points).value
        value = oracle.z_enumerate(params, points, weights).value
        self.assertGreater(test.relative(value, expected), 1e-6)

    def test_limits(self):
        (params, points) = test.random_model(7, 0)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.z_enumerate, params, points)
        (params, points) = test.random_model(3, 0)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.z2_closed_form, params, points)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.z3_homogeneous, params, points)


class TestRecurrence(unittest.TestCase):
    '''Test case for the reduction at lambda_i = mu_j - gamma.'''

    def test_pinned_two_site(self):
        (params, points) = test.random_model(2, 8)
        for (i, j) in ((0, 0), (0, 1), (1, 0), (1, 1)):
            specialized = oracle.specialize(params, points, i, j)
            (form, residuals) = oracle.pin_korepin_prefactor(params,
                specialized, i, j)
            self.assertEqual('pinned', form)
            self.assertEqual(set(oracle.KOREPIN_FORMS), set(residuals))

    def test_pinned(self):
        for L in (3, 4, 5):
            (params, points) = test.random_model(L, L + 30)
            for (i, j) in ((0, 0), (L - 1, 1), (1, L - 1)):
                specialized = oracle.specialize(params, points, i, j)
                self.assertLess(oracle.korepin_residual(params, specialized,
                    i, j), 1e-9)

    def test_residuals_per_form(self):
        (params, points) = test.random_model(3, 11)
        specialized = oracle.specialize(params, points, 2, 0)
        residuals = oracle.korepin_residuals(params, specialized, 2, 0)
        self.assertEqual(set(oracle.KOREPIN_FORMS), set(residuals))
        self.assertEqual(residuals['pinned'], oracle.korepin_residual(params,
            specialized, 2, 0))
        self.assertLess(residuals['pinned'], 1e-9)
        self.assertGreater(residuals['negated_pinned'], 1)

    def test_full_product_differs(self):
        (params, points) = test.random_model(3, 9)
        specialized = oracle.specialize(params, points, 0, 1)
        self.assertGreater(oracle.korepin_residual(params, specialized, 0, 1,
            'full_product'), 1e-6)

    def test_preconditions(self):
        (params, points) = test.random_model(3, 9)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.korepin_residual, params, points, 0, 1)
        specialized = oracle.specialize(params, points, 0, 1)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.korepin_residual, params, specialized, 0, 3)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.korepin_prefactor, params, specialized, 0, 1, 'other')
        (params, points) = test.random_model(1, 9)
        specialized = oracle.specialize(params, points, 0, 0)
        self.assertRaises(vertexspectra.PreconditionError,
            oracle.korepin_residual, params, specialized, 0, 0)


if __name__ == '__main__':
    unittest.main()
