'''Unittests for the transfer matrix and its spectrum.'''

import unittest

import numpy as np

import test
import vertexspectra
from vertexspectra import model
from vertexspectra import transfer


class TestTransfer(unittest.TestCase):
    '''Test case for building and diagonalizing T.'''

    def test_single_site(self):
        params = model.ModelParams(1, complex(0.5, 0.1), [0.2])
        value = complex(0.3, 0.2)
        c = model.weight_c(params)
        entries = transfer.build_transfer(params, value).entries
        np.testing.assert_allclose([[0, c], [c, 0]], entries, atol=1e-14)

    def test_row_operator(self):
        # B maps the all up state of one site to c times the down state.
        params = model.ModelParams(1, 0.5, [0])
        state = transfer.apply_row(params, 0.3, np.array([1, 0],
            dtype=complex))
        np.testing.assert_allclose([0, model.weight_c(params)], state)

    def test_commuting_family(self):
        for L in (2, 3, 4, 5, 6):
            (params, points) = test.random_model(L, L)
            self.assertLess(transfer.commutator_residual(params, points[0],
                points[1]), 1e-10)

    def test_branch_smoothness(self):
        step = 1e-3
        grid = complex(-0.5, 0.1) + step * np.arange(1001)
        for L in (2, 3, 4):
            (params, _points) = test.random_model(L, L + 90)
            spectrum = transfer.diagonalize(params)
            values = np.array([spectrum.values_at(value) for value in grid])
            scale = np.max(np.abs(values))
            first = np.abs(np.diff(values, axis=0))
            second = np.abs(np.diff(values, 2, axis=0))
            self.assertLess(np.max(first), 50 * step * scale)
            self.assertLess(np.max(second), 1e-3 * scale)

    def test_dense_limit(self):
        (params, points) = test.random_model(3, 1)
        self.assertRaises(vertexspectra.PreconditionError,
            transfer.build_transfer, params, points[0], 2)

    def test_diagonalize(self):
        for L in (2, 3, 4):
            (params, points) = test.random_model(L, 7)
            spectrum = transfer.diagonalize(params)
            self.assertEqual(2 ** L, spectrum.branch_count)
            self.assertLess(spectrum.condition, 1e8)
            for value in points:
                self.assertLess(spectrum.leakage(value), 1e-9)
                self.assertLess(transfer.trace_residual(spectrum, value),
                    1e-9)

    def test_negation_symmetry(self):
        for L in (2, 3, 4):
            (params, points) = test.random_model(L, L + 80)
            spectrum = transfer.diagonalize(params)
            values = spectrum.values_at(points[0])
            scale = np.max(np.abs(values))
            for value in values:
                self.assertLess(np.min(np.abs(values + value)) / scale, 1e-9)

    def test_branch_order(self):
        (params, _points) = test.random_model(3, 2)
        spectrum = transfer.diagonalize(params)
        magnitudes = np.round(np.abs(spectrum.eigenvalues), 10)
        self.assertTrue(np.all(np.diff(magnitudes) <= 0))
        again = transfer.diagonalize(params)
        np.testing.assert_array_equal(spectrum.eigenvalues,
            again.eigenvalues)

    def test_eigenvalue_at_reference(self):
        (params, _points) = test.random_model(2, 3)
        spectrum = transfer.diagonalize(params)
        for branch in range(spectrum.branch_count):
            self.assertAlmostEqual(spectrum.eigenvalues[branch],
                transfer.eigenvalue_at(spectrum, branch, spectrum.reference),
                places=10)
        self.assertRaises(vertexspectra.PreconditionError,
            transfer.eigenvalue_at, spectrum, 4, 0.1)
        self.assertRaises(vertexspectra.PreconditionError,
            transfer.eigenvalue_at, spectrum, -1, 0.1)

    def test_degenerate(self):
        params = model.ModelParams(2, 0, [0.1, 0.5])
        try:
            transfer.diagonalize(params, attempts=2)
        except transfer.DegenerateSpectrum as exception:
            self.assertEqual('DEGENERATE_SPECTRUM', exception.code)
        else:
            self.fail('DegenerateSpectrum not raised')

    def test_configured(self):
        core = test.core()
        (params, _points) = test.random_model(2, 4)
        spectrum = transfer.diagonalize_with(core, params)
        self.assertEqual(complex(0.4137, 0.2718), spectrum.reference)


if __name__ == '__main__':
    unittest.main()
