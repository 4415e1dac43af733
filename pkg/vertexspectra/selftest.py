'''Regression cases against the known closed forms: the two and three
site partition functions, the eigenvalue tables with their kappa0 signs, and
the explicit three and four site matrices H.'''

import cmath
import math
import sys

import numpy as np

import vertexspectra
from vertexspectra import kernel
from vertexspectra import model
from vertexspectra import oracle
from vertexspectra import report
from vertexspectra import spectral
from vertexspectra import transfer

CONFIG_OPTIONS = {
    'corrupt_weight': vertexspectra.Option(False,
        _('Flip the sign of the b weight in the first row of the '
        'enumeration oracle. The selftest is expected to fail.'))}

SQRT3 = math.sqrt(3)


def table_two_site(params, value):
    '''Closed form eigenvalues and kappa0 for L = 2.'''
    gamma = params.gamma
    (mu0, mu1) = params.mu
    half = (gamma - mu0 - mu1 + 2 * value) / 2
    scale = math.sqrt(2) * cmath.sinh(gamma)
    even = scale * cmath.sqrt(cmath.cosh(gamma) + cmath.cosh(mu0 - mu1)) * \
        cmath.sinh(half)
    odd = 1j * scale * cmath.sqrt(cmath.cosh(gamma) -
        cmath.cosh(mu0 - mu1)) * cmath.cosh(half)
    return [(even, 1), (-even, 1), (odd, -1), (-odd, -1)]


def table_three_site(params, value):
    '''Closed form eigenvalues and kappa0 for L = 3 and mu = 0.'''
    gamma = params.gamma
    quarter = cmath.sinh(gamma) / 4
    shifted = cmath.cosh(2 * (gamma + value))
    plain = cmath.cosh(2 * value)
    root = 2 * math.sqrt(2) * cmath.sqrt(cmath.cosh(2 * gamma) + 7) * \
        cmath.sinh(value) * cmath.sinh(gamma + value)
    rest = cmath.cosh(2 * gamma) + plain - 3
    return [
        (quarter * (-(1 + 1j * SQRT3) * shifted +
            1j * (SQRT3 + 1j) * plain + 2), 1),
        (quarter * ((1 - 1j * SQRT3) * shifted +
            (1 + 1j * SQRT3) * plain - 2), -1),
        (quarter * (1j * (SQRT3 + 1j) * shifted -
            (1 + 1j * SQRT3) * plain + 2), 1),
        (quarter * ((1 + 1j * SQRT3) * shifted +
            (1 - 1j * SQRT3) * plain - 2), -1),
        (quarter * (shifted - root + rest), 1),
        (-quarter * (shifted + root + rest), -1),
        (quarter * (shifted + root + rest), 1),
        (-quarter * (shifted - root + rest), -1)]


def nearest(value, table):
    '''Table entry closest to value.'''
    return min(table, key=lambda entry: abs(entry[0] - value))


def z3_matrix(params, points, eigenvalue):
    '''Explicit 4 x 4 matrix whose determinant times kappa0 is Z for L = 3.'''
    (lam0, lam1, lam2) = points
    (e0, e1, e2) = [eigenvalue(value) for value in points]
    args = [lam0, lam1, lam2]
    m11 = kernel.coeff_M(params, 1, 1, [lam1, lam2])
    m1 = kernel.coeff_M(params, 2, 1, args)
    m2 = kernel.coeff_M(params, 2, 2, args)
    n21 = kernel.coeff_N(params, 2, 2, 1, args)
    return np.array([
        [e2, -1, 0, 0],
        [e1, 0, -1, 0],
        [e0, 0, 0, -1],
        [-m11 * e0, e0 * e1 - m1, -m2, -n21]], dtype=complex)


def h4_matrix(params, points, eigenvalue):
    '''Explicit 10 x 10 matrix H for L = 4.'''
    lam = list(points)
    e = [eigenvalue(value) for value in lam]
    m11 = lambda first, second: kernel.coeff_M(params, 1, 1,
        [lam[first], lam[second]])
    tail = lam[1:]
    matrix = np.zeros((10, 10), dtype=complex)
    # (row, column, value) besides the -1 above the diagonal
    entries = [
        (0, 0, e[3]), (1, 0, e[2]), (2, 0, e[1]),
        (3, 0, -m11(2, 3)), (3, 1, e[2]),
        (4, 0, -m11(1, 3)), (4, 1, e[1]),
        (5, 0, -m11(1, 2)), (5, 2, e[1]),
        (6, 0, -m11(0, 3)), (6, 1, e[0]),
        (7, 0, -m11(0, 2)), (7, 2, e[0]),
        (8, 0, -m11(0, 1)), (8, 3, e[0])]
    for (row, column, value) in entries:
        matrix[row, column] = value
    for row in range(9):
        matrix[row, row + 1] = -1
    matrix[9] = [0,
        -e[0] * kernel.coeff_M(params, 2, 1, tail),
        -e[0] * kernel.coeff_M(params, 2, 2, tail),
        -e[0] * kernel.coeff_N(params, 2, 2, 1, tail),
        e[0] * e[1] - kernel.coeff_M(params, 3, 1, lam),
        -kernel.coeff_M(params, 3, 2, lam),
        -kernel.coeff_M(params, 3, 3, lam),
        -kernel.coeff_N(params, 3, 2, 1, lam),
        -kernel.coeff_N(params, 3, 3, 1, lam),
        -kernel.coeff_N(params, 3, 3, 2, lam)]
    return matrix


def corrupt_weights(params):
    '''Weights with the sign of b flipped in the first row.'''
    def weights(row, _column, difference):
        (a, b, c) = model.vertex_weights(params, difference)
        return (a, -b if row == 0 else b, c)
    return weights


class SelfTest(vertexspectra.Common):
    '''Runs the regression cases in order.'''

    def __init__(self, core, seed=42, corrupt=False):
        super(SelfTest, self).__init__(core)
        self.seed = seed
        self.corrupt = corrupt
        self.rng = None
        self.pinned = None

    def cases(self):
        '''(name, method, tolerance) in run order.'''
        return [
            ('l2_closed_form', self.l2_closed_form, 1e-10),
            ('l2_table', self.l2_table, 1e-9),
            ('l2_kappa0', self.l2_kappa0, 1e-9),
            ('l2_spectral', self.l2_spectral, 1e-9),
            ('l2_kernel_closed_form', self.l2_kernel_closed_form, 1e-10),
            ('l2_homogeneous', self.l2_homogeneous, 1e-9),
            ('l3_table', self.l3_table, 1e-9),
            ('l3_kappa0', self.l3_kappa0, 1e-9),
            ('l3_closed_form', self.l3_closed_form, 1e-10),
            ('l3_spectral', self.l3_spectral, 1e-9),
            ('l3_matrix', self.l3_matrix, 1e-12),
            ('l4_matrix', self.l4_matrix, 1e-12),
            ('diagonal_point', self.diagonal_point, 1e-10),
            ('recurrence', self.recurrence, 1e-9)]

    def _complex(self, box, size):
        ((re_min, re_max), (im_min, im_max)) = box
        return [complex(re, im) for (re, im) in zip(
            self.rng.uniform(re_min, re_max, size),
            self.rng.uniform(im_min, im_max, size))]

    def _params(self, L, homogeneous=False):
        gamma = self._complex([[0.2, 1.2], [-0.5, 0.5]], 1)[0]
        if homogeneous:
            return model.ModelParams(L, gamma, [0] * L, strict=False)
        return model.ModelParams(L, gamma,
            self._complex([[-1, 1], [-0.5, 0.5]], L))

    def _points(self, params):
        return model.SpectralPoints(params,
            self._complex([[-1, 1], [-0.5, 0.5]], params.L))

    def _enumerate(self, params, points):
        weights = corrupt_weights(params) if self.corrupt else None
        return oracle.z_enumerate(params, points, weights).value

    def l2_closed_form(self):
        residual = 0.0
        for _trial in range(50):
            params = self._params(2)
            points = self._points(params)
            expected = oracle.z2_closed_form(params, points).value
            residual = max(residual, abs(self._enumerate(params, points) -
                expected) / abs(expected))
        return residual

    def _table_residual(self, params, table):
        spectrum = transfer.diagonalize(params)
        residual = 0.0
        for value in self._complex([[-1, 1], [-0.5, 0.5]], 5):
            for computed in spectrum.values_at(value):
                expected = nearest(computed, table(params, value))[0]
                residual = max(residual,
                    abs(computed - expected) / abs(expected))
        return residual

    def _kappa_residual(self, params, table):
        spectrum = transfer.diagonalize(params)
        expected = table(params, spectrum.reference)
        residual = 0.0
        for (branch, value) in enumerate(spectrum.eigenvalues):
            sign = nearest(value, expected)[1]
            residual = max(residual,
                abs(spectral.kappa0(params, spectrum, branch) - sign))
        return residual

    def l2_table(self):
        return max(self._table_residual(self._params(2), table_two_site)
            for _trial in range(10))

    def l2_kappa0(self):
        return max(self._kappa_residual(self._params(2), table_two_site)
            for _trial in range(10))

    def l2_spectral(self):
        residual = 0.0
        for _trial in range(10):
            params = self._params(2)
            points = self._points(params)
            spectrum = transfer.diagonalize(params)
            expected = self._enumerate(params, points)
            for value in spectral.spectral_values(params, points, spectrum):
                residual = max(residual,
                    abs(value.z - expected) / abs(expected))
        return residual

    def l2_kernel_closed_form(self):
        residual = 0.0
        for _trial in range(10):
            params = self._params(2)
            points = self._points(params)
            expected = kernel.m11_closed_form(params, *points)
            residual = max(residual, abs(kernel.coeff_M(params, 1, 1,
                list(points)) - expected) / abs(expected))
        return residual

    def l2_homogeneous(self):
        residual = 0.0
        for _trial in range(5):
            params = self._params(2)
            spectrum = transfer.diagonalize(params)
            value = self._complex([[-1, 1], [-0.5, 0.5]], 1)[0]
            relaxed = params.replace(strict=False)
            points = model.SpectralPoints(relaxed, [value, value])
            expected = self._enumerate(relaxed, points)
            for branch in range(spectrum.branch_count):
                computed = oracle.homogeneous_z2(params, value,
                    lambda at: transfer.eigenvalue_at(spectrum, branch, at))
                residual = max(residual,
                    abs(computed - expected) / abs(expected))
        return residual

    def l3_table(self):
        return max(self._table_residual(self._params(3, True),
            table_three_site) for _trial in range(5))

    def l3_kappa0(self):
        return max(self._kappa_residual(self._params(3, True),
            table_three_site) for _trial in range(5))

    def l3_closed_form(self):
        residual = 0.0
        for _trial in range(10):
            params = self._params(3, True)
            points = self._points(params)
            expected = oracle.z3_homogeneous(params, points).value
            residual = max(residual, abs(self._enumerate(params, points) -
                expected) / abs(expected))
        return residual

    def l3_spectral(self):
        residual = 0.0
        for _trial in range(5):
            params = self._params(3, True)
            points = self._points(params)
            spectrum = transfer.diagonalize(params)
            expected = oracle.z3_homogeneous(params, points).value
            for value in spectral.spectral_values(params, points, spectrum):
                residual = max(residual,
                    abs(value.z - expected) / abs(expected))
        return residual

    def _matrix_residual(self, L, transcription):
        residual = 0.0
        for _trial in range(3):
            params = self._params(L)
            points = self._points(params)
            spectrum = transfer.diagonalize(params)
            builder = spectral.HBuilder(params, points)
            for branch in range(spectrum.branch_count):
                built = spectral.build_H(params, points, spectrum, branch,
                    builder).entries
                explicit = transcription(params, points,
                    lambda at: transfer.eigenvalue_at(spectrum, branch, at))
                residual = max(residual, np.max(np.abs(built - explicit)) /
                    np.max(np.abs(explicit)))
        return float(residual)

    def l3_matrix(self):
        return self._matrix_residual(3, z3_matrix)

    def l4_matrix(self):
        return self._matrix_residual(4, h4_matrix)

    def diagonal_point(self):
        residual = 0.0
        for L in range(2, oracle.MAX_ENUMERATION_LENGTH + 1):
            params = self._params(L)
            points = model.SpectralPoints(params, params.mu)
            expected = oracle.diagonal_z(params).value
            residual = max(residual, abs(self._enumerate(params, points) -
                expected) / abs(expected))
        return residual

    def recurrence(self):
        params = self._params(2)
        points = oracle.specialize(params, self._points(params), 0, 1)
        (form, pinning) = oracle.pin_korepin_prefactor(params, points, 0, 1)
        residuals = dict((name, 0.0) for name in oracle.KOREPIN_FORMS)
        for L in (3, 4):
            params = self._params(L)
            (i, j) = (int(self.rng.integers(L)), int(self.rng.integers(L)))
            points = oracle.specialize(params, self._points(params), i, j)
            for (name, value) in oracle.korepin_residuals(params, points, i,
                    j).items():
                residuals[name] = max(residuals[name], value)
        self.pinned = {'form': form, 'pinning': pinning,
            'residuals': residuals}
        if form is None:
            return float('inf')
        return residuals[form]

    def run(self):
        '''Run every case, returning the report.'''
        self.rng = np.random.default_rng([self.seed, 0])
        self.pinned = None
        results = []
        first_failure = None
        for (name, method, tolerance) in self.cases():
            error = None
            try:
                residual = float(method())
            except vertexspectra.NumericalError as exception:
                (residual, error) = (float('inf'), exception.code)
            passed = residual < tolerance
            if not passed and first_failure is None:
                first_failure = name
            self._log.info(_('Case %s: residual %.3e, tolerance %.1e, %s'),
                name, residual, tolerance, 'ok' if passed else 'FAILED')
            results.append({'name': name, 'residual': residual,
                'tolerance': tolerance, 'passed': passed, 'error': error})
        failed = sum(1 for result in results if not result['passed'])
        result = {'command': 'selftest', 'version': vertexspectra.__version__,
            'seed': self.seed, 'cases': results,
            'summary': {'cases': len(results),
                'passed': len(results) - failed, 'failed': failed,
                'first_failure': first_failure,
                'verdict': 'FAIL' if failed else 'PASS'}}
        if self.pinned is not None:
            result['recurrence'] = self.pinned
        return result


def cmd_selftest(core):
    '''Run the selftest and write its report.'''
    test = SelfTest(core, core.get_config('vertexspectra.verify', 'seed'),
        core.get_config(__name__, 'corrupt_weight'))
    result = test.run()
    report.emit(result, core.get_config('vertexspectra.verify', 'out'),
        core.get_config('vertexspectra.verify', 'format'))
    if result['summary']['failed']:
        sys.stderr.write(_('Selftest failed, first failing case: %s\n') %
            result['summary']['first_failure'])
        return vertexspectra.EXIT_FAILURE
    return vertexspectra.EXIT_PASS
