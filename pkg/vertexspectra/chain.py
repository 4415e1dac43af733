'''Recursive evaluation of the functions F_n of the functional equations.

For a tuple (v_0, ..., v_n) the equation of order n gives

    F_{n+1}(v_0..v_n) = Lambda(v_0) F_n(v_1..v_n)
        - sum_i M_i^(n) F_{n-1}(without v_0, v_i)
        - sum_{i<j} N_{j,i}^(n) F_{n-1}(without v_i, v_j)

starting from F_0 = f0.'''

import cmath
import itertools
import logging

import numpy as np

import vertexspectra
from vertexspectra import kernel
from vertexspectra import oracle as oracles
from vertexspectra import spectral
from vertexspectra import transfer

LOG = logging.getLogger(__name__)


class VanishingPartition(vertexspectra.NumericalError):
    '''Exception raised when Z is too small to form the F_L / Z ratio.'''

    code = 'VANISHING_PARTITION'


class ChainConfig(object):
    '''Branch, normalization F_0 and spectrum the chain is built on.'''

    def __init__(self, params, spectrum, branch, f0=1):
        if f0 == 0:
            raise vertexspectra.PreconditionError(_('f0 must be nonzero'))
        transfer.eigenvalue_at(spectrum, branch, spectrum.reference)
        self.params = params
        self.spectrum = spectrum
        self.branch = branch
        self.f0 = complex(f0)


class Chain(object):
    '''Memoized F_n for one chain configuration. With symmetric set, the
    cache is keyed on tuples sorted by (re, im), which assumes F_n is a
    symmetric function. Not shared across threads.'''

    def __init__(self, config, symmetric=False):
        self.config = config
        self.symmetric = symmetric
        self._cache = {(): config.f0}

    def _key(self, values):
        if self.symmetric:
            return tuple(sorted(values, key=lambda value: (value.real,
                value.imag)))
        return values

    def __call__(self, values):
        values = tuple(complex(value) for value in values)
        if len(values) > self.config.params.L:
            raise vertexspectra.PreconditionError(
                _('F_n is defined for n <= %d, got %d') %
                (self.config.params.L, len(values)))
        key = self._key(values)
        if key not in self._cache:
            self._cache[key] = self._evaluate(values)
        return self._cache[key]

    def _evaluate(self, values):
        config = self.config
        n = len(values) - 1
        value = transfer.eigenvalue_at(config.spectrum, config.branch,
            values[0]) * self(values[1:])
        for i in range(1, n + 1):
            value -= kernel.coeff_M(config.params, n, i, values) * \
                self(values[1:i] + values[i + 1:])
        for (i, j) in itertools.combinations(range(1, n + 1), 2):
            value -= kernel.coeff_N(config.params, n, j, i, values) * \
                self(values[:i] + values[i + 1:j] + values[j + 1:])
        return value


def eval_F(n, values, config, chain=None):
    '''F_n at the ordered tuple of n values.'''
    if len(values) != n:
        raise vertexspectra.PreconditionError(
            _('F_%d takes %d arguments, got %d') % (n, n, len(values)))
    chain = chain or Chain(config)
    return chain(values)


def symmetry_residual(n, values, config):
    '''Largest relative change of F_n under adjacent transpositions of its
    arguments.'''
    if n < 2:
        return 0.0
    chain = Chain(config)
    values = tuple(values)
    base = eval_F(n, values, config, chain)
    residual = 0.0
    for position in range(n - 1):
        swapped = list(values)
        (swapped[position], swapped[position + 1]) = \
            (swapped[position + 1], swapped[position])
        residual = max(residual,
            abs(eval_F(n, tuple(swapped), config, chain) - base) / abs(base))
    return residual


class RatioResult(object):
    '''F_L / Z over a batch of point sets, with its spread and the largest
    deviation of kappa0 * ratio / f0 from one.'''

    def __init__(self, ratios, kappa, f0):
        self.ratios = np.asarray(ratios, dtype=complex)
        self.ratio = complex(self.ratios[0])
        self.spread = spectral.max_pairwise_deviation(self.ratios)
        self.kappa0 = kappa
        self.normalization = float(np.max(np.abs(kappa * self.ratios / f0 -
            1)))


def fL_vs_Z(batch, config, oracle=oracles.z_contract):
    '''Ratio F_L / Z for each point set in batch.'''
    params = config.params
    kappa = spectral.kappa0(params, config.spectrum, config.branch)
    chain = Chain(config, symmetric=True)
    ratios = []
    for points in batch:
        z = oracle(params, points).value
        if z == 0 or not cmath.isfinite(z):
            raise VanishingPartition(_('Z vanishes at %r') % (points,))
        ratios.append(chain(tuple(points)) / z)
    return RatioResult(ratios, kappa, config.f0)
