'''Anti-periodic transfer matrix and its eigenvalue branches.

States of the 2^L dimensional quantum space are indexed with site 0 as the
most significant bit and spin up as bit value 0, so index 0 is the all up
state and index 2^L - 1 the all down state. The row monodromy is
R_{0,L-1} ... R_{0,0}: site 0 acts first on the auxiliary space.'''

import logging

import numpy as np
import scipy.linalg

import vertexspectra
from vertexspectra import model

CONFIG_OPTIONS = {
    'reference_point': vertexspectra.Option([0.4137, 0.2718],
        _('Spectral parameter [re, im] the transfer matrix is diagonalized '
        'at.')),
    'reference_shift': vertexspectra.Option([0.1371, 0.0829],
        _('Shift [re, im] applied to the reference point when its spectrum '
        'is ill conditioned.')),
    'reference_attempts': vertexspectra.Option(8,
        _('Number of reference points tried before giving up.')),
    'condition_limit': vertexspectra.Option(1e8,
        _('Largest accepted condition number of the eigenvector matrix.')),
    'max_dense_length': vertexspectra.Option(10,
        _('Largest lattice length a dense transfer matrix is built for.'))}

DEFAULT_REFERENCE = complex(0.4137, 0.2718)
DEFAULT_SHIFT = complex(0.1371, 0.0829)
DEFAULT_ATTEMPTS = 8
DEFAULT_CONDITION_LIMIT = 1e8
DEFAULT_MAX_DENSE_LENGTH = 10

# Smallest relative gap between two eigenvalues still treated as distinct.
DEGENERACY_GAP = 1e-8

LOG = logging.getLogger(__name__)

UP = 0
DOWN = 1


class DegenerateSpectrum(vertexspectra.NumericalError):
    '''Exception raised when the transfer matrix cannot be reliably
    diagonalized at any tried reference point.'''

    code = 'DEGENERATE_SPECTRUM'


def site_operators(params, value, site):
    '''Auxiliary space entries of R_{0,site}(value - mu[site]) as 2x2
    operators on the site, keyed by (auxiliary out, auxiliary in).'''
    (a, b, c) = model.vertex_weights(params, value - params.mu[site])
    return {
        (UP, UP): np.array([[a, 0], [0, b]], dtype=complex),
        (UP, DOWN): np.array([[0, 0], [c, 0]], dtype=complex),
        (DOWN, UP): np.array([[0, c], [0, 0]], dtype=complex),
        (DOWN, DOWN): np.array([[b, 0], [0, a]], dtype=complex)}


def _apply_site(operator, vectors, site):
    block = vectors.reshape(2 ** site, 2, -1)
    return np.einsum('ab,ibj->iaj', operator, block).reshape(vectors.shape)


def monodromy_apply(params, value, vectors, out_state, in_state):
    '''Apply the monodromy entry with the given auxiliary out and in states
    to the columns of vectors, without building the operator.'''
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.shape[0] != 2 ** params.L:
        raise vertexspectra.PreconditionError(
            _('Vectors have dimension %d, expected %d') % (vectors.shape[0],
            2 ** params.L))
    zero = np.zeros_like(vectors)
    states = {UP: zero, DOWN: zero}
    states[in_state] = vectors
    for site in range(params.L):
        operators = site_operators(params, value, site)
        states = dict(
            (out, _apply_site(operators[(out, UP)], states[UP], site) +
                _apply_site(operators[(out, DOWN)], states[DOWN], site))
            for out in (UP, DOWN))
    return states[out_state]


def apply_row(params, value, vectors):
    '''Apply the creation type row operator B(value), the monodromy entry
    taking the auxiliary space from down to up.'''
    return monodromy_apply(params, value, vectors, UP, DOWN)


def apply_transfer(params, value, vectors):
    '''Apply T(value) = B(value) + C(value), the auxiliary trace of the flip
    twist times the monodromy.'''
    return monodromy_apply(params, value, vectors, UP, DOWN) + \
        monodromy_apply(params, value, vectors, DOWN, UP)


class TransferMatrix(object):
    '''Dense transfer matrix T(value).'''

    def __init__(self, params, value, entries):
        self.params = params
        self.value = value
        self.entries = entries

    @property
    def dim(self):
        return self.entries.shape[0]


def build_transfer(params, value, max_length=DEFAULT_MAX_DENSE_LENGTH):
    '''Build the dense transfer matrix at the spectral parameter value.'''
    if params.L > max_length:
        raise vertexspectra.PreconditionError(
            _('Dense transfer matrix limited to L <= %d, got %d') %
            (max_length, params.L))
    identity = np.eye(2 ** params.L, dtype=complex)
    return TransferMatrix(params, value,
        apply_transfer(params, value, identity))


def commutator_residual(params, first, second):
    '''Relative Frobenius norm of [T(first), T(second)].'''
    left = build_transfer(params, first).entries
    right = build_transfer(params, second).entries
    commutator = left.dot(right) - right.dot(left)
    scale = np.linalg.norm(left) * np.linalg.norm(right)
    return float(np.linalg.norm(commutator) / scale)


class SpectrumTable(object):
    '''Eigendecomposition of T at a reference point. Branch k is the k-th
    column of the eigenvector matrix, and its eigenvalue at any lambda is
    read off the diagonal of V^-1 T(lambda) V.'''

    def __init__(self, params, reference, eigenvalues, vectors, condition):
        self.params = params
        self.reference = reference
        self.eigenvalues = eigenvalues
        self.vectors = vectors
        self.inverse = scipy.linalg.inv(vectors)
        self.condition = condition
        self._cache = {}

    @property
    def branch_count(self):
        return len(self.eigenvalues)

    def transformed(self, value):
        '''V^-1 T(value) V.'''
        value = complex(value)
        if value not in self._cache:
            self._cache[value] = self.inverse.dot(
                apply_transfer(self.params, value, self.vectors))
        return self._cache[value]

    def values_at(self, value):
        '''All branch eigenvalues at value.'''
        return np.diag(self.transformed(value)).copy()

    def leakage(self, value, branch=None):
        '''Largest off-diagonal magnitude of V^-1 T(value) V relative to the
        largest eigenvalue magnitude. Restricted to the row and column of a
        branch if one is given.'''
        matrix = self.transformed(value)
        off = matrix - np.diag(np.diag(matrix))
        if branch is not None:
            off = np.concatenate([off[branch, :], off[:, branch]])
        scale = np.max(np.abs(np.diag(matrix)))
        if scale == 0:
            return float('inf')
        return float(np.max(np.abs(off)) / scale)


def _check_branch(table, branch):
    if int(branch) != branch or not 0 <= branch < table.branch_count:
        raise vertexspectra.PreconditionError(
            _('Branch %r out of range [0, %d)') % (branch, table.branch_count))


def eigenvalue_at(table, branch, value):
    '''Eigenvalue of the given branch at value.'''
    _check_branch(table, branch)
    return complex(table.transformed(value)[branch, branch])


def trace_residual(table, value):
    '''Relative difference between the summed branch eigenvalues and the
    trace of T(value).'''
    trace = np.trace(build_transfer(table.params, value).entries)
    total = np.sum(table.values_at(value))
    scale = max(np.max(np.abs(table.values_at(value))), abs(trace))
    return float(abs(total - trace) / scale)


def branch_order(eigenvalues):
    '''Indices sorting by descending magnitude, ties broken by descending
    real then imaginary part.'''
    magnitude = np.round(np.abs(eigenvalues), 10)
    return np.lexsort((-eigenvalues.imag, -eigenvalues.real, -magnitude))


def _minimum_gap(eigenvalues):
    scale = np.max(np.abs(eigenvalues))
    if scale == 0:
        return 0.0
    if len(eigenvalues) < 2:
        return 1.0
    distances = np.abs(eigenvalues[:, None] - eigenvalues[None, :])
    distances[np.diag_indices(len(eigenvalues))] = np.inf
    return float(np.min(distances) / scale)


def diagonalize(params, reference=DEFAULT_REFERENCE, shift=DEFAULT_SHIFT,
        attempts=DEFAULT_ATTEMPTS, condition_limit=DEFAULT_CONDITION_LIMIT,
        max_length=DEFAULT_MAX_DENSE_LENGTH):
    '''Diagonalize T at the reference point, shifting it until the spectrum
    is simple and the eigenvector matrix is well conditioned.'''
    point = complex(reference)
    for attempt in range(attempts):
        matrix = build_transfer(params, point, max_length).entries
        (eigenvalues, vectors) = scipy.linalg.eig(matrix)
        condition = np.linalg.cond(vectors)
        gap = _minimum_gap(eigenvalues)
        if np.isfinite(condition) and condition <= condition_limit and \
                gap > DEGENERACY_GAP:
            order = branch_order(eigenvalues)
            LOG.debug(_('Diagonalized L=%d at %s, condition %.3e'),
                params.L, point, condition)
            return SpectrumTable(params, point, eigenvalues[order],
                vectors[:, order], float(condition))
        LOG.info(_('Rejected reference point %s (attempt %d): condition '
            '%.3e, gap %.3e'), point, attempt + 1, condition, gap)
        point += complex(shift)
    raise DegenerateSpectrum(_('No usable reference point after %d attempts '
        'for %r') % (attempts, params))


def diagonalize_with(core, params):
    '''Diagonalize using the configured reference point settings.'''
    section = __name__
    return diagonalize(params,
        reference=model.to_complex(core.get_config(section,
            'reference_point')),
        shift=model.to_complex(core.get_config(section, 'reference_shift')),
        attempts=core.get_config(section, 'reference_attempts'),
        condition_limit=core.get_config(section, 'condition_limit'),
        max_length=core.get_config(section, 'max_dense_length'))
