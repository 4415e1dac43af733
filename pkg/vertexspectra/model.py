'''Model parameters, spectral points, vertex weights and the index subset
conventions shared by the other modules.

Indices are 0-based throughout: inhomogeneities are mu[0..L-1] and spectral
parameters are lambda[0..L-1].'''

import cmath
import enum
import itertools
import logging
import math

import vertexspectra

DEFAULT_SEPARATION = 1e-3

CONFIG_OPTIONS = {
    'separation': vertexspectra.Option(DEFAULT_SEPARATION,
        _('Smallest allowed |sinh(x - y)| between distinct spectral '
        'parameters and between distinct inhomogeneities.')),
    'strict': vertexspectra.Option(True,
        _('Reject parameters that fail the separation guard.'))}

LOG = logging.getLogger(__name__)


class SeparationError(vertexspectra.NumericalError):
    '''Exception raised when two parameters are closer than the separation
    tolerance allows.'''

    code = 'SEPARATION'


def to_complex(value):
    '''Convert a [re, im] pair, a number or a string to a complex.'''
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise vertexspectra.PreconditionError(
                _('Complex values are given as [re, im]: %r') % (value,))
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(' ', ''))
    return complex(value)


def to_pair(value):
    '''Convert a complex to its [re, im] serialized form.'''
    value = complex(value)
    return [value.real, value.imag]


def check_separation(values, separation, what):
    '''Raise SeparationError if two of the values are too close.'''
    for (first, second) in itertools.combinations(range(len(values)), 2):
        distance = abs(cmath.sinh(values[first] - values[second]))
        if distance < separation:
            raise SeparationError(_('%s[%d] and %s[%d] are too close: '
                '|sinh(difference)|=%.3e') % (what, first, what, second,
                distance))


class ModelParams(object):
    '''Lattice length, anisotropy and inhomogeneities. Not modified after
    construction.'''

    def __init__(self, L, gamma, mu, strict=True,
            separation=DEFAULT_SEPARATION):
        if int(L) != L or L < 1:
            raise vertexspectra.PreconditionError(
                _('Lattice length must be a positive integer: %r') % (L,))
        mu = tuple(to_complex(value) for value in mu)
        if len(mu) != L:
            raise vertexspectra.PreconditionError(
                _('Expected %d inhomogeneities, got %d') % (L, len(mu)))
        self.L = int(L)
        self.gamma = to_complex(gamma)
        self.mu = mu
        self.strict = strict
        self.separation = separation
        if strict:
            check_separation(self.mu, separation, 'mu')

    def __repr__(self):
        return 'ModelParams(L=%d, gamma=%r, mu=%r)' % (self.L, self.gamma,
            self.mu)

    def replace(self, **kwargs):
        '''Return a copy with some fields replaced.'''
        fields = dict(L=self.L, gamma=self.gamma, mu=self.mu,
            strict=self.strict, separation=self.separation)
        fields.update(kwargs)
        return ModelParams(**fields)


class SpectralPoints(object):
    '''Ordered spectral parameters lambda[0..L-1] for a model.'''

    def __init__(self, params, values):
        values = tuple(to_complex(value) for value in values)
        if len(values) != params.L:
            raise vertexspectra.PreconditionError(
                _('Expected %d spectral parameters, got %d') % (params.L,
                len(values)))
        self.values = values
        if params.strict:
            check_separation(values, params.separation, 'lambda')

    def __len__(self):
        return len(self.values)

    def __getitem__(self, index):
        return self.values[index]

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        return 'SpectralPoints(%r)' % (self.values,)


def weight_a(value, params):
    '''a(lambda) = sinh(lambda + gamma).'''
    return cmath.sinh(value + params.gamma)


def weight_b(value):
    '''b(lambda) = sinh(lambda).'''
    return cmath.sinh(value)


def weight_c(params):
    '''c = sinh(gamma), constant in lambda.'''
    return cmath.sinh(params.gamma)


def vertex_weights(params, value):
    '''Return (a, b, c) at the spectral difference value.'''
    return (weight_a(value, params), weight_b(value), weight_c(params))


class GroundSet(enum.Enum):
    '''Index ranges that subsets are drawn from.'''

    FULL = 'full'
    TAIL = 'tail'

    def indices(self, L):
        '''Sorted indices of the ground set for a lattice of length L.'''
        if self is GroundSet.FULL:
            return tuple(range(L))
        return tuple(range(1, L))


FULL = GroundSet.FULL
TAIL = GroundSet.TAIL


class IndexSubset(object):
    '''Sorted tuple of indices removed from a ground set.'''

    def __init__(self, removed, ground, L):
        removed = tuple(removed)
        ground_indices = ground.indices(L)
        if any(first >= second for (first, second) in
                zip(removed, removed[1:])):
            raise vertexspectra.PreconditionError(
                _('Removed indices must be strictly increasing: %r') %
                (removed,))
        for index in removed:
            if index not in ground_indices:
                raise vertexspectra.PreconditionError(
                    _('Index %d is not in the %s ground set of length %d') %
                    (index, ground.value, L))
        self.removed = removed
        self.ground = ground
        self.L = L

    def __eq__(self, other):
        return isinstance(other, IndexSubset) and \
            (self.removed, self.ground, self.L) == \
            (other.removed, other.ground, other.L)

    def __hash__(self):
        return hash((self.removed, self.ground, self.L))

    def __repr__(self):
        return 'IndexSubset(%r, %s, %d)' % (self.removed, self.ground.name,
            self.L)

    def complement(self):
        '''Ground set indices not removed, in increasing order.'''
        return tuple(index for index in self.ground.indices(self.L)
            if index not in self.removed)


def ordered_complement(subset, points):
    '''Spectral parameters at the indices the subset keeps, in increasing
    index order.'''
    if len(points) != subset.L:
        raise vertexspectra.PreconditionError(
            _('Subset is for length %d, points have length %d') %
            (subset.L, len(points)))
    return tuple(points[index] for index in subset.complement())


def subset_rank(subset):
    '''Lexicographic rank of the removed tuple among subsets of the same
    size of its ground set.'''
    ground = subset.ground.indices(subset.L)
    positions = [ground.index(index) for index in subset.removed]
    size = len(positions)
    n = len(ground)
    rank = 0
    previous = -1
    for (slot, position) in enumerate(positions):
        for skipped in range(previous + 1, position):
            rank += math.comb(n - skipped - 1, size - slot - 1)
        previous = position
    return rank


def subset_unrank(ground, size, rank, L):
    '''Inverse of subset_rank.'''
    indices = ground.indices(L)
    n = len(indices)
    if size < 0 or size > n:
        raise vertexspectra.PreconditionError(
            _('Subset size %d out of range for %d indices') % (size, n))
    total = math.comb(n, size)
    if rank < 0 or rank >= total:
        raise vertexspectra.PreconditionError(
            _('Rank %d out of range [0, %d)') % (rank, total))
    removed = []
    position = 0
    for slot in range(size):
        while True:
            count = math.comb(n - position - 1, size - slot - 1)
            if rank < count:
                break
            rank -= count
            position += 1
        removed.append(indices[position])
        position += 1
    return IndexSubset(removed, ground, L)
