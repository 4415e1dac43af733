'''Determinant representation of the partition function, Z = kappa0 det(H).

The unknowns of the functional equations are F_n evaluated on subsets of
the spectral parameters. They are grouped into levels m = L, ..., 2. A
level-m unknown keeps L - m of the parameters: for even m its removed
indices are drawn from all of 0..L-1, for odd m from 1..L-1 only. Within a
level, unknowns follow the lexicographic order of their removed indices,
and the levels are laid out left to right from m = L down to m = 2.'''

import itertools
import logging
import math

import numpy as np
import scipy.linalg

import vertexspectra
from vertexspectra import kernel
from vertexspectra import model
from vertexspectra import transfer

ZERO_TOLERANCE = 1e-12

LOG = logging.getLogger(__name__)


class EigenvalueZeroAtMu(vertexspectra.NumericalError):
    '''Exception raised when a branch eigenvalue vanishes at an
    inhomogeneity, leaving kappa0 undefined.'''

    code = 'EIGENVALUE_ZERO_AT_MU'


def level_count(L, m):
    '''Number of unknowns at level m.'''
    if m % 2 == 0:
        return math.comb(L, m)
    return math.comb(L - 1, m - 1)


def bracket(L, m):
    '''[m], the size of the negative identity block in block row m.'''
    return level_count(L, m - 1)


def brace(L, m, k):
    '''{m;k}, the size of the k-th stacked identity block of block row m.'''
    return math.comb(L - k, m - k)


class Level(object):
    '''Unknowns of one level, as kept index tuples.'''

    def __init__(self, L, m, offset):
        self.m = m
        self.ground = model.FULL if m % 2 == 0 else model.TAIL
        self.removed_size = m if m % 2 == 0 else m - 1
        count = level_count(L, m)
        self.subsets = [model.subset_unrank(self.ground, self.removed_size,
            rank, L) for rank in range(count)]
        self.kept = [subset.complement() for subset in self.subsets]
        self.offset = offset

    def __len__(self):
        return len(self.kept)


class VariableLayout(object):
    '''Column layout of the unknowns for a lattice of length L.'''

    def __init__(self, L):
        self.L = L
        self.levels = []
        self.columns = {}
        offset = 0
        for m in range(L, 1, -1):
            level = Level(L, m, offset)
            for (position, kept) in enumerate(level.kept):
                self.columns[kept] = offset + position
            self.levels.append(level)
            offset += len(level)
        self.size = offset

    def level(self, m):
        '''The level with the given m.'''
        return self.levels[self.L - m]

    def column(self, kept):
        '''Column of the unknown keeping the given sorted indices.'''
        return self.columns[tuple(kept)]

    def level_of_column(self, column):
        '''m of the level holding the column.'''
        for level in self.levels:
            if level.offset <= column < level.offset + len(level):
                return level.m
        raise IndexError(column)


def build_layout(L):
    '''Layout of the unknowns, of total size 3 * 2^(L-2) - 2.'''
    if L < 3:
        raise vertexspectra.PreconditionError(
            _('The block layout needs L >= 3, got %d') % L)
    return VariableLayout(L)


def _without(indices, *drop):
    return tuple(index for index in indices if index not in drop)


class HBuilder(object):
    '''Entries of H for one model and set of spectral points, shared by all
    eigenvalue branches. Each entry is stored as a coefficient times a
    product of eigenvalues at the listed spectral parameter indices.'''

    def __init__(self, params, points):
        self.params = params
        self.points = points
        self.layout = build_layout(params.L)
        self.entries = []
        self._add_equation_rows()
        self._add_final_row()
        LOG.debug(_('Assembled %d entries for H of dimension %d'),
            len(self.entries), self.layout.size)

    @property
    def dim(self):
        return self.layout.size

    def _add(self, row, kept, coeff, factors=()):
        self.entries.append((row, self.layout.column(kept), coeff, factors))

    def _add_kernels(self, row, indices, scale, factors=()):
        '''Add -M and -N terms of the equation whose arguments are the
        parameters at the given indices, the first one playing lambda_0.'''
        n = len(indices) - 1
        args = [self.points[index] for index in indices]
        for i in range(1, n + 1):
            self._add(row, _without(indices, indices[0], indices[i]),
                -scale * kernel.coeff_M(self.params, n, i, args), factors)
        for (i, j) in itertools.combinations(range(1, n + 1), 2):
            self._add(row, _without(indices, indices[i], indices[j]),
                -scale * kernel.coeff_N(self.params, n, j, i, args), factors)

    def _add_equation_rows(self):
        row = 0
        for level in self.layout.levels[1:]:
            for kept in level.kept:
                self._add(row, kept[1:], 1, (kept[0],))
                self._add(row, kept, -1)
                self._add_kernels(row, kept, 1)
                row += 1

    def _add_final_row(self):
        L = self.params.L
        row = self.dim - 1
        self._add(row, tuple(range(2, L)), 1, (0, 1))
        self._add_kernels(row, tuple(range(L)), 1)
        self._add_kernels(row, tuple(range(1, L)), 1, (0,))

    def matrices(self, eigenvalues):
        '''H for every branch given eigenvalues[i, k], the eigenvalue of
        branch k at lambda_i. Returns an array of shape (branches, dim,
        dim).'''
        eigenvalues = np.asarray(eigenvalues, dtype=complex)
        result = np.zeros((eigenvalues.shape[1], self.dim, self.dim),
            dtype=complex)
        for (row, column, coeff, factors) in self.entries:
            value = np.full(eigenvalues.shape[1], coeff, dtype=complex)
            for factor in factors:
                value = value * eigenvalues[factor]
            result[:, row, column] += value
        return result


class HMatrix(object):
    '''H for one eigenvalue branch.'''

    def __init__(self, entries, branch, layout):
        self.entries = entries
        self.branch = branch
        self.layout = layout
        self.condition = float(np.linalg.cond(entries))

    @property
    def dim(self):
        return self.entries.shape[0]


def branch_eigenvalues(spectrum, points):
    '''Array of eigenvalues [i, k] of branch k at lambda_i.'''
    return np.array([spectrum.values_at(value) for value in points])


def build_H(params, points, spectrum, branch, builder=None):
    '''Assemble H for one eigenvalue branch.'''
    transfer.eigenvalue_at(spectrum, branch, points[0])
    builder = builder or HBuilder(params, points)
    eigenvalues = np.array([[transfer.eigenvalue_at(spectrum, branch, value)]
        for value in points])
    return HMatrix(builder.matrices(eigenvalues)[0], branch, builder.layout)


def _powers_of_two(magnitudes):
    '''Powers of two nearest above the magnitudes, 1 for zeros.'''
    (_mantissa, exponents) = np.frexp(magnitudes)
    return np.where(magnitudes > 0, exponents, 0)


def equilibrate(matrix, sweeps=3):
    '''Scale rows and columns by powers of two until their largest entries
    are of order one. Returns the scaled matrix and the base two logarithm
    of the factor its determinant was divided by.'''
    scaled = np.array(matrix, dtype=complex)
    exponent = 0
    for _sweep in range(sweeps):
        rows = _powers_of_two(np.max(np.abs(scaled), axis=1))
        scaled *= np.ldexp(1.0, -rows)[:, None]
        columns = _powers_of_two(np.max(np.abs(scaled), axis=0))
        scaled *= np.ldexp(1.0, -columns)[None, :]
        exponent += int(np.sum(rows)) + int(np.sum(columns))
    return (scaled, exponent)


def _scale(value, exponent):
    return complex(np.ldexp(value.real, exponent),
        np.ldexp(value.imag, exponent))


def determinant(matrix):
    '''Determinant through LU factorization with partial pivoting of the
    equilibrated matrix.'''
    (scaled, exponent) = equilibrate(matrix)
    (lu, pivots) = scipy.linalg.lu_factor(scaled, check_finite=False)
    swaps = np.count_nonzero(pivots != np.arange(len(pivots)))
    return _scale(complex(np.prod(np.diag(lu)) * (-1) ** swaps), exponent)


def has_superdiagonal_form(matrices):
    '''True if every row but the last has a nonzero superdiagonal entry and
    nothing to the right of it.'''
    matrices = np.asarray(matrices)
    dim = matrices.shape[-1]
    upper = np.triu(np.ones((dim, dim), dtype=bool), 2)
    upper[-1] = False
    superdiagonal = matrices[..., np.arange(dim - 1), np.arange(1, dim)]
    return bool(np.all(matrices[..., upper] == 0) and
        np.all(superdiagonal != 0))


def superdiagonal_determinants(matrices):
    '''Determinants of a stack of matrices in superdiagonal form, by
    solving the first dim - 1 rows for x with x_0 = 1 and expanding along
    the last row.'''
    matrices = np.asarray(matrices, dtype=complex)
    dim = matrices.shape[-1]
    solution = np.zeros(matrices.shape[:-1], dtype=complex)
    solution[:, 0] = 1
    for row in range(dim - 1):
        known = np.sum(matrices[:, row, :row + 1] * solution[:, :row + 1],
            axis=1)
        solution[:, row + 1] = -known / matrices[:, row, row + 1]
    last = np.sum(matrices[:, -1] * solution, axis=1)
    superdiagonal = np.prod(matrices[:, np.arange(dim - 1),
        np.arange(1, dim)], axis=1)
    return (-1) ** (dim - 1) * superdiagonal * last


def check_structure(H, eigenvalues):
    '''Compare an assembled H against the block formulas. eigenvalues[i] is
    the branch eigenvalue at lambda_i. Returns the largest deviation of the
    negative identity blocks, the stacked identity blocks and the block
    sparsity, each relative to the largest entry of H.'''
    layout = H.layout
    L = layout.L
    matrix = H.entries
    scale = np.max(np.abs(matrix))
    plus = max(abs(matrix[row, row + 1] + 1) for row in range(H.dim - 1))
    stacked = 0.0
    sparsity = 0.0
    for row in range(H.dim):
        block_row = 2 if row == H.dim - 1 else \
            layout.level_of_column(row + 1) + 1
        allowed = set([block_row - 1, block_row, block_row + 1])
        for column in np.nonzero(matrix[row])[0]:
            if layout.level_of_column(column) not in allowed:
                sparsity = max(sparsity, abs(matrix[row, column]))
    for m in range(L, 2, -1):
        level = layout.level(m)
        row = layout.level(m - 1).offset - 1
        last = 2 if m % 2 == 0 else 1
        for k in range(m, last - 1, -1):
            size = brace(L, m, k)
            expected = np.zeros((size, len(level)), dtype=complex)
            expected[:, :size] = eigenvalues[k - 1] * np.eye(size)
            block = matrix[row:row + size, level.offset:level.offset +
                len(level)]
            stacked = max(stacked, np.max(np.abs(block - expected)))
            row += size
    return {'plus': float(plus / scale), 'stacked': float(stacked / scale),
        'sparsity': float(sparsity / scale)}


def kappa0_value(params, eigenvalue, zero_tolerance=ZERO_TOLERANCE):
    '''kappa0 from an eigenvalue function of one branch.'''
    value = model.weight_c(params) ** params.L
    for (i, j) in itertools.combinations(range(params.L), 2):
        difference = params.mu[i] - params.mu[j]
        value *= model.weight_a(difference, params) * \
            model.weight_a(-difference, params)
    for (index, mu) in enumerate(params.mu):
        at_mu = eigenvalue(mu)
        if abs(at_mu) < zero_tolerance:
            raise EigenvalueZeroAtMu(_('Eigenvalue vanishes at mu_%d') %
                index)
        value /= at_mu
    return complex(value)


def kappa0(params, spectrum, branch):
    '''kappa0 = c^L prod a(mu_i - mu_j) a(mu_j - mu_i) / prod Lambda(mu_i).'''
    return kappa0_value(params,
        lambda value: transfer.eigenvalue_at(spectrum, branch, value))


class SpectralValue(object):
    '''kappa0, det H and their product Z for one branch.'''

    def __init__(self, branch, kappa, det, condition):
        self.branch = branch
        self.kappa0 = kappa
        self.det = det
        self.z = kappa * det
        self.condition = condition


def _two_site_matrices(params, points, eigenvalues):
    m11 = kernel.coeff_M(params, 1, 1, list(points))
    branches = eigenvalues.shape[1]
    result = np.empty((branches, 2, 2), dtype=complex)
    result[:, 0, 0] = eigenvalues[1]
    result[:, 0, 1] = 1
    result[:, 1, 0] = m11
    result[:, 1, 1] = eigenvalues[0]
    return result


def spectral_values(params, points, spectrum, branches=None):
    '''SpectralValue for each of the given branches, all by default.'''
    if params.L < 2:
        raise vertexspectra.PreconditionError(
            _('The determinant formula needs L >= 2, got %d') % params.L)
    if branches is None:
        branches = range(spectrum.branch_count)
    branches = list(branches)
    for branch in branches:
        transfer.eigenvalue_at(spectrum, branch, points[0])
    eigenvalues = branch_eigenvalues(spectrum, points)[:, branches]
    if params.L == 2:
        matrices = _two_site_matrices(params, points, eigenvalues)
    else:
        matrices = HBuilder(params, points).matrices(eigenvalues)
    if has_superdiagonal_form(matrices):
        determinants = superdiagonal_determinants(matrices)
    else:
        determinants = [determinant(matrix) for matrix in matrices]
    values = []
    for (branch, matrix, det) in zip(branches, matrices, determinants):
        values.append(SpectralValue(branch, kappa0(params, spectrum, branch),
            complex(det), float(np.linalg.cond(matrix))))
    return values


def spectral_value(params, points, spectrum, branch):
    '''SpectralValue of a single branch.'''
    return spectral_values(params, points, spectrum, [branch])[0]


def z_spectral(params, points, spectrum, branch):
    '''Z = kappa0 det(H) for the given branch.'''
    return spectral_value(params, points, spectrum, branch).z


def max_pairwise_deviation(values):
    '''Largest |v_k - v_l| over pairs, relative to the median magnitude.'''
    values = np.asarray(values, dtype=complex)
    if len(values) < 2:
        return 0.0
    scale = np.median(np.abs(values))
    spread = np.max(np.abs(values[:, None] - values[None, :]))
    if scale == 0:
        return float('inf') if spread else 0.0
    return float(spread / scale)


def branch_invariance(params, points, spectrum, branches=None):
    '''Deviation of kappa0 det(H) across eigenvalue branches.'''
    values = spectral_values(params, points, spectrum, branches)
    return max_pairwise_deviation([value.z for value in values])
