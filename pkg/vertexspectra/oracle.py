'''Independent evaluators of the domain wall partition function Z.

Rows are labelled by the spectral parameters lambda[0..L-1] and columns by
the inhomogeneities mu[0..L-1]. The vertex in row i and column j carries the
weights of lambda[i] - mu[j]. Row 0 is the first row operator applied to the
all up reference state.'''

import cmath
import enum
import itertools
import logging

import numpy as np
import scipy.linalg

import vertexspectra
from vertexspectra import kernel
from vertexspectra import model
from vertexspectra import spectral
from vertexspectra import transfer

MAX_ENUMERATION_LENGTH = 6
MAX_CONTRACTION_LENGTH = 12

LOG = logging.getLogger(__name__)


class SingularDenominator(vertexspectra.NumericalError):
    '''Exception raised when a determinant formula hits a vanishing
    denominator.'''

    code = 'SINGULAR_DENOMINATOR'


class Method(enum.Enum):
    '''How an oracle value was computed.'''

    ENUMERATION = 'enumeration'
    CONTRACTION = 'contraction'
    IZERGIN = 'izergin'
    CLOSED_FORM_L2 = 'closed_form_l2'
    CLOSED_FORM_L3_HOM = 'closed_form_l3_hom'
    DIAGONAL = 'diagonal'


class OracleResult(object):
    '''Value of Z along with the method and cost counters.'''

    def __init__(self, value, method, cost=None):
        value = complex(value)
        if not cmath.isfinite(value):
            raise vertexspectra.NumericalError(
                _('%s produced a non-finite value') % method.value)
        self.value = value
        self.method = method
        self.cost = cost or {}

    def __repr__(self):
        return 'OracleResult(%r, %s)' % (self.value, self.method.name)


def _check_length(params, points, limit, what):
    if params.L > limit:
        raise vertexspectra.PreconditionError(
            _('%s limited to L <= %d, got %d') % (what, limit, params.L))
    if len(points) != params.L:
        raise vertexspectra.PreconditionError(
            _('Expected %d spectral parameters, got %d') % (params.L,
            len(points)))


def _row_weight(before, after, factors):
    '''Weight of one row taking the vertical edges from before to after, or
    0 if no horizontal completion exists. The auxiliary arrow enters the row
    pointing down and must leave it pointing up.'''
    aux_up = False
    weight = 1
    for (site, (a, b, c)) in enumerate(factors):
        was_down = bool(before >> site & 1)
        now_down = bool(after >> site & 1)
        if was_down == now_down:
            weight *= a if aux_up != was_down else b
        elif aux_up == was_down:
            aux_up = not aux_up
            weight *= c
        else:
            return 0
    return weight if aux_up else 0


def z_enumerate(params, points, weights=None):
    '''Sum the weights of all domain wall configurations. After row r
    exactly r + 1 vertical arrows below the row point down.

    weights, if given, is called as weights(row, column, difference) and
    returns the (a, b, c) triple used for that vertex.'''
    _check_length(params, points, MAX_ENUMERATION_LENGTH, _('Enumeration'))
    L = params.L
    if weights is None:
        weights = lambda row, column, difference: \
            model.vertex_weights(params, difference)
    masks = [[] for _size in range(L + 1)]
    for mask in range(2 ** L):
        masks[bin(mask).count('1')].append(mask)
    transitions = []
    for row in range(L):
        factors = [weights(row, column, points[row] - params.mu[column])
            for column in range(L)]
        table = {}
        for before in masks[row]:
            table[before] = [(after, weight) for (after, weight) in
                ((after, _row_weight(before, after, factors))
                    for after in masks[row + 1]) if weight != 0]
        transitions.append(table)
    cost = {'configurations': 0}

    def descend(row, mask, weight):
        if row == L:
            cost['configurations'] += 1
            return weight
        return sum(descend(row + 1, after, weight * step)
            for (after, step) in transitions[row][mask])

    value = descend(0, 0, 1)
    return OracleResult(value, Method.ENUMERATION, cost)


def z_contract(params, points):
    '''Apply the row operators B(lambda_{L-1}) ... B(lambda_0) to the all up
    state and project on the all down state.'''
    _check_length(params, points, MAX_CONTRACTION_LENGTH, _('Contraction'))
    state = np.zeros(2 ** params.L, dtype=complex)
    state[0] = 1
    for value in points:
        state = transfer.apply_row(params, value, state)
    return OracleResult(state[-1], Method.CONTRACTION,
        {'row_applications': params.L})


def _guarded(value, params, what):
    if abs(value) < params.separation:
        raise SingularDenominator(_('%s too close to zero: %.3e') % (what,
            abs(value)))
    return value


def z_izergin(params, points):
    '''Izergin-Korepin determinant.'''
    _check_length(params, points, MAX_CONTRACTION_LENGTH, _('Determinant'))
    L = params.L
    c = model.weight_c(params)
    matrix = np.empty((L, L), dtype=complex)
    prefactor = 1
    for (i, j) in itertools.product(range(L), repeat=2):
        difference = points[i] - params.mu[j]
        product = _guarded(model.weight_a(difference, params), params,
            'a(lambda_%d - mu_%d)' % (i, j))
        product *= _guarded(model.weight_b(difference), params,
            'b(lambda_%d - mu_%d)' % (i, j))
        matrix[i, j] = c / product
        prefactor *= product
    for (i, j) in itertools.combinations(range(L), 2):
        prefactor /= _guarded(model.weight_b(points[i] - points[j]), params,
            'b(lambda_%d - lambda_%d)' % (i, j))
        prefactor /= _guarded(model.weight_b(params.mu[j] - params.mu[i]),
            params, 'b(mu_%d - mu_%d)' % (j, i))
    return OracleResult(prefactor * scipy.linalg.det(matrix), Method.IZERGIN,
        {'dimension': L})


def z_izergin_limit(params, points, epsilon=1e-3, levels=3):
    '''Izergin-Korepin determinant in the limit of points approaching
    singular values. The mean over symmetric offsets is even in the offset
    size, so it is Richardson extrapolated over the sizes epsilon,
    epsilon / 2, ..., epsilon / 2^(levels - 1).'''
    if levels < 1:
        raise vertexspectra.PreconditionError(
            _('Extrapolation needs at least one level, got %d') % levels)
    direction = [(index + 1) * complex(0.6, 0.8)
        for index in range(params.L)]
    smallest = epsilon / 2 ** (levels - 1)
    relaxed = params.replace(strict=False, separation=smallest / 100)

    def symmetric_mean(size):
        total = 0
        for sign in (1, -1):
            shifted = model.SpectralPoints(relaxed, [value + sign * size *
                offset for (value, offset) in zip(points, direction)])
            total += z_izergin(relaxed, shifted).value
        return total / 2

    table = [symmetric_mean(epsilon / 2 ** level) for level in range(levels)]
    for order in range(1, levels):
        factor = 4 ** order
        table = [(factor * finer - coarser) / (factor - 1)
            for (coarser, finer) in zip(table, table[1:])]
    return OracleResult(table[0], Method.IZERGIN, {'dimension': params.L,
        'evaluations': 2 * levels})


def z2_closed_form(params, points):
    '''Closed form of Z for L = 2.'''
    if params.L != 2:
        raise vertexspectra.PreconditionError(
            _('The two site closed form needs L = 2, got %d') % params.L)
    (lam0, lam1) = points
    (mu0, mu1) = params.mu
    a = lambda value: model.weight_a(value, params)
    b = model.weight_b
    c = model.weight_c(params)
    value = c ** 2 * (b(lam0 - mu0) * b(lam1 - mu1) +
        a(lam0 - mu1) * a(lam1 - mu0))
    return OracleResult(value, Method.CLOSED_FORM_L2)


def z3_homogeneous(params, points):
    '''Closed form of Z for L = 3 with all inhomogeneities zero.'''
    if params.L != 3 or any(abs(mu) > 1e-14 for mu in params.mu):
        raise vertexspectra.PreconditionError(
            _('The homogeneous closed form needs L = 3 and mu = 0'))
    (a0, a1, a2) = [model.weight_a(value, params) for value in points]
    (b0, b1, b2) = [model.weight_b(value) for value in points]
    c = model.weight_c(params)
    value = c ** 3 * (c ** 2 * a0 * a2 * b0 * b2 +
        a0 * a1 * b0 * b1 * b2 ** 2 +
        a0 * a1 * a2 ** 2 * b0 * b1 +
        a1 * a2 * b0 ** 2 * b1 * b2 +
        a0 ** 2 * a1 * a2 * b1 * b2 +
        a0 ** 2 * a1 ** 2 * a2 ** 2 +
        b0 ** 2 * b1 ** 2 * b2 ** 2)
    return OracleResult(value, Method.CLOSED_FORM_L3_HOM)


def diagonal_z(params):
    '''Z at lambda_i = mu_i, where a single configuration contributes.'''
    value = model.weight_c(params) ** params.L
    for (i, j) in itertools.combinations(range(params.L), 2):
        difference = params.mu[i] - params.mu[j]
        value *= model.weight_a(difference, params) * \
            model.weight_a(-difference, params)
    return OracleResult(value, Method.DIAGONAL)


def homogeneous_z2(params, value, eigenvalue):
    '''Z(value, value) for L = 2 from the eigenvalue function of one branch,
    using the pole free form of M_1^(1).'''
    if params.L != 2:
        raise vertexspectra.PreconditionError(
            _('The homogeneous formula needs L = 2, got %d') % params.L)
    kappa = spectral.kappa0_value(params, eigenvalue)
    return kappa * (eigenvalue(value) ** 2 -
        kernel.m11_closed_form(params, value, value))


KOREPIN_FORMS = ('pinned', 'full_product', 'a_products', 'negated_pinned',
    'negated_full_product', 'negated_a_products')


def specialize(params, points, i, j):
    '''Return points with lambda_i set to mu_j - gamma.'''
    values = list(points)
    values[i] = params.mu[j] - params.gamma
    return model.SpectralPoints(params, values)


def korepin_prefactor(params, points, i, j, form='pinned'):
    '''Factor relating Z_L at lambda_i = mu_j - gamma to Z_{L-1} without
    lambda_i and mu_j.'''
    if form not in KOREPIN_FORMS:
        raise vertexspectra.PreconditionError(
            _('Unknown prefactor form: %s') % form)
    sign = -1 if form.startswith('negated_') else 1
    form = form.replace('negated_', '')
    c = model.weight_c(params)
    L = params.L
    if form == 'full_product':
        value = -c
        for (l, m) in itertools.product(range(L), repeat=2):
            value *= model.weight_b(points[l] - params.mu[i]) * \
                model.weight_b(points[m] - params.mu[j])
        return sign * value
    weight = model.weight_b if form == 'pinned' else \
        (lambda difference: model.weight_a(difference, params))
    value = c
    for k in range(L):
        if k != j:
            value *= weight(points[i] - params.mu[k])
        if k != i:
            value *= weight(points[k] - params.mu[j])
    return sign * value


def reduce_model(params, points, i, j):
    '''Model and points of length L - 1 without lambda_i and mu_j.'''
    reduced = model.ModelParams(params.L - 1, params.gamma,
        [mu for (index, mu) in enumerate(params.mu) if index != j],
        strict=params.strict, separation=params.separation)
    return (reduced, model.SpectralPoints(reduced,
        [value for (index, value) in enumerate(points) if index != i]))


def korepin_residuals(params, points, i, j, forms=KOREPIN_FORMS,
        oracle=z_contract):
    '''Relative residuals of the recurrence Z_L = factor * Z_{L-1} at
    lambda_i = mu_j - gamma, one per prefactor form.'''
    if params.L < 2:
        raise vertexspectra.PreconditionError(
            _('The recurrence needs L >= 2, got %d') % params.L)
    if not (0 <= i < params.L and 0 <= j < params.L):
        raise vertexspectra.PreconditionError(
            _('Indices (%d, %d) out of range') % (i, j))
    target = params.mu[j] - params.gamma
    if abs(points[i] - target) > 1e-12 * max(1.0, abs(target)):
        raise vertexspectra.PreconditionError(
            _('lambda_%d must equal mu_%d - gamma') % (i, j))
    factors = dict((form, korepin_prefactor(params, points, i, j, form))
        for form in forms)
    full = oracle(params, points).value
    if full == 0:
        raise SingularDenominator(_('Z vanishes at the specialized point'))
    (reduced, remaining) = reduce_model(params, points, i, j)
    smaller = oracle(reduced, remaining).value
    return dict((form, abs(full - factor * smaller) / abs(full))
        for (form, factor) in factors.items())


def korepin_residual(params, points, i, j, form='pinned', oracle=z_contract):
    '''Recurrence residual for a single prefactor form.'''
    return korepin_residuals(params, points, i, j, (form,), oracle)[form]


def pin_korepin_prefactor(params, points, i, j, tolerance=1e-9):
    '''Try every prefactor form against the enumeration oracle and return
    the first that satisfies the recurrence, with all residuals.'''
    residuals = korepin_residuals(params, points, i, j, oracle=z_enumerate)
    for form in KOREPIN_FORMS:
        if residuals[form] < tolerance:
            LOG.debug(_('Pinned recurrence prefactor %s at L=%d'), form,
                params.L)
            return (form, residuals)
    return (None, residuals)
