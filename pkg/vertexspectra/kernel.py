'''Coefficient functions M_i^(n) and N_{j,i}^(n) of the functional equations.

Both take an ordered argument tuple (lambda_0, ..., lambda_n) and are
accumulated term by term as products of the a/b/c weights, without
rearranging onto a common denominator.'''

import cmath

import vertexspectra
from vertexspectra import model


class PoleProximity(model.SeparationError):
    '''Exception raised when a kernel denominator is within the separation
    tolerance of zero.'''

    code = 'POLE_PROXIMITY'


def _check_args(params, args, n):
    if len(args) != n + 1:
        raise vertexspectra.PreconditionError(
            _('Kernel of order %d takes %d arguments, got %d') % (n, n + 1,
            len(args)))
    if n > params.L:
        raise vertexspectra.PreconditionError(
            _('Kernel order %d exceeds lattice length %d') % (n, params.L))


def _divide(numerator, denominator, params, what):
    if abs(denominator) < params.separation:
        raise PoleProximity(_('%s denominator too close to zero: %.3e') %
            (what, abs(denominator)))
    return numerator / denominator


def _ratio(params, left, right):
    '''a(left - right) / b(left - right).'''
    difference = left - right
    return _divide(model.weight_a(difference, params),
        model.weight_b(difference), params, 'b')


def _mu_product(params, q, p):
    '''prod_l a(q - mu_l) b(p - mu_l).'''
    product = 1
    for mu in params.mu:
        product *= model.weight_a(q - mu, params) * model.weight_b(p - mu)
    return product


def _chain_product(params, args, p, q, skip):
    '''prod over k not in skip of a(p - k)/b(p - k) * a(k - q)/b(k - q).'''
    product = 1
    for (index, value) in enumerate(args):
        if index in skip:
            continue
        product *= _ratio(params, p, value) * _ratio(params, value, q)
    return product


def _m_term(params, args, p_index, q_index, i):
    p = args[p_index]
    q = args[q_index]
    c = model.weight_c(params)
    term = _divide(c, model.weight_b(p - q), params, 'b')
    term *= _chain_product(params, args, p, q, (0, i))
    return term * _mu_product(params, q, p)


def coeff_M(params, n, i, args):
    '''M_i^(n)(lambda_0, ..., lambda_n) for 1 <= i <= n.'''
    _check_args(params, args, n)
    if not 1 <= i <= n:
        raise vertexspectra.PreconditionError(
            _('M index %d out of range 1..%d') % (i, n))
    return _m_term(params, args, i, 0, i) + _m_term(params, args, 0, i, i)


def _n_term(params, args, p_index, q_index, i, j):
    p = args[p_index]
    q = args[q_index]
    first = args[0]
    c = model.weight_c(params)
    term = _divide(c, model.weight_a(p - first, params), params, 'a')
    term *= _divide(c, model.weight_a(first - q, params), params, 'a')
    term *= _ratio(params, p, q)
    term *= _chain_product(params, args, p, q, (i, j))
    return term * _mu_product(params, q, p)


def coeff_N(params, n, j, i, args):
    '''N_{j,i}^(n)(lambda_0, ..., lambda_n) for 1 <= i < j <= n.'''
    _check_args(params, args, n)
    if not 1 <= i < j <= n:
        raise vertexspectra.PreconditionError(
            _('N indices (%d, %d) out of range 1 <= i < j <= %d') % (j, i, n))
    return _n_term(params, args, j, i, i, j) + \
        _n_term(params, args, i, j, i, j)


def m11_closed_form(params, first, second):
    '''Pole free form of M_1^(1)(first, second), valid for L = 2.'''
    if params.L != 2:
        raise vertexspectra.PreconditionError(
            _('The closed form of M_1^(1) holds for L = 2 only'))
    gamma = params.gamma
    total = cmath.cosh(first - second + gamma) + \
        cmath.cosh(second - first + gamma)
    for mu in params.mu:
        total -= cmath.cosh(first + second + gamma - 2 * mu)
    return -cmath.sinh(gamma) ** 2 / 2 * total
