'''Verification commands: randomized residual battery, parameter sweeps,
spectrum tables and determinant values.'''

import itertools

import numpy as np
from gevent.threadpool import ThreadPool

import vertexspectra
from vertexspectra import chain
from vertexspectra import model
from vertexspectra import oracle
from vertexspectra import profile
from vertexspectra import report
from vertexspectra import spectral
from vertexspectra import transfer

DEFAULT_TOLERANCES = {
    'closedForm': 1e-10,
    'endToEnd': 1e-8,
    'oracle': 1e-10,
    'korepin': 1e-9,
    'commutator': 1e-10,
    'trace': 1e-9,
    'leakage': 1e-9,
    'symmetry': 1e-8}

DEFAULT_BOX = {
    'gamma': [[0.2, 1.2], [-0.5, 0.5]],
    'mu': [[-1.0, 1.0], [-0.5, 0.5]],
    'lambda': [[-1.0, 1.0], [-0.5, 0.5]]}

CONFIG_OPTIONS = {
    'L': vertexspectra.Option([3, 4, 5], _('Lattice lengths to verify.')),
    'trials': vertexspectra.Option(10,
        _('Random parameter points per lattice length.')),
    'seed': vertexspectra.Option(42, _('Seed of the random sampler.')),
    'tolerances': vertexspectra.Option(DEFAULT_TOLERANCES,
        _('Residual tolerances, merged over the defaults.')),
    'box': vertexspectra.Option(DEFAULT_BOX,
        _('Sampling box [[re_min, re_max], [im_min, im_max]] for gamma, mu '
        'and lambda.')),
    'strict': vertexspectra.Option(True,
        _('Resample points failing the separation guards. When off, such '
        'points are skipped and excluded from the verdict.')),
    'out': vertexspectra.Option(None,
        _('Report path, standard output if not set.')),
    'format': vertexspectra.Option('json', _('Report format: json or csv.')),
    'workers': vertexspectra.Option(4,
        _('Number of worker threads evaluating parameter points.')),
    'max_resample': vertexspectra.Option(20,
        _('Resampling cap for points failing guards or diagonalization.')),
    'chain_length': vertexspectra.Option(5,
        _('Largest L the functional chain checks run for.')),
    'ratio_batch': vertexspectra.Option(3,
        _('Number of point sets the F_L / Z ratio is compared over.')),
    'grid': vertexspectra.Option(None,
        _('Sweep grid, for example {"L": [3, 4], "gamma": [[0.5, 0.1]]}. '
        'Lists are combined as a cartesian product.')),
    'gamma': vertexspectra.Option(None, _('Fixed anisotropy [re, im].')),
    'mu': vertexspectra.Option(None,
        _('Fixed inhomogeneities as a list of [re, im].')),
    'lambda': vertexspectra.Option(None,
        _('Fixed spectral parameters as a list of [re, im].')),
    'branch': vertexspectra.Option(None,
        _('Eigenvalue branch for zvalue, all branches if not set.'))}

# Residual name to tolerance name.
RESIDUAL_TOLERANCES = {
    'closed_form': 'closedForm',
    'diagonal': 'closedForm',
    'contract_vs_enumerate': 'oracle',
    'contract_vs_izergin': 'oracle',
    'enumerate_vs_izergin': 'oracle',
    'end_to_end': 'endToEnd',
    'branch_invariance': 'endToEnd',
    'ratio_spread': 'endToEnd',
    'ratio_normalization': 'endToEnd',
    'symmetry': 'symmetry',
    'korepin': 'korepin',
    'commutator': 'commutator',
    'trace': 'trace',
    'leakage': 'leakage'}

PASS = 'PASS'
FAIL = 'FAIL'
SKIP = 'SKIP'


def relative(value, reference):
    '''|value - reference| / |reference|.'''
    return abs(value - reference) / abs(reference)


def check_generic(params, points):
    '''Guards beyond the pairwise separation: the determinant and kernel
    denominators a(lambda_i - mu_j), b(lambda_i - mu_j) and
    a(lambda_p - lambda_q) must stay away from zero.'''
    separation = params.separation
    for (i, j) in itertools.product(range(params.L), repeat=2):
        difference = points[i] - params.mu[j]
        if min(abs(model.weight_a(difference, params)),
                abs(model.weight_b(difference))) < separation:
            raise model.SeparationError(_('lambda_%d too close to a pole '
                'at mu_%d') % (i, j))
        if i != j and abs(model.weight_a(points[i] - points[j], params)) < \
                separation:
            raise model.SeparationError(_('a(lambda_%d - lambda_%d) too '
                'close to zero') % (i, j))


def check_distinct(params, points):
    '''Pairwise separation of the inhomogeneities and of the spectral
    parameters, the guard strict mode applies on construction.'''
    model.check_separation(params.mu, params.separation, 'mu')
    model.check_separation(points.values, params.separation, 'lambda')


class SweepConfig(object):
    '''Settings of a verification run, read from the verify section.'''

    def __init__(self, core):
        get = lambda option: core.get_config(__name__, option)
        self.lengths = get('L')
        if isinstance(self.lengths, int):
            self.lengths = [self.lengths]
        self.trials = get('trials')
        self.seed = get('seed')
        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(get('tolerances') or {})
        self.box = dict(DEFAULT_BOX)
        self.box.update(get('box') or {})
        self.strict = get('strict')
        self.separation = core.get_config('vertexspectra.model',
            'separation')
        self.out = get('out')
        self.format = get('format')
        self.workers = get('workers')
        self.max_resample = get('max_resample')
        self.chain_length = get('chain_length')
        self.ratio_batch = get('ratio_batch')
        self.gamma = get('gamma')
        self.mu = get('mu')
        self.lam = get('lambda')
        for name in ('closedForm', 'endToEnd'):
            if self.tolerances[name] <= 0:
                raise vertexspectra.ConfigError(
                    _('Tolerance %s must be positive') % name)

    def summary(self):
        '''Settings recorded in reports.'''
        return {
            'lengths': list(self.lengths),
            'trials': self.trials,
            'seed': self.seed,
            'strict': self.strict,
            'separation': self.separation,
            'tolerances': self.tolerances}


class Sampler(object):
    '''Seeded parameter draws for one (L, trial) pair.'''

    def __init__(self, config, L, trial, fixed=None):
        self.config = config
        self.L = L
        self.rng = np.random.default_rng([config.seed, L, trial])
        self.fixed = dict(gamma=config.gamma, mu=config.mu,
            lam=config.lam)
        self.fixed.update(fixed or {})

    def _draw(self, name, size):
        ((re_min, re_max), (im_min, im_max)) = self.config.box[name]
        real = self.rng.uniform(re_min, re_max, size)
        imag = self.rng.uniform(im_min, im_max, size)
        return [complex(re, im) for (re, im) in zip(real, imag)]

    def _values(self, name, box_name):
        if self.fixed[name] is None:
            return self._draw(box_name, self.L)
        return [model.to_complex(value) for value in self.fixed[name]]

    def all_fixed(self):
        return all(self.fixed[name] is not None for name in ('gamma', 'mu',
            'lam'))

    def candidate(self):
        '''Draw one (params, points) pair, checked against the guards in
        strict mode.'''
        gamma = self._draw('gamma', 1)[0] if self.fixed['gamma'] is None \
            else model.to_complex(self.fixed['gamma'])
        mu = self._values('mu', 'mu')
        lam = self._values('lam', 'lambda')
        params = model.ModelParams(self.L, gamma, mu,
            strict=self.config.strict, separation=self.config.separation)
        points = model.SpectralPoints(params, lam)
        if self.config.strict:
            check_generic(params, points)
        else:
            check_distinct(params, points)
        return (params, points)

    def points(self, params):
        '''Draw extra spectral points for fixed params.'''
        points = model.SpectralPoints(params, self._draw('lambda', self.L))
        if self.config.strict:
            check_generic(params, points)
        return points


class Verifier(vertexspectra.Common):
    '''Runs the residual battery over sampled parameter points.'''

    def __init__(self, core, config=None):
        super(Verifier, self).__init__(core)
        self.config = config or SweepConfig(core)
        self.korepin_form = 'pinned'

    def pin_prefactor(self):
        '''Pin the recurrence prefactor form against enumeration at L = 2,
        once per run, and use it for every point. Returns the pinned form
        with the residuals of every form.'''
        sampler = Sampler(self.config, 2, 0, dict(gamma=None, mu=None,
            lam=None))
        for attempt in range(self.config.max_resample + 1):
            try:
                (params, points) = sampler.candidate()
                specialized = oracle.specialize(params, points, 0, 1)
                break
            except model.SeparationError:
                if attempt == self.config.max_resample:
                    raise
        (form, residuals) = oracle.pin_korepin_prefactor(params,
            specialized, 0, 1)
        if form is None:
            self._log.warning(_('No recurrence prefactor form holds at L=2, '
                'keeping %s'), self.korepin_form)
        else:
            self._log.info(_('Pinned recurrence prefactor: %s'), form)
            self.korepin_form = form
        return {'form': form, 'residuals': residuals}

    def map(self, function, tasks):
        '''Evaluate tasks on the worker pool, results in task order.'''
        pool = ThreadPool(max(1, self.config.workers))
        try:
            return list(pool.imap(function, tasks))
        finally:
            pool.kill()

    def sample(self, sampler):
        '''Draw a guarded, diagonalizable point. Returns (params, points,
        spectrum, resamples); spectrum is None if the cap was hit by
        degenerate spectra.'''
        resamples = 0
        while True:
            try:
                (params, points) = sampler.candidate()
                spectrum = transfer.diagonalize_with(self.core, params)
                return (params, points, spectrum, resamples)
            except model.SeparationError as exception:
                if sampler.all_fixed() or not self.config.strict:
                    raise
                failure = exception
            except transfer.DegenerateSpectrum as exception:
                if sampler.all_fixed():
                    return (params, points, None, resamples)
                failure = exception
            resamples += 1
            self._log.debug(_('Resampling L=%d: %s'), sampler.L, failure)
            if resamples > self.config.max_resample:
                if isinstance(failure, transfer.DegenerateSpectrum):
                    return (params, points, None, resamples)
                raise failure

    def evaluate(self, task):
        '''Evaluate one (L, trial, fixed) task into a report record.'''
        (L, trial, fixed) = task
        timer = profile.Profile(self.core, 'point L=%d trial=%d' % (L, trial))
        sampler = Sampler(self.config, L, trial, fixed)
        record = {'L': L, 'trial': trial, 'status': 'evaluated',
            'reason': None, 'residuals': {}, 'verdict': SKIP}
        try:
            (params, points, spectrum, resamples) = self.sample(sampler)
        except model.SeparationError as exception:
            if self.config.strict and sampler.all_fixed():
                raise vertexspectra.ConfigError(str(exception))
            record.update(status='skipped', reason=exception.code)
            return record
        record.update(gamma=params.gamma, mu=list(params.mu),
            **{'lambda': list(points), 'resamples': resamples})
        if spectrum is None:
            record.update(status='degenerate',
                reason=transfer.DegenerateSpectrum.code)
            return record
        timer.mark_all('sample')
        try:
            self._battery(record, params, points, spectrum, sampler, timer)
        except vertexspectra.NumericalError as exception:
            self._log.info(_('Point L=%d trial=%d: %s'), L, trial, exception)
            if self.config.strict:
                record.update(status='failed', reason=exception.code,
                    verdict=FAIL)
            else:
                record.update(status='skipped', reason=exception.code,
                    verdict=SKIP)
            return record
        record['verdict'] = self.verdict(record['residuals'])
        timer.log()
        self._log.info(_('Point L=%d trial=%d: %s'), L, trial,
            record['verdict'])
        return record

    def verdict(self, residuals):
        '''PASS iff every residual is below its tolerance.'''
        for (name, value) in residuals.items():
            tolerance = self.config.tolerances[RESIDUAL_TOLERANCES[name]]
            if not value < tolerance:
                return FAIL
        return PASS

    def _battery(self, record, params, points, spectrum, sampler, timer):
        residuals = record['residuals']
        L = params.L
        contract = oracle.z_contract(params, points).value
        izergin = oracle.z_izergin(params, points).value
        residuals['contract_vs_izergin'] = relative(izergin, contract)
        if L <= oracle.MAX_ENUMERATION_LENGTH:
            enumerate_value = oracle.z_enumerate(params, points).value
            residuals['contract_vs_enumerate'] = relative(contract,
                enumerate_value)
            residuals['enumerate_vs_izergin'] = relative(izergin,
                enumerate_value)
        if L == 2:
            residuals['closed_form'] = relative(contract,
                oracle.z2_closed_form(params, points).value)
        diagonal = model.SpectralPoints(params, params.mu)
        residuals['diagonal'] = relative(
            oracle.z_contract(params, diagonal).value,
            oracle.diagonal_z(params).value)
        timer.mark_all('oracles')
        self._transfer_checks(residuals, params, points, spectrum)
        timer.mark_all('transfer')
        if L >= 2:
            values = spectral.spectral_values(params, points, spectrum)
            record['branches'] = [{
                'branch': value.branch,
                'eigenvalue': spectrum.eigenvalues[value.branch],
                'kappa0': value.kappa0,
                'z': value.z,
                'residual': relative(value.z, contract),
                'condition': value.condition} for value in values]
            residuals['end_to_end'] = max(branch['residual']
                for branch in record['branches'])
            residuals['branch_invariance'] = spectral.max_pairwise_deviation(
                [value.z for value in values])
            record['conditions'] = {'spectrum': spectrum.condition,
                'H': max(value.condition for value in values)}
            timer.mark_all('spectral')
            self._korepin(record, params, points, sampler)
            timer.mark_all('korepin')
        if 2 <= L <= self.config.chain_length:
            self._chain_checks(residuals, params, points, spectrum, sampler)
            timer.mark_all('chain')

    def _transfer_checks(self, residuals, params, points, spectrum):
        if params.L > oracle.MAX_ENUMERATION_LENGTH:
            return
        second = points[1] if params.L > 1 else spectrum.reference
        residuals['commutator'] = transfer.commutator_residual(params,
            points[0], second)
        residuals['trace'] = transfer.trace_residual(spectrum, points[0])
        residuals['leakage'] = spectrum.leakage(points[0])

    def _korepin(self, record, params, points, sampler):
        i = int(sampler.rng.integers(params.L))
        j = int(sampler.rng.integers(params.L))
        specialized = oracle.specialize(params, points, i, j)
        residuals = oracle.korepin_residuals(params, specialized, i, j)
        record['residuals']['korepin'] = residuals[self.korepin_form]
        record['korepin'] = {'i': i, 'j': j, 'form': self.korepin_form,
            'pinned': residuals['pinned'],
            'full_product': residuals['full_product'],
            'residuals': residuals}

    def _chain_checks(self, residuals, params, points, spectrum, sampler):
        batch = [points]
        attempts = 0
        while len(batch) < self.config.ratio_batch and \
                attempts <= self.config.max_resample:
            attempts += 1
            try:
                batch.append(sampler.points(params))
            except model.SeparationError:
                continue
        symmetry = 0.0
        spread = 0.0
        normalization = 0.0
        for branch in range(spectrum.branch_count):
            config = chain.ChainConfig(params, spectrum, branch)
            if branch == 0:
                for n in range(2, params.L + 1):
                    symmetry = max(symmetry, chain.symmetry_residual(n,
                        points[:n], config))
            ratio = chain.fL_vs_Z(batch, config)
            spread = max(spread, ratio.spread)
            normalization = max(normalization, ratio.normalization)
        residuals['symmetry'] = symmetry
        residuals['ratio_spread'] = spread
        residuals['ratio_normalization'] = normalization


def summarize(records):
    '''Counts, largest residuals and the overall verdict of a list of
    records.'''
    statuses = [record['status'] for record in records]
    largest = {}
    for record in records:
        for (name, value) in record['residuals'].items():
            largest[name] = max(largest.get(name, 0.0), value)
    failed = sum(1 for record in records if record['verdict'] == FAIL)
    return {
        'points': len(records),
        'evaluated': statuses.count('evaluated'),
        'skipped': statuses.count('skipped'),
        'degenerate': statuses.count('degenerate'),
        'passed': sum(1 for record in records if record['verdict'] == PASS),
        'failed': failed,
        'max_residuals': largest,
        'verdict': FAIL if failed else PASS}


def exit_code(summary):
    '''Exit code for a verification summary.'''
    if summary['verdict'] == FAIL:
        return vertexspectra.EXIT_FAILURE
    if summary['degenerate']:
        return vertexspectra.EXIT_DEGENERATE
    return vertexspectra.EXIT_PASS


def run_verify(verifier):
    '''Evaluate every (L, trial) point and build the report.'''
    config = verifier.config
    prefactor = verifier.pin_prefactor()
    tasks = [(L, trial, None) for L in config.lengths
        for trial in range(config.trials)]
    records = verifier.map(verifier.evaluate, tasks)
    for (index, record) in enumerate(records):
        record['index'] = index
    result = {'command': 'verify', 'version': vertexspectra.__version__,
        'config': config.summary(), 'prefactor': prefactor,
        'points': records, 'summary': summarize(records)}
    return result


def cmd_verify(core):
    '''Run the residual battery and write the report.'''
    verifier = Verifier(core)
    result = run_verify(verifier)
    report.emit(result, verifier.config.out, verifier.config.format)
    return exit_code(result['summary'])


def parse_grid(grid):
    '''Expand a sweep grid into a list of {L, gamma, ...} rows.'''
    if grid is None:
        raise vertexspectra.ConfigError(_('No sweep grid configured, set '
            'vertexspectra.verify.grid'))
    if isinstance(grid, dict):
        grid = [grid]
    rows = []
    for (position, entry) in enumerate(grid):
        for field in ('L', 'gamma'):
            if field not in entry:
                raise vertexspectra.ConfigError(_('Sweep grid entry %d is '
                    'missing field: %s') % (position, field))
        lengths = entry['L'] if isinstance(entry['L'], list) \
            else [entry['L']]
        gammas = entry['gamma']
        if not gammas or not isinstance(gammas[0], list):
            gammas = [gammas]
        for (gamma, L) in itertools.product(gammas, lengths):
            row = dict(entry)
            row.update(L=int(L), gamma=gamma)
            rows.append(row)
    return rows


def cmd_sweep(core):
    '''Run the residual battery over a grid of (L, gamma) values, one report
    row per grid point.'''
    verifier = Verifier(core)
    config = verifier.config
    rows = parse_grid(core.get_config(__name__, 'grid'))
    prefactor = verifier.pin_prefactor()
    tasks = []
    for row in rows:
        fixed = {'gamma': row['gamma']}
        if 'mu' in row:
            fixed['mu'] = row['mu']
        for trial in range(row.get('trials', config.trials)):
            tasks.append((row['L'], trial, fixed))
    records = verifier.map(verifier.evaluate, tasks)
    position = 0
    results = []
    for row in rows:
        count = row.get('trials', config.trials)
        row_records = records[position:position + count]
        position += count
        summary = summarize(row_records)
        results.append({'L': row['L'],
            'gamma': model.to_complex(row['gamma']),
            'trials': count,
            'evaluated': summary['evaluated'],
            'skipped': summary['skipped'],
            'degenerate': summary['degenerate'],
            'residuals': summary['max_residuals'],
            'verdict': summary['verdict']})
    summary = summarize(records)
    result = {'command': 'sweep', 'version': vertexspectra.__version__,
        'config': config.summary(), 'prefactor': prefactor, 'rows': results,
        'summary': summary}
    report.emit(result, config.out, config.format)
    return exit_code(summary)


def fixed_point(core):
    '''Model and points from the configured fixed values, drawing the
    missing ones from the seeded sampler.'''
    config = SweepConfig(core)
    L = config.lengths[0]
    if config.mu is not None:
        L = len(config.mu)
    elif config.lam is not None:
        L = len(config.lam)
    sampler = Sampler(config, L, 0)
    failure = None
    for _attempt in range(config.max_resample + 1):
        try:
            (params, points) = sampler.candidate()
            return (config, params, points)
        except model.SeparationError as exception:
            failure = exception
            if sampler.all_fixed():
                break
    raise vertexspectra.ConfigError(str(failure))


def cmd_spectrum(core):
    '''Write the eigenvalue table at the reference point.'''
    (config, params, _points) = fixed_point(core)
    try:
        spectrum = transfer.diagonalize_with(core, params)
    except transfer.DegenerateSpectrum as exception:
        core.get_logger(__name__).error('%s', exception)
        return vertexspectra.EXIT_DEGENERATE
    rows = [{'branch': branch, 're': value.real, 'im': value.imag,
        'residual': spectrum.leakage(spectrum.reference, branch)}
        for (branch, value) in enumerate(spectrum.eigenvalues)]
    result = {'command': 'spectrum', 'version': vertexspectra.__version__,
        'L': params.L, 'gamma': params.gamma, 'mu': list(params.mu),
        'reference': spectrum.reference, 'condition': spectrum.condition,
        'rows': rows}
    report.emit(result, config.out, config.format)
    return vertexspectra.EXIT_PASS


def cmd_zvalue(core):
    '''Print kappa0, det H and Z per branch as JSON lines.'''
    (config, params, points) = fixed_point(core)
    try:
        spectrum = transfer.diagonalize_with(core, params)
    except transfer.DegenerateSpectrum as exception:
        core.get_logger(__name__).error('%s', exception)
        return vertexspectra.EXIT_DEGENERATE
    branch = core.get_config(__name__, 'branch')
    branches = None if branch is None else [branch]
    values = spectral.spectral_values(params, points, spectrum, branches)
    result = {'command': 'zvalue', 'version': vertexspectra.__version__,
        'lines': [{'branch': value.branch, 'kappa0': value.kappa0,
            'detH': value.det, 'Z': value.z,
            'conditionEstimate': value.condition} for value in values]}
    report.write_lines(result, config.out)
    return vertexspectra.EXIT_PASS


def cmd_selftest(core):
    '''Run the regression cases against the known closed forms.'''
    from vertexspectra import selftest
    return selftest.cmd_selftest(core)


COMMANDS = {
    'selftest': cmd_selftest,
    'verify': cmd_verify,
    'sweep': cmd_sweep,
    'spectrum': cmd_spectrum,
    'zvalue': cmd_zvalue}
