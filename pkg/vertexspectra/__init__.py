'''Core services and base classes for the vertexspectra package. Also handle
option parsing and running commands when invoked from the command line.'''

import gettext
import json
import logging
import logging.config
import optparse
import os
import sys
import traceback

# Install the _(...) function as a built-in so all other modules don't need to.
gettext.install('vertexspectra')

__version__ = '0.1'

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3


class Option(object):
    '''Details for config options.'''

    def __init__(self, default, description):
        self.default = default
        self.description = description


class Common(object):
    '''Common base class for objects that use the shared core.'''

    def __init__(self, core):
        self.core = core
        self._log = self.core.get_logger(self.__module__)
        self._log.debug(_('%s instance created'), self.__class__.__name__)

    def _get_config(self, option):
        '''Get config options for this module.'''
        return self.core.get_config(self.__module__, option)


DEFAULT_CONFIG_FILE = os.path.join(os.path.expanduser('~'), '.vertexspectra')
CONFIG_OPTIONS = {
    'logging': Option({
        'version': 1,
        'formatters': {
            'default': {
                'format': '%(asctime)s %(levelname)s %(process)d %(name)s '
                    '%(message)s'}},
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'default',
                'level': 'WARNING'}},
        'root': {
            'handlers': ['console'],
            'level': 'INFO'}},
        _('Logging schema to use, for details see: '
        'http://docs.python.org/library/logging.config.html'))}


class Core(object):
    '''Class to manage configuration, logging, and command dispatch.'''

    def __init__(self, config_file=None):
        self.config_file = config_file or DEFAULT_CONFIG_FILE
        self.config = {'vertexspectra': {}}
        self.sections = set(['vertexspectra'])
        self.force_log_level = None
        self._log = logging.getLogger('vertexspectra')
        if os.path.isfile(self.config_file):
            self.config.update(load_json(self.config_file))
        for section in self.config:
            for option in self.config[section]:
                self.verify_config(section, option)

    def get_config(self, section, option):
        '''Get a config value if set or the default.'''
        self.verify_config(section, option)
        if option in self.config.get(section, {}):
            return self.config[section][option]
        return sys.modules[section].CONFIG_OPTIONS[option].default

    def _get_config(self, option):
        '''Get config options for the core section.'''
        return self.get_config('vertexspectra', option)

    def set_config(self, section, option, value, overwrite=True):
        '''Set a config value.'''
        self.verify_config(section, option)
        if overwrite or option not in self.config[section]:
            self.config[section][option] = value
            self._log.debug(_('Set config option: %s.%s=%s'), section,
                option, value)

    def verify_config(self, section, option):
        '''Ensure the given section option is valid.'''
        self.load_section(section)
        if option not in sys.modules[section].CONFIG_OPTIONS:
            raise InvalidConfigOption('%s.%s' % (section, option))

    def get_logger(self, name):
        '''Get a logger.'''
        logger = logging.getLogger(name)
        if self.force_log_level is not None:
            logger.setLevel(self.force_log_level)
        return logger

    def load_section(self, section):
        '''Import the module holding the options of a config section.'''
        if section in self.sections:
            return
        try:
            __import__(section)
            getattr(sys.modules[section], 'CONFIG_OPTIONS')
        except (ImportError, ValueError, AttributeError) as exception:
            raise InvalidConfigOption(_('Cannot import %s.CONFIG_OPTIONS '
                '(%s)') % (section, exception))
        self.sections.add(section)
        self.config.setdefault(section, {})

    def setup_logging(self):
        '''Configure logging, forcing a level on all loggers if set.'''
        logging.config.dictConfig(self._get_config('logging'))
        self._log = logging.getLogger('vertexspectra')
        if self.force_log_level is None:
            return
        logging.Logger.root.level = self.force_log_level
        loggers = [logging.Logger.root]
        loggers.extend(logger for logger in
            logging.Logger.manager.loggerDict.values()
            if isinstance(logger, logging.Logger))
        for logger in loggers:
            logger.setLevel(self.force_log_level)
            for handler in logger.handlers:
                handler.setLevel(self.force_log_level)

    def run(self, command):
        '''Set up logging and run the named command, returning its exit
        code.'''
        import vertexspectra.verify
        self.setup_logging()
        if command not in vertexspectra.verify.COMMANDS:
            raise PreconditionError(_('Unknown command: %s') % command)
        self._log.info(_('Running command %s'), command)
        return vertexspectra.verify.COMMANDS[command](self)


class NumericalError(Exception):
    '''Base exception for numerical failures. The code names the kind of
    failure in reports.'''

    code = 'NUMERICAL'


class PreconditionError(ValueError):
    '''Exception raised when an operation is called outside its contract.'''

    pass


class ConfigError(Exception):
    '''Exception raised when a configuration file or field is not valid.'''

    pass


class InvalidConfigOption(ConfigError):
    '''Exception raised when a configuration option is not valid.'''

    pass


def load_json(path):
    '''Load a JSON config file, reporting the position of syntax errors.'''
    with open(path, 'r') as config_file:
        text = config_file.read()
    try:
        return json.loads(text)
    except ValueError as exception:
        raise ConfigError(_('%s: line %d column %d: %s') % (path,
            getattr(exception, 'lineno', 0), getattr(exception, 'colno', 0),
            getattr(exception, 'msg', exception)))


HELP_TEXT = _('''
Commands: selftest, verify, sweep, spectrum, zvalue

Configuration may also be given by using the syntax:

    <section>.<option>=<value>

For example, to run more workers for the verify command, give the following
argument:

    vertexspectra.verify.workers=8

Available options:
''')

# Command-line flags that map directly to options of the verify section.
FLAG_OPTIONS = {
    'L': 'L',
    'trials': 'trials',
    'seed': 'seed',
    'tol': 'tolerances',
    'out': 'out',
    'format': 'format',
    'gamma': 'gamma',
    'mu': 'mu',
    'lam': 'lambda',
    'branch': 'branch'}


def main(argv=None):
    '''Setup a core object and run a command, returning the exit code.'''
    parser = optparse.OptionParser(
        usage=_('Usage: vertex-spectra [options] <command> '
            '[section.option=value ...]'),
        add_help_option=False)
    parser.add_option('-c', '--config', default=DEFAULT_CONFIG_FILE,
        help=_('Config file to use'))
    parser.add_option('-d', '--debug', action='store_true',
        help=_('Show debugging output'))
    parser.add_option('-h', '--help', action='store_true',
        help=_('Show this help message and exit'))
    parser.add_option('-v', '--verbose', action='store_true',
        help=_('Show more verbose output'))
    parser.add_option('-V', '--version', action='store_true',
        help=_('Print version and exit'))
    parser.add_option('--L', dest='L',
        help=_('Lattice lengths, for example 3, 3,4 or 3..5'))
    parser.add_option('--gamma', help=_('Anisotropy as RE,IM'))
    parser.add_option('--mu', action='append',
        help=_('Inhomogeneity as RE,IM, repeat once per site'))
    parser.add_option('--lambda', dest='lam', action='append',
        help=_('Spectral parameter as RE,IM, repeat once per site'))
    parser.add_option('--trials', type='int',
        help=_('Random trials per lattice length'))
    parser.add_option('--seed', type='int', help=_('Random seed'))
    parser.add_option('--tol',
        help=_('Tolerances as name=value pairs separated by commas, or a '
            'single end to end tolerance'))
    parser.add_option('--branch', type='int', help=_('Eigenvalue branch'))
    parser.add_option('--out', help=_('Report output path'))
    parser.add_option('--format', choices=['json', 'csv'],
        help=_('Report format: json or csv'))
    (options, args) = parser.parse_args(argv)
    if options.version:
        print(__version__)
        return EXIT_PASS
    try:
        core = Core(options.config)
        if options.debug:
            core.force_log_level = logging.DEBUG
        elif options.verbose:
            core.force_log_level = logging.INFO
        command = None
        for arg in args:
            parts = arg.split('=', 1)
            if len(parts) == 1:
                if command is not None:
                    raise PreconditionError(
                        _('Only one command may be given'))
                command = parts[0]
            else:
                (section, option) = parts[0].rsplit('.', 1)
                core.set_config(section, option, parse_value(parts[1]))
        for flag, option in FLAG_OPTIONS.items():
            value = getattr(options, flag)
            if value is not None:
                core.set_config('vertexspectra.verify', option,
                    parse_flag(flag, value))
    except (ConfigError, PreconditionError, ValueError) as exception:
        sys.stderr.write('%s\n' % exception)
        return EXIT_USAGE
    if options.help or command is None:
        parser.print_help()
        print(HELP_TEXT)
        for section in sorted(core.sections):
            for option_name in sorted(sys.modules[section].CONFIG_OPTIONS):
                option = sys.modules[section].CONFIG_OPTIONS[option_name]
                print(_('%s.%s - %s (default=%s)') % (section, option_name,
                    option.description, json.dumps(option.default, indent=4)))
        return EXIT_PASS if options.help else EXIT_USAGE
    try:
        return core.run(command)
    except (ConfigError, PreconditionError) as exception:
        logging.getLogger('vertexspectra').error('%s', exception)
        sys.stderr.write('%s\n' % exception)
        return EXIT_USAGE
    except Exception as exception:  # pylint: disable=W0703
        error = _('Uncaught exception in core: %s (%s)') % \
            (exception, ''.join(traceback.format_exc().split('\n')))
        logging.getLogger().critical(error)
        sys.stderr.write('\n%s\n' % error)
        return EXIT_FAILURE


def parse_flag(flag, value):
    '''Convert a command-line flag value to its config representation.'''
    if flag == 'L':
        return parse_lengths(value)
    if flag == 'gamma':
        return parse_pair(value)
    if flag in ('mu', 'lam'):
        return [parse_pair(item) for item in value]
    if flag == 'tol':
        return parse_tolerances(value)
    return value


def parse_lengths(value):
    '''Parse 3, 3,4,5 or 3..5 into a list of lattice lengths.'''
    if '..' in value:
        (start, end) = value.split('..', 1)
        return list(range(int(start), int(end) + 1))
    return [int(part) for part in value.split(',')]


def parse_pair(value):
    '''Parse RE,IM into a [re, im] pair.'''
    parts = value.split(',')
    if len(parts) == 1:
        return [float(parts[0]), 0.0]
    if len(parts) != 2:
        raise ValueError(_('Complex values are given as RE,IM: %s') % value)
    return [float(parts[0]), float(parts[1])]


def parse_tolerances(value):
    '''Parse name=value pairs, or a single end to end tolerance.'''
    if '=' not in value:
        return {'endToEnd': float(value)}
    tolerances = {}
    for part in value.split(','):
        (name, tolerance) = part.split('=', 1)
        tolerances[name.strip()] = float(tolerance)
    return tolerances


def parse_value(value):  # pylint: disable=R0911,R0912
    '''Convert a string value to a native type.'''
    if value == '-':
        value = sys.stdin.read()
    if value == '':
        return value
    if value[0] == "'":
        return value.strip("'")
    if value[0] == '"':
        return value.strip('"')
    if value.isdigit():
        return int(value)
    if value.lower() == 'true':
        return True
    if value.lower() == 'false':
        return False
    if value.lower() == 'none':
        return None
    if value[0] == '[' or value[0] == '{':
        return json.loads(value)
    if value.startswith('json:'):
        return json.loads(value[5:])
    try:
        return float(value)
    except ValueError:
        return value


if __name__ == '__main__':
    sys.exit(main())
