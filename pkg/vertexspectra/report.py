'''Byte deterministic report output, CSV summaries and schema validation.

Floats are written with 17 significant digits in lowercase scientific
notation, non-finite floats as null, complex values as [re, im] and object
keys in sorted order, so the same report always gives the same bytes.'''

import csv
import enum
import json
import math
import os
import sys

import jsonschema
import numpy as np

import vertexspectra
from vertexspectra import profile

SCHEMA_FILE = os.path.join(os.path.dirname(__file__), 'schema',
    'report.json')


def format_float(value):
    '''17 significant digits, lowercase scientific, null if not finite.'''
    value = float(value)
    if not math.isfinite(value):
        return 'null'
    return format(value, '.16e')


def dumps(value, indent=2, level=0):
    '''Encode a report value as deterministic JSON text.'''
    if isinstance(value, enum.Enum):
        value = value.value
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return 'null'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, complex):
        value = [value.real, value.imag]
    if isinstance(value, str):
        return json.dumps(value)
    if indent is None:
        (pad, end, separator) = ('', '', ', ')
    else:
        pad = '\n' + ' ' * (indent * (level + 1))
        end = '\n' + ' ' * (indent * level)
        separator = ',' + pad
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = ['%s: %s' % (json.dumps(str(key)), dumps(value[key], indent,
            level + 1)) for key in sorted(value, key=str)]
        return '{' + pad + separator.join(items) + end + '}'
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return '[]'
        if all(isinstance(item, (int, float, complex, np.generic)) and
                not isinstance(item, bool) for item in value) and \
                len(value) <= 2:
            return '[' + ', '.join(dumps(item) for item in value) + ']'
        items = [dumps(item, indent, level + 1) for item in value]
        return '[' + pad + separator.join(items) + end + ']'
    raise TypeError(_('Cannot encode %r in a report') % (value,))


def load_schema():
    '''The published report schema.'''
    with open(SCHEMA_FILE, 'r') as schema_file:
        return json.load(schema_file)


def validate(text):
    '''Validate encoded report text against the schema.'''
    jsonschema.validate(json.loads(text), load_schema())


def write(report, path=None):
    '''Validate and write a report to path, or stdout if path is None.
    Returns the encoded text.'''
    text = dumps(report) + '\n'
    validate(text)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, 'w') as out:
            out.write(text)
    return text


def write_lines(report, path=None):
    '''Validate a report holding a list of lines and write each line as
    compact JSON, to path or stdout if path is None.'''
    validate(dumps(report))
    text = ''.join(dumps(line, indent=None) + '\n'
        for line in report['lines'])
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, 'w') as out:
            out.write(text)
    return text


def residual_table(records):
    '''Summary statistics of every residual over a list of records holding
    a residuals dictionary.'''
    values = {}
    for record in records:
        for (name, value) in record.get('residuals', {}).items():
            if value is not None and math.isfinite(value):
                values.setdefault(name, []).append(value)
    return dict((name, profile.summarize(name_values))
        for (name, name_values) in values.items())


CSV_FIELDS = ('name', 'count', 'average', 'min', 'max', 'stddev')
CASE_FIELDS = ('name', 'residual', 'tolerance', 'passed', 'error')


def _statistics_rows(report):
    records = report.get('points') or report.get('rows') or []
    table = residual_table(records)
    yield CSV_FIELDS
    for name in sorted(table):
        row = [name, table[name]['count']]
        row.extend(format_float(table[name][field])
            for field in CSV_FIELDS[2:])
        yield row


def _case_rows(report):
    yield CASE_FIELDS
    for case in report['cases']:
        yield [case['name'], format_float(case['residual']),
            format_float(case['tolerance']),
            'true' if case['passed'] else 'false', case['error'] or '']


def write_csv(report, path=None):
    '''Write the residual statistics of a report as CSV, or one row per
    case for a selftest report.'''
    rows = _case_rows(report) if report.get('command') == 'selftest' \
        else _statistics_rows(report)
    out = sys.stdout if path is None else open(path, 'w', newline='')
    try:
        csv.writer(out, lineterminator='\n').writerows(rows)
    finally:
        if path is not None:
            out.close()


def emit(report, path=None, output_format='json'):
    '''Write a report in the requested format. CSV output also writes the
    full JSON report next to it when a path is given.'''
    if output_format == 'csv':
        if path is not None and not path.endswith('.json'):
            write(report, os.path.splitext(path)[0] + '.json')
        write_csv(report, path)
        return
    if output_format != 'json':
        raise vertexspectra.PreconditionError(
            _('Unknown report format: %s') % output_format)
    write(report, path)
    if path is not None and not path.endswith('.csv'):
        write_csv(report, os.path.splitext(path)[0] + '.csv')
