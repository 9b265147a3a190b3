import csv
import json

import numpy as np

COMMENT_PREFIX = '#'

def format_value(value):
    """
    Locale-independent text for a CSV cell. Floats are written with 17
    significant digits so that files written from identical results are
    byte-identical.
    """
    if(value is None): return ''
    if(isinstance(value, (bool, np.bool_))): return str(bool(value))
    if(isinstance(value, (int, np.integer))): return str(int(value))
    if(isinstance(value, (float, np.floating))):
        value = float(value)
        if(np.isnan(value)): return 'nan'
        if(np.isinf(value)): return 'inf' if(value > 0) else '-inf'
        return '%.17g' % value
    return str(value)

def provenance_line(config):
    return '%s config: %s' % (COMMENT_PREFIX, json.dumps(config, sort_keys=True, default=str))

def write_csv(path, header, rows, config=None):
    """
    Writes `rows` (iterable of sequences) under `header` to `path`.
    If `config` (a JSON-serializable dict) is given, it is recorded on a leading comment line.
    """
    with open(path, 'w', newline='') as ostr:
        if(config is not None): print(provenance_line(config), file=ostr)
        writer = csv.writer(ostr, delimiter=',', lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])

def read_csv(path, skip_header=True):
    """
    Reads a CSV file written by `write_csv` (or any two-column numeric table).
    Comment lines are ignored; returns the header (or None) and a float array.
    """
    with open(path, newline='') as istr:
        lines = [line for line in istr if(line.strip() and not line.lstrip().startswith(COMMENT_PREFIX))]
    rows = list(csv.reader(lines, delimiter=','))

    header = None
    if(skip_header and rows):
        try:
            [float(v) for v in rows[0]]
        except ValueError:
            header, rows = rows[0], rows[1:]

    return header, np.array([[float(v) for v in row] for row in rows], dtype=float)

# Arguments that change where and how results are shown, not the results
_PRESENTATION_ARGS = {'out', 'config', 'workers', 'display', 'quiet', 'no_summary'}

def config_record(args, **extra):
    """
    Resolved configuration of a command, as recorded on the provenance line of its CSV files.
    """
    record = {key: value for key, value in vars(args).items() if key not in _PRESENTATION_ARGS}
    record.update(extra)
    return record
