import os
import sys

import numpy as np

# 17 significant digits, doubles survive the round trip
FLOAT_FORMAT = '%.16e'

_SEPARATORS = {'csv': ',', 'tsv': '\t'}


def write_table(table, out=None, fmt='csv'):
    """Write a DataFrame with a header row, UTF-8 and '.' decimals.

    :param table: Data to write, complex columns must already be split into real and imaginary parts
    :type table: pandas.DataFrame
    :param out: Output file, defaults to standard output
    :type out: str, optional
    :param fmt: 'csv' or 'tsv', defaults to 'csv'
    :type fmt: str, optional
    """
    sep = _SEPARATORS[fmt]
    if out is None:
        table.to_csv(sys.stdout, sep=sep, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        return
    directory = os.path.dirname(out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    table.to_csv(out, sep=sep, index=False, float_format=FLOAT_FORMAT, encoding='utf-8',
                 lineterminator='\n')


def companion_path(out, suffix, extension=None):
    """Path next to out with a suffix appended to the stem, e.g. run.csv -> run_report.csv"""
    stem, ext = os.path.splitext(out)
    return f"{stem}{suffix}{ext if extension is None else extension}"


def split_complex(name, values):
    """Columns 're_<name>' and 'im_<name>' of a complex array"""
    values = np.asarray(values, dtype=complex)
    return {f're_{name}': values.real, f'im_{name}': values.imag}
