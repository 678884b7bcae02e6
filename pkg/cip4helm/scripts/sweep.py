# Built-ins
from concurrent.futures import ProcessPoolExecutor
import itertools
import logging
import math

# Third party
import numpy as np
import pandas as pd

# Lib resources
from cip4helm.utils import config_utils
from cip4helm.utils.config_utils import load_run_config, n_from_constraint, resolve_gamma
from cip4helm.utils.dispersion import critical_dof, resolution_dof
from cip4helm.utils.error_analysis import full_report
from cip4helm.utils.errors import ConfigError
from cip4helm.utils.log_utils import banner, configure_logging
from cip4helm.utils.model import REAL_GAMMA_TOL, RhsSpec, make_problem
from cip4helm.utils.table_utils import companion_path, write_table

logger = logging.getLogger(__name__)

# Relative H1 error marking the end of the plateau in a DOF scan
KNEE_THRESHOLD = 0.9

COLUMNS = ['k', 'n', 't', 'gamma_re', 'gamma_im', 'e_ba', 'e_c', 'ratio', 'norm_1h_error',
           'h1_semi_error', 'l2_error', 'jump_term', 'norm_1h_solution', 'norm_f', 'critical_dof',
           'resolution_dof']


def sweep_point(k, n, gamma, rhs, include_boundary_penalty):
    """One row of a sweep. Takes plain values so it can run in a worker process."""
    problem = make_problem(k, n, gamma, RhsSpec.from_expression(rhs),
                           include_boundary_penalty=include_boundary_penalty)
    report = full_report(problem)

    if abs(problem.gamma.imag) <= REAL_GAMMA_TOL:
        predicted = critical_dof(k, problem.gamma.real)
    else:
        predicted = math.nan

    return {'k': k,
            'n': n,
            't': problem.t,
            'gamma_re': problem.gamma.real,
            'gamma_im': problem.gamma.imag,
            'e_ba': report.e_ba,
            'e_c': report.e_c,
            'ratio': math.nan if report.ratio is None else report.ratio,
            'norm_1h_error': report.norm_1h_error,
            'h1_semi_error': report.h1_semi_error,
            'l2_error': report.l2_error,
            'jump_term': report.jump_term,
            'norm_1h_solution': report.norm_1h_solution,
            'norm_f': report.norm_f,
            'critical_dof': predicted,
            'resolution_dof': resolution_dof(k)}


def sweep_points(run_config):
    """(k, n) pairs in output order: sorted by k, then n"""
    if run_config.dof_scan:
        k = run_config.k_values[0]
        pairs = [(k, n) for n in run_config.n_values]
    elif run_config.constraint is not None:
        pairs = [(k, n_from_constraint(run_config.constraint, k)) for k in run_config.k_values]
    elif run_config.n_values:
        pairs = list(itertools.product(run_config.k_values, run_config.n_values))
    else:
        raise ConfigError("A sweep needs a constraint, element counts or a DOF scan")
    return sorted(set(pairs))


def find_knee(table, threshold=KNEE_THRESHOLD):
    """First element count with relative H1 error below threshold, None if never reached"""
    below = table[table['e_c'] < threshold].sort_values('n')
    if below.empty:
        return None
    return int(below['n'].iloc[0])


def run(run_config):
    """Run full_report over the sweep and write one row per point.

    :return: (table, knee) where knee is only set for a DOF scan
    """
    pairs = sweep_points(run_config)
    arguments = [(k, n, resolve_gamma(run_config.gamma_spec, k / n), run_config.rhs,
                  run_config.include_boundary_penalty) for k, n in pairs]

    banner(logger, "Sweeping")
    logger.info("%d points, %d job(s)", len(arguments), run_config.jobs)

    if run_config.jobs > 1 and len(arguments) > 1:
        with ProcessPoolExecutor(max_workers=run_config.jobs) as executor:
            # map keeps the submission order
            rows = list(executor.map(sweep_point, *zip(*arguments)))
    else:
        rows = []
        for count, args in enumerate(arguments):
            rows.append(sweep_point(*args))
            logger.debug("Point %d/%d done (k=%g, n=%d)", count + 1, len(arguments), args[0], args[1])

    table = pd.DataFrame(rows, columns=COLUMNS)

    knee = None
    if run_config.dof_scan:
        knee = find_knee(table)
        k = run_config.k_values[0]
        predicted = table['critical_dof'].iloc[0] if len(table) else np.nan
        logger.info("DOF scan at k=%g: knee at N=%s, predicted N_c=%.2f, k/pi=%d", k, knee, predicted,
                    resolution_dof(k))

    write_table(table, run_config.out, run_config.fmt)
    if run_config.out is not None:
        config_utils.write_resolved_config(run_config, companion_path(run_config.out, '', '.ini'))
    return table, knee


def main(iniPath):
    configure_logging()
    run_config = load_run_config(iniPath, {'General': {'command': 'sweep'}})
    return run(run_config)
