# Built-ins
import logging

# Third party
import numpy as np
import pandas as pd

# Lib resources
from cip4helm.utils import config_utils
from cip4helm.utils.config_utils import load_run_config, n_from_constraint, resolve_gamma
from cip4helm.utils.error_analysis import full_report, solve_problem
from cip4helm.utils.errors import ConfigError
from cip4helm.utils.exact_reference import exact_solution
from cip4helm.utils.log_utils import banner, configure_logging
from cip4helm.utils.model import RhsSpec, make_problem
from cip4helm.utils.table_utils import companion_path, split_complex, write_table

logger = logging.getLogger(__name__)


def problem_from_config(run_config, k=None, n=None):
    """Problem for one wave number, n from the explicit list or from the constraint"""
    k = run_config.k_values[0] if k is None else k
    if n is None:
        if run_config.n_values:
            n = run_config.n_values[0]
        elif run_config.constraint is not None:
            n = n_from_constraint(run_config.constraint, k)
        else:
            raise ConfigError("An element count or a constraint is required")
    gamma = resolve_gamma(run_config.gamma_spec, k / n)
    return make_problem(k, n, gamma, RhsSpec.from_expression(run_config.rhs),
                        include_boundary_penalty=run_config.include_boundary_penalty)


def solution_table(problem, solution):
    """Nodal values of u_h next to the exact solution"""
    nodes = problem.mesh.nodes
    exact = exact_solution(problem)
    columns = {'x': nodes}
    columns.update(split_complex('u_h', solution.nodal))
    columns.update(split_complex('u', exact.u(nodes)))
    return pd.DataFrame(columns)


def run(run_config):
    """Solve one problem and write the nodal table, the error report and the resolved configuration.

    :param run_config: Resolved settings
    :type run_config: RunConfig
    :return: (nodal table, ErrorReport)
    """
    problem = problem_from_config(run_config)
    banner(logger, "Solving")
    logger.info("k=%g, n=%d, t=%.6g, gamma=%s, boundary penalty %s", problem.k, problem.n, problem.t,
                problem.gamma, 'on' if problem.include_boundary_penalty else 'off')

    solution = solve_problem(problem)
    report = full_report(problem, solution=solution)
    table = solution_table(problem, solution)

    logger.info("Relative H1 errors: best approximation %.4e, CIP-FEM %.4e", report.e_ba, report.e_c)

    write_table(table, run_config.out, run_config.fmt)
    if run_config.out is not None:
        record = {key: np.nan if value is None else value for key, value in report.as_dict().items()}
        report_table = pd.DataFrame([record])
        write_table(report_table, companion_path(run_config.out, '_report'), run_config.fmt)
        config_utils.write_resolved_config(run_config, companion_path(run_config.out, '', '.ini'))
    return table, report


def main(iniPath):
    configure_logging()
    run_config = load_run_config(iniPath, {'General': {'command': 'solve'}})
    return run(run_config)
