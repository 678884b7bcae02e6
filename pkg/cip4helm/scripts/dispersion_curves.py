# Built-ins
import logging

# Third party
import numpy as np
import pandas as pd

# Lib resources
from cip4helm.utils import config_utils
from cip4helm.utils.config_utils import GAMMA_OPTIMAL, load_run_config
from cip4helm.utils.dispersion import cutoff_frequency, optimal_gamma_curve, phase_error_curve
from cip4helm.utils.errors import UnsupportedRegimeError
from cip4helm.utils.log_utils import banner, configure_logging
from cip4helm.utils.model import require_real_gamma
from cip4helm.utils.table_utils import companion_path, write_table

logger = logging.getLogger(__name__)

# t grid of the optimal penalty table
GAMMA_O_POINTS = 200


def dispersion_table(t_values, gamma_list):
    """cos t and cos t_h^- over a t grid for every penalty parameter, stacked in one long table"""
    frames = []
    for gamma_spec in gamma_list:
        if gamma_spec == GAMMA_OPTIMAL:
            frame = phase_error_curve(t_values, GAMMA_OPTIMAL)
        else:
            gamma = require_real_gamma(gamma_spec)
            frame = phase_error_curve(t_values, gamma)
            try:
                logger.info("gamma=%g: cutoff frequency t_c=%.6f", gamma, cutoff_frequency(gamma))
            except UnsupportedRegimeError:
                logger.info("gamma=%g: no real cutoff frequency", gamma)
        frame.insert(0, 'curve', config_utils.format_gamma_spec(gamma_spec))
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def run(run_config):
    """Write the dispersion curves (and the optimal penalty table when requested).

    :return: (dispersion table, optimal penalty table or None)
    """
    banner(logger, "Dispersion curves")
    table = dispersion_table(run_config.t_values, run_config.gamma_list)
    write_table(table, run_config.out, run_config.fmt)

    gamma_o_table = None
    if run_config.gamma_o_curve:
        t_max = min(1.0, run_config.t_values[-1])
        gamma_o_table = optimal_gamma_curve(np.linspace(t_max / GAMMA_O_POINTS, t_max, GAMMA_O_POINTS))
        logger.info("gamma_o ranges over [%.6f, %.6f] for t in (0, %g]", gamma_o_table['gamma_o'].min(),
                    gamma_o_table['gamma_o'].max(), t_max)
        if run_config.out is not None:
            write_table(gamma_o_table, companion_path(run_config.out, '_gamma_o'), run_config.fmt)
        else:
            write_table(gamma_o_table, None, run_config.fmt)

    if run_config.out is not None:
        config_utils.write_resolved_config(run_config, companion_path(run_config.out, '', '.ini'))

    n_blocked = int(np.sum(~table['propagating'].to_numpy(dtype=bool)))
    if n_blocked:
        logger.info("%d grid points are past the cutoff", n_blocked)
    return table, gamma_o_table


def main(iniPath):
    configure_logging()
    run_config = load_run_config(iniPath, {'General': {'command': 'dispersion'}})
    return run(run_config)
