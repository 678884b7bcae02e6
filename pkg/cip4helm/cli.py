"""Command line entry point: cip4helm {solve, dispersion, sweep, verify}.

Settings come from an optional INI recipe (--config), command line flags override it.
Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 numerical failure.
"""
import argparse
import logging
import sys

from cip4helm import __version__
from cip4helm.scripts import dispersion_curves, solve, sweep, verify
from cip4helm.utils.config_utils import load_run_config
from cip4helm.utils.errors import (ConfigError, DispersionError, OverflowRegimeError, QuadratureError,
                                   SingularMatrixError, UnsupportedRegimeError)
from cip4helm.utils.log_utils import LOG_ENV_VAR, configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Flags whose values may start with '-' (e.g. --gamma -1/12)
_SIGNED_VALUE_FLAGS = ('--k', '--gamma', '--rhs', '--constraint')

_DESCRIPTIONS = {
    'solve': ("Solve one problem and write the nodal solution next to the exact one "
              "(columns x, re_u_h, im_u_h, re_u, im_u), plus an error report and the resolved INI.\n"
              "Solution profile experiment: --k 10 --n 10 --gamma gamma_o gives the phase-aligned "
              "CIP-FEM solution, --gamma 0 the standard FEM with its phase lag."),
    'dispersion': ("Write cos t against cos t_h^- over t in (0, t_max] for each penalty in --gamma "
                   "(comma separated), with the cutoff frequency t_c = sqrt(48 gamma + 12) per curve.\n"
                   "Dispersion curve experiment: --gamma gamma_o,-1/12,0 --t-max 4 shows the cutoffs at "
                   "sqrt(8) and sqrt(12). --gamma-o-curve adds the optimal penalty gamma_o(t), t <= 1."),
    'sweep': ("Run the error report over many wave numbers, one row per k: k, n, e_ba, e_c, ratio, "
              "norm_1h, predicted critical DOF.\n"
              "Experiments: --constraint kh=1 --gamma gamma_o --k 1..1000 (bounded error ratio, "
              "no pollution); --constraint kh=1 --gamma -0.08 (ratio growing with k); "
              "--constraint k3h2=1 --gamma -0.1j or -0.08 (errors under k^3 h^2 = 1); "
              "--dof-scan --k 100 --gamma -1/12 (error against N with the predicted knee)."),
    'verify': "Run the invariant and oracle checks and print a pass/fail table; exit 1 on any failure.",
}


# Plots reproduced by each command's tables, listed in --help
FIGURES = {
    'solve': ["solution profile: Re u_h and Re u over x for k = 10, n = 10 "
              "(recipe solution_profile.ini)"],
    'dispersion': ["optimal penalty curve: gamma_o(t) for t <= 1 (--gamma-o-curve)",
                   "dispersion curves: cos t against cos t_h^- with the cutoffs at sqrt(8) and sqrt(12) "
                   "(recipe dispersion_curves.ini)"],
    'sweep': ["critical DOF: relative H1 error against N at k = 100 with the predicted knee "
              "(recipe dof_scan.ini)",
              "errors under k^3 h^2 = 1 for imaginary and real penalties "
              "(recipes sweep_k3h2_imaginary_gamma.ini, sweep_k3h2_real_gamma.ini)",
              "pollution under kh = 1: error ratio e_c/e_ba growing with k for gamma = -0.08 "
              "(recipe sweep_kh_pollution.ini)",
              "no pollution under kh = 1: bounded error ratio for gamma_o "
              "(recipe sweep_kh_optimal_gamma.ini)"],
}


def _description(command):
    """Description text followed by the plots the command reproduces"""
    lines = [_DESCRIPTIONS[command]]
    if command in FIGURES:
        lines.append("\nFigures reproduced:")
        lines.extend(f"  - {figure}" for figure in FIGURES[command])
    return '\n'.join(lines)


def _attach_values(argv):
    """Turn '--gamma -1/12' into '--gamma=-1/12' so argparse does not read the value as a flag"""
    result = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in _SIGNED_VALUE_FLAGS and i + 1 < len(argv):
            result.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            result.append(token)
            i += 1
    return result


def _add_common(parser):
    parser.add_argument('--config', help="INI recipe, see data/config_examples")
    parser.add_argument('--out', help="Output file, defaults to standard output")
    parser.add_argument('--format', choices=('csv', 'tsv'), help="Table format, defaults to csv")
    parser.add_argument('--seed', type=int, help="Seed of the randomized checks")


def _add_problem(parser, gamma_help):
    parser.add_argument('--k', help="Wave number, a list '10,20' or a range '1..1000'")
    parser.add_argument('--n', help="Number of elements (or a comma separated list)")
    parser.add_argument('--gamma', help=gamma_help)
    parser.add_argument('--rhs', help="'neg-one' (f = -1) or an expression in x, e.g. 'sin(3*x)'")
    parser.add_argument('--no-boundary-penalty', action='store_true',
                        help="Drop the least squares penalty on the Robin condition")


def build_parser():
    parser = argparse.ArgumentParser(
        prog='cip4helm',
        description="Continuous interior penalty FEM for the 1D Helmholtz equation u'' + k^2 u = -f.",
        epilog=f"Diagnostics on standard error are controlled by {LOG_ENV_VAR}=error|info|debug.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', required=True)

    gamma_help = "Penalty parameter: a number, '-1/12', a complex literal '-0.1j' or 'gamma_o'"

    p_solve = subparsers.add_parser('solve', description=_description('solve'),
                                    formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(p_solve)
    _add_problem(p_solve, gamma_help)
    p_solve.add_argument('--constraint', help="Pick n from 'kh=c' or 'k3h2=c' instead of --n")

    p_disp = subparsers.add_parser('dispersion', description=_description('dispersion'),
                                   formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(p_disp)
    p_disp.add_argument('--gamma', help="Comma separated penalty parameters (real or 'gamma_o')")
    p_disp.add_argument('--t-max', type=float, help="Largest t = kh of the curves")
    p_disp.add_argument('--points', type=int, help="Number of t samples")
    p_disp.add_argument('--gamma-o-curve', action='store_true', help="Also write gamma_o(t) for t <= 1")

    p_sweep = subparsers.add_parser('sweep', description=_description('sweep'),
                                    formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(p_sweep)
    _add_problem(p_sweep, gamma_help)
    p_sweep.add_argument('--constraint', help="'kh=c' or 'k3h2=c'")
    p_sweep.add_argument('--points', type=int, help="Samples of a k range (or of a DOF scan)")
    p_sweep.add_argument('--spacing', choices=('log', 'lin'), help="Spacing of a k range")
    p_sweep.add_argument('--dof-scan', action='store_true', help="Scan the element count at fixed k")
    p_sweep.add_argument('--n-min', type=int, help="Smallest n of a DOF scan")
    p_sweep.add_argument('--n-max', type=int, help="Largest n of a DOF scan")
    p_sweep.add_argument('--jobs', type=int, help="Worker processes")

    p_verify = subparsers.add_parser('verify', description=_DESCRIPTIONS['verify'])
    _add_common(p_verify)
    # Test hook: corrupt the banded assembly to check that verification catches it
    p_verify.add_argument('--perturb-assembly', type=float, help=argparse.SUPPRESS)

    return parser


def overrides_from_args(args):
    """Nested {section: {key: value}} of the flags that were given"""
    def get(name):
        return getattr(args, name, None)

    def flag(name, value):
        # Store-true flags only override when set
        return value if get(name) else None

    overrides = {'General': {'command': args.command,
                             'out': get('out'),
                             'format': get('format'),
                             'jobs': get('jobs'),
                             'seed': get('seed'),
                             'perturbation': get('perturb_assembly')},
                 'Problem': {'k': get('k'),
                             'n': get('n'),
                             'rhs': get('rhs'),
                             'boundary_penalty': flag('no_boundary_penalty', 'False')},
                 'Sweep': {'constraint': get('constraint'),
                           'spacing': get('spacing'),
                           'dof_scan': flag('dof_scan', 'True'),
                           'n_min': get('n_min'),
                           'n_max': get('n_max')},
                 'Dispersion': {'t_max': get('t_max'),
                                'gamma_o_curve': flag('gamma_o_curve', 'True')}}

    if args.command == 'dispersion':
        overrides['Dispersion']['gamma'] = get('gamma')
        overrides['Dispersion']['points'] = get('points')
    else:
        overrides['Problem']['gamma'] = get('gamma')
        overrides['Sweep']['points'] = get('points')
    return overrides


_RUNNERS = {'solve': solve.run,
            'dispersion': dispersion_curves.run,
            'sweep': sweep.run}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    configure_logging()

    try:
        run_config = load_run_config(args.config, overrides_from_args(args))
        if run_config.command == 'verify':
            _, all_passed = verify.run(run_config)
            return EXIT_OK if all_passed else EXIT_VERIFY_FAILED
        _RUNNERS[run_config.command](run_config)
    except (ConfigError, UnsupportedRegimeError) as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_CONFIG
    except (SingularMatrixError, QuadratureError, DispersionError, OverflowRegimeError) as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
