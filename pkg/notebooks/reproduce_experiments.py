# Built-ins
import argparse
import logging
import os
import shutil

# Lib resources
from cip4helm.scripts import dispersion_curves, solve, sweep, verify
from cip4helm.utils.config_utils import customize_config, read_config
from cip4helm.utils.log_utils import banner, configure_logging

"""
This script runs the INI recipes in data/config_examples one after the other and collects the tables
in one output folder. Each recipe is copied next to its outputs before the output path is customized.
"""

logger = logging.getLogger('reproduce_experiments')

RECIPES = ['solution_profile.ini',
           'dispersion_curves.ini',
           'dof_scan.ini',
           'sweep_kh_optimal_gamma.ini',
           'sweep_kh_pollution.ini',
           'sweep_k3h2_imaginary_gamma.ini',
           'sweep_k3h2_real_gamma.ini']

SCRIPTS = {'solve': solve.main,
           'dispersion': dispersion_curves.main,
           'sweep': sweep.main}


def main(recipe_dir, output_dir, jobs, only=None):
    os.makedirs(output_dir, exist_ok=True)

    for recipe in RECIPES:
        name = os.path.splitext(recipe)[0]
        if only and name not in only:
            continue

        # The recipe is copied so the original stays untouched
        config_path = os.path.join(output_dir, recipe)
        shutil.copyfile(os.path.join(recipe_dir, recipe), config_path)

        custom_config = {'General':
                            {'out': os.path.join(output_dir, name + '.csv'),
                             'jobs': jobs}}
        customize_config(config_path=config_path, dict_custom=custom_config)

        command = read_config(config_path)['General']['command'].strip()
        banner(logger, name)
        SCRIPTS[command](config_path)

    # The checks run last, a failing check does not stop the experiments above
    if verify.main() != 0:
        logger.error("Some verification checks failed")


if __name__ == "__main__":
    configure_logging()
    repo_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

    parser = argparse.ArgumentParser(description="Run the experiment recipes of data/config_examples")
    parser.add_argument('--recipe_dir', type=str, default=os.path.join(repo_dir, 'data', 'config_examples'),
                        help="Folder of the INI recipes")
    parser.add_argument('--output_dir', type=str, default=os.path.join(repo_dir, 'output'),
                        help="Folder for tables and resolved configurations")
    parser.add_argument('--jobs', type=int, default=4, help="Worker processes of the sweeps")
    parser.add_argument('--only', nargs='*', help="Recipe names to run, e.g. dof_scan sweep_kh_pollution")

    args = parser.parse_args()
    main(args.recipe_dir, args.output_dir, args.jobs, args.only)
