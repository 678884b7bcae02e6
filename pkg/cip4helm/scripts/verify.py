# Built-ins
import logging
import math
import sys
import time

# Third party
import numpy as np
import pandas as pd

# Lib resources
from cip4helm.utils import assembly, banded_solver, discrete_greens, dispersion
from cip4helm.utils.config_utils import load_run_config
from cip4helm.utils.error_analysis import DiscreteSolution, jstab_identity_residual, jump_functional, norm_1h
from cip4helm.utils.errors import ConfigError
from cip4helm.utils.exact_reference import (check_regularity_bounds, exact_by_quadrature, exact_constant_f,
                                            exact_solution)
from cip4helm.utils.log_utils import banner, configure_logging
from cip4helm.utils.model import make_problem

logger = logging.getLogger(__name__)

T_GRID = np.round(np.arange(1, 11) / 10.0, 1)
GAMMA_GRID = (1 / 6, -1 / 6, 1 / 12, -1 / 12, 0.05, -0.05, 0.0)


def check_dispersion_identities(rng, perturbation):
    worst_vieta = 0.0
    worst_bound = -math.inf
    for t in T_GRID:
        for gamma in GAMMA_GRID:
            roots = dispersion.dispersion_roots(t, gamma)
            worst_bound = max(worst_bound, abs(roots.cos_minus - 1 + t ** 2 / 2) - t ** 4 / 6)
            if gamma != 0:
                total, product = dispersion.root_sum_and_product(t, gamma)
                worst_vieta = max(worst_vieta,
                                  abs(roots.cos_minus + roots.cos_plus - total) / abs(total),
                                  abs(roots.cos_minus * roots.cos_plus - product) / abs(product))
    passed = worst_vieta <= 1e-12 and worst_bound <= 0
    return passed, f"vieta {worst_vieta:.1e}, bound margin {worst_bound:.1e}"


def _phase_errors(k, gamma_of_t, levels=6):
    """Phase errors on meshes halved level by level, starting from kh = 1"""
    errors = []
    for level in range(levels):
        h = 1.0 / (k * 2 ** level)
        errors.append(dispersion.phase_error(k, h, gamma_of_t(k * h)))
    return np.array(errors)


def _empirical_orders(errors):
    return np.log2(errors[:-1] / errors[1:])


def check_phase_error_orders(rng, perturbation):
    k = 10.0
    orders_0 = _empirical_orders(_phase_errors(k, lambda t: 0.0))
    orders_12 = _empirical_orders(_phase_errors(k, lambda t: -1.0 / 12.0))
    # Zero up to rounding, no order to fit
    errors_o = _phase_errors(k, dispersion.optimal_gamma)
    passed = (abs(orders_0[-1] - 2.0) <= 0.05 and abs(orders_12[-1] - 4.0) <= 0.1
              and np.max(errors_o) <= 1e-12 * k)
    return passed, (f"gamma=0 order {orders_0[-1]:.3f}, gamma=-1/12 order {orders_12[-1]:.3f}, "
                    f"gamma_o error {np.max(errors_o):.1e}")


def check_cutoff_frequencies(rng, perturbation):
    deviation = max(abs(dispersion.cutoff_frequency(-1.0 / 12.0) - math.sqrt(8.0)),
                    abs(dispersion.cutoff_frequency(0.0) - math.sqrt(12.0)))
    return deviation <= 1e-14, f"deviation {deviation:.1e}"


def check_assembly_oracle(rng, perturbation, cases=25):
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 51))
        k = float(rng.uniform(0.5, 50.0))
        gamma = complex(rng.uniform(-1 / 6, 1 / 6), rng.uniform(-0.2, 0.0))
        for flag in (True, False):
            problem = make_problem(k, n, gamma, include_boundary_penalty=flag)
            banded = assembly.assemble_matrix(problem)
            if perturbation:
                banded.band[assembly.BANDWIDTH, 0] += perturbation
            dense = assembly.assemble_dense_by_quadrature(problem)
            scale = max(1.0, np.max(np.abs(dense)))
            worst = max(worst, np.max(np.abs(banded.to_dense() - dense)) / scale)
    return worst <= 1e-13, f"max deviation {worst:.1e}"


def random_pentadiagonal(rng, n, dominance=6.0):
    """Random complex pentadiagonal matrix, diagonally dominant"""
    band = rng.standard_normal((5, n)) + 1j * rng.standard_normal((5, n))
    band[assembly.BANDWIDTH] += dominance * np.sign(band[assembly.BANDWIDTH].real)
    matrix = assembly.BandedMatrix(band)
    # Drop the unused corners of the band storage
    return assembly.BandedMatrix.from_dense(matrix.to_dense())


def check_banded_solver(rng, perturbation, systems=20):
    worst_solution = 0.0
    worst_reconstruction = 0.0
    for _ in range(systems):
        n = int(rng.integers(5, 200))
        matrix = random_pentadiagonal(rng, n)
        rhs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        fact = banded_solver.factor(matrix)
        x = banded_solver.solve(fact, rhs)
        reference = np.linalg.solve(matrix.to_dense(), rhs)
        worst_solution = max(worst_solution, np.max(np.abs(x - reference)) / np.max(np.abs(reference)))
        dense = matrix.to_dense()
        worst_reconstruction = max(worst_reconstruction,
                                   np.max(np.abs(fact.reconstruct() - dense)) / np.max(np.abs(dense)))
    passed = worst_solution <= 1e-11 and worst_reconstruction <= 1e-12
    return passed, f"solution {worst_solution:.1e}, reconstruction {worst_reconstruction:.1e}"


def check_discrete_greens_oracle(rng, perturbation):
    worst = 0.0
    for n in (10, 40, 100):
        for t in (0.5, 1.0):
            for gamma in (-1.0 / 12.0, -0.08, 1.0 / 12.0):
                problem = make_problem(n * t, n, gamma, include_boundary_penalty=False)
                G = discrete_greens.greens_matrix_for(problem)[1:, :]
                fact = banded_solver.factor(assembly.assemble_matrix(problem))
                inverse = banded_solver.solve(fact, np.eye(n, dtype=complex))
                worst = max(worst, np.max(np.abs(G - inverse)) / np.max(np.abs(inverse)))
    return worst <= 1e-8, f"max relative deviation {worst:.1e}"


def check_jstab_identity(rng, perturbation, vectors=100):
    problem = make_problem(10.0, 20, -0.1j)
    worst = 0.0
    for _ in range(vectors):
        v = rng.standard_normal(problem.n) + 1j * rng.standard_normal(problem.n)
        worst = max(worst, jstab_identity_residual(problem, v) / np.sum(np.abs(v) ** 2))
    return worst <= 1e-12, f"max residual / |v|^2 {worst:.1e}"


def check_exact_reference(rng, perturbation, points=50):
    worst = 0.0
    for k in (1.0, 10.0, 100.0):
        problem = make_problem(k, 2, 0.0)
        x = rng.uniform(0.0, 1.0, points)
        u_closed, du_closed = exact_constant_f(k, x)
        u_quad, du_quad = exact_by_quadrature(problem, x)
        worst = max(worst, np.max(np.abs(u_closed - u_quad)), np.max(np.abs(du_closed - du_quad)))
    ratios = []
    for k in (1.0, 2.0, 5.0, 10.0, 50.0, 100.0):
        report = check_regularity_bounds(make_problem(k, 2, 0.0))
        ratios.append(max(report.ratio_l2, report.ratio_h1, report.ratio_h2))
    passed = worst <= 1e-9 and max(ratios) <= 1.0 + 1e-8
    return passed, f"closed form vs quadrature {worst:.1e}, largest bound ratio {max(ratios):.4f}"


def check_problem_validation(rng, perturbation):
    invalid = [(0.0, 10, 0.0), (-1.0, 10, 0.0), (math.nan, 10, 0.0), (10.0, 1, 0.0), (10.0, 2.5, 0.0),
               (10.0, 10, complex(math.nan, 0.0)), (10.0, 10, math.inf)]
    rejected = 0
    for k, n, gamma in invalid:
        try:
            make_problem(k, n, gamma)
        except ConfigError:
            rejected += 1
    problem = make_problem(1.0, 2, 0.0)
    mesh_ok = problem.t == 0.5 and np.array_equal(problem.mesh.nodes, [0.0, 0.5, 1.0])
    return rejected == len(invalid) and mesh_ok, f"{rejected}/{len(invalid)} invalid problems rejected"


def check_norm_identities(rng, perturbation, vectors=20):
    worst_norm = 0.0
    for _ in range(vectors):
        n = int(rng.integers(2, 60))
        gamma = complex(rng.uniform(-1 / 6, 1 / 6), rng.uniform(-0.2, 0.0))
        values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        uh = DiscreteSolution(values=values, mesh=make_problem(1.0, n, gamma).mesh)
        h = uh.mesh.h
        direct = h * np.sum(np.abs(uh.slopes) ** 2) + abs(gamma) * h * np.sum(np.abs(uh.jumps) ** 2)
        worst_norm = max(worst_norm, abs(norm_1h(uh.slopes, gamma, h) ** 2 - direct) / direct)

    worst_jump = 0.0
    for gamma in (-1.0 / 12.0, 0.05, -0.08 - 0.1j):
        for flag in (True, False):
            problem = make_problem(20.0, 15, gamma, include_boundary_penalty=flag)
            worst_jump = max(worst_jump, abs(jump_functional(exact_solution(problem), problem)))
    passed = worst_norm <= 1e-12 and worst_jump <= 1e-10
    return passed, f"norm identity {worst_norm:.1e}, J(u, u) of the exact solution {worst_jump:.1e}"


def check_discrete_greens_structure(rng, perturbation):
    worst_det = 0.0
    for t, gamma in ((0.5, -1.0 / 12.0), (1.0, 1.0 / 12.0), (0.3, -0.05)):
        for n in (8, 12):
            direct, factorized = discrete_greens.determinant_structure(discrete_greens.fundamental_roots(t, gamma), n)
            worst_det = max(worst_det, abs(direct - factorized) / abs(factorized))

    n = 30
    fs = discrete_greens.fundamental_roots(0.7, -0.05)
    G = discrete_greens.greens_matrix(fs, n)
    inner = G[1:, :]
    asymmetry = np.max(np.abs(inner - inner.T)) / np.max(np.abs(inner))

    H = discrete_greens.derivative_kernel_matrix(fs, n, G=G)
    worst_entry = 0.0
    for j, m in rng.integers(1, n + 1, size=(10, 2)):
        entry = discrete_greens.derivative_kernel_entry(fs, n, int(j), int(m))
        worst_entry = max(worst_entry, abs(entry - H[j - 1, m - 1]))
    j, m = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing='ij')
    remainder = np.abs(H - discrete_greens.leading_term(j, m, fs.t_h))
    bound = fs.t + np.abs(fs.eta[3]) ** (-np.abs(j - m).astype(float))
    leading = np.max(remainder / bound)

    passed = worst_det <= 1e-10 and asymmetry <= 1e-8 and worst_entry <= 1e-10 and leading <= 10
    return passed, (f"determinant {worst_det:.1e}, asymmetry {asymmetry:.1e}, "
                    f"derivative kernel entries {worst_entry:.1e}, leading term remainder {leading:.2f}")


CHECKS = [('problem validation', check_problem_validation),
          ('dispersion identities', check_dispersion_identities),
          ('phase error orders', check_phase_error_orders),
          ('cutoff frequencies', check_cutoff_frequencies),
          ('assembly oracle', check_assembly_oracle),
          ('banded solver', check_banded_solver),
          ("discrete Green's function", check_discrete_greens_oracle),
          ("discrete Green's structure", check_discrete_greens_structure),
          ('norm identities', check_norm_identities),
          ('stability identity', check_jstab_identity),
          ('exact reference', check_exact_reference)]


def run(run_config, stream=None):
    """Run every check, print the pass/fail table and report overall success.

    :return: (table, all_passed)
    """
    stream = sys.stdout if stream is None else stream
    rng = np.random.default_rng(run_config.seed)
    banner(logger, "Verifying")

    rows = []
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = check(rng, run_config.perturbation)
        except Exception as e:
            logger.exception("Check '%s' raised", name)
            passed, detail = False, f"{type(e).__name__}: {e}"
        rows.append({'check': name, 'result': 'pass' if passed else 'FAIL', 'detail': detail})
        logger.debug("%s: %s (%.2f s)", name, detail, time.perf_counter() - start)

    table = pd.DataFrame(rows, columns=['check', 'result', 'detail'])
    stream.write(table.to_string(index=False) + '\n')
    all_passed = bool((table['result'] == 'pass').all())
    logger.info("%d/%d checks passed", int((table['result'] == 'pass').sum()), len(table))
    return table, all_passed


def main(iniPath=None):
    configure_logging()
    run_config = load_run_config(iniPath, {'General': {'command': 'verify'}})
    _, all_passed = run(run_config)
    return 0 if all_passed else 1
