import io
import warnings

import numpy as np
import pytest

from cip4helm.scripts import verify
from cip4helm.utils.config_utils import load_run_config


@pytest.mark.parametrize('name, check', verify.CHECKS, ids=[name for name, _ in verify.CHECKS])
def test_every_check_passes(name, check):
    passed, detail = check(np.random.default_rng(3), 0.0)
    assert passed, detail


def test_module_invariants_are_checked():
    names = {name for name, _ in verify.CHECKS}
    assert {'problem validation', 'norm identities', "discrete Green's structure"} <= names


def test_phase_error_orders_without_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        passed, detail = verify.check_phase_error_orders(np.random.default_rng(0), 0.0)
    assert passed
    assert 'nan' not in detail


def test_run_prints_one_row_per_check():
    stream = io.StringIO()
    table, all_passed = verify.run(load_run_config(overrides={'General': {'command': 'verify'}}), stream=stream)
    assert all_passed
    assert list(table['check']) == [name for name, _ in verify.CHECKS]
    assert "discrete Green's structure" in stream.getvalue()


def test_corrupted_assembly_fails_only_the_oracle():
    passed, _ = verify.check_assembly_oracle(np.random.default_rng(0), 1e-3)
    assert not passed
    passed, _ = verify.check_norm_identities(np.random.default_rng(0), 1e-3)
    assert passed
