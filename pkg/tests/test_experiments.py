import csv
import io
import json
import math

import numpy as np
import pytest

from tailcs.experiments import (
    CSV_FIELDS,
    Method,
    TrialSpec,
    derive_seed,
    run_trial,
    success,
    sweep_sparsity,
    trial_instance,
    worker_count,
)
from tailcs.diagnostics import l0_bruteforce_solutions


def test_success_examples():
    x = np.array([1.0, -2.0, 0.5])
    assert success(x, x, 1e-6) == (True, 0.0)
    assert success(np.zeros(3), np.zeros(3), 1e-6) == (True, 0.0)
    ok, rel = success(1.0000009 * x, x, 1e-6)
    assert ok and rel == pytest.approx(9e-7, rel=1e-6)
    ok, rel = success(np.ones(2), np.zeros(2), 1e-6)
    assert not ok and rel == pytest.approx(np.sqrt(2))
    with pytest.raises(ValueError):
        success(np.ones(2), np.ones(3), 1e-6)


def test_trial_spec_validation():
    with pytest.raises(ValueError):
        TrialSpec(m=4, N=8, s=0)
    with pytest.raises(ValueError):
        TrialSpec(m=4, N=8, s=2, method=Method.ANALYSIS)
    with pytest.raises(ValueError):
        TrialSpec(m=4, N=8, s=2, method="tailanalysis", dictionary=(7, 16))
    with pytest.raises(ValueError):
        TrialSpec(m=4, N=8, s=9)
    assert TrialSpec(m=4, N=8, s=2, method="tailmin").method is Method.TAILMIN


def test_method_parse():
    assert Method.parse(" BP ") is Method.BP
    with pytest.raises(ValueError):
        Method.parse("omp")


def test_derive_seed_is_stable_and_isolated():
    assert derive_seed(7, 16, 0) == derive_seed(7, 16, 0)
    assert derive_seed(7, 16, 0) != derive_seed(7, 16, 1)
    assert 0 <= derive_seed(1) < 2**64


def test_trial_instance_shape_and_sparsity():
    A, D, x, target, b = trial_instance(TrialSpec(m=8, N=12, s=5, seed=3))
    assert A.shape == (8, 12) and D is None
    assert np.count_nonzero(x) == 5
    np.testing.assert_array_equal(b, A @ x)
    A, D, x, f, b = trial_instance(TrialSpec(m=4, N=8, s=2, seed=3, method="analysis", dictionary=(8, 16)))
    assert D.shape == (8, 16) and x.shape == (16,)
    np.testing.assert_allclose(f, D @ x)


def test_run_trial_is_deterministic():
    spec = TrialSpec(m=10, N=20, s=4, method="tailmin", seed=11)
    a, b = run_trial(spec), run_trial(spec)
    assert (a.success, a.relative_error, a.iterations) == (b.success, b.relative_error, b.iterations)


def test_success_is_relative_error_below_tol():
    for seed in range(5):
        r = run_trial(TrialSpec(m=8, N=16, s=5, method="bp", seed=seed))
        assert r.success == (r.relative_error < r.spec.success_tol)


@pytest.mark.parametrize("seed", range(5))
def test_l0_method_matches_oracle(seed):
    spec = TrialSpec(m=8, N=12, s=5, method="l0", seed=seed)
    A, _, x, _, b = trial_instance(spec)
    rec = run_trial(spec)
    assert rec.success == l0_bruteforce_solutions(A, b, 5).is_exactly(x, 1e-6)
    assert rec.success


def test_bp_succeeds_at_low_sparsity_64x128():
    for seed in range(3):
        assert run_trial(TrialSpec(m=64, N=128, s=4, method="bp", seed=seed)).success


def test_solver_error_becomes_failed_record():
    # m > N: A A* is singular, so the trial fails with an error tag
    rec = run_trial(TrialSpec(m=6, N=4, s=1, method="bp", seed=0))
    assert not rec.success and rec.error == "RankDeficient"
    assert rec.to_dict()["relative_error"] is None


def test_empty_sweep():
    table = sweep_sparsity(TrialSpec(m=4, N=8, s=1), [1, 2], ["bp"], 0)
    assert table.rows == []
    assert table.to_csv() == ",".join(CSV_FIELDS) + "\n"


def test_sweep_table_contract():
    base = TrialSpec(m=8, N=16, s=1, seed=5)
    table = sweep_sparsity(base, [6, 2, 4], ["tailmin", "bp"], 6, workers=1)
    assert [(r.s, r.method.value) for r in table.rows] == [
        (2, "tailmin"), (2, "bp"), (4, "tailmin"), (4, "bp"), (6, "tailmin"), (6, "bp")]
    for r in table.rows:
        assert 0 <= r.successes <= r.trials == 6
        assert r.success_rate == r.successes / r.trials
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert rows[0] == CSV_FIELDS
    assert len(rows) == 7
    assert table.to_csv(include_timing=False).splitlines()[1].endswith(",nan")
    records = json.loads(table.records_json())
    assert len(records) == 36
    assert set(records[0]) == {"spec", "success", "relative_error", "iterations", "wall_ms", "error"}


def test_sweep_pairs_methods_on_identical_instances():
    table = sweep_sparsity(TrialSpec(m=8, N=16, s=1, seed=2), [3], ["bp", "tailmin"], 3, workers=1)
    by_method = {}
    for r in table.records:
        by_method.setdefault(r.spec.method, []).append(r.spec.seed)
    assert by_method[Method.BP] == by_method[Method.TAILMIN]


def test_sweep_is_reproducible_and_schedule_independent():
    base = TrialSpec(m=8, N=16, s=1, seed=9)
    serial = sweep_sparsity(base, [3, 5], ["bp", "tailmin"], 4, workers=1)
    parallel = sweep_sparsity(base, [3, 5], ["bp", "tailmin"], 4, workers=2)
    assert serial.to_csv(False) == parallel.to_csv(False)
    assert serial.to_csv(False) == sweep_sparsity(base, [3, 5], ["bp", "tailmin"], 4, workers=1).to_csv(False)


def test_fixed_matrix_sweep_uses_one_matrix():
    table = sweep_sparsity(TrialSpec(m=6, N=10, s=1, seed=4), [2, 3], ["bp"], 3, fixed_matrix=True, workers=1)
    seeds = {r.spec.matrix_seed for r in table.records}
    assert len(seeds) == 1 and None not in seeds


def test_tailmin_matches_bp_below_half():
    table = sweep_sparsity(TrialSpec(m=16, N=32, s=1, seed=1), [3, 5], ["bp", "tailmin"], 20, workers=1)
    for s in (3, 5):
        assert abs(table.rate(s, "tailmin") - table.rate(s, "bp")) <= 0.02 or table.rate(s, "tailmin") >= table.rate(s, "bp")


def test_worker_count(monkeypatch):
    monkeypatch.setenv("TAILCS_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("TAILCS_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("TAILCS_THREADS", "-1")
    with pytest.raises(ValueError):
        worker_count()


def test_dictionary_trial_measures_f():
    spec = TrialSpec(m=16, N=32, s=2, method="analysis", seed=0, dictionary=(32, 64))
    rec = run_trial(spec)
    assert math.isfinite(rec.relative_error)
