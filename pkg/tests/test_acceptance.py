"""Acceptance suite.

One test per acceptance criterion, each printing a pass/fail line with
its runtime. Run with `pytest -s tests/test_acceptance.py` to see the
lines as they complete.
"""

import json
import time

import numpy as np

from conftest import make_pd
from opdiv.cli import main
from opdiv.funcatalog import builtin, quartic
from opdiv.lab import GenConfig, check_ids, reproduce_example, run_check, run_suite
from opdiv.norms import ky_fan
from opdiv.perspective import perspective


def _report(name: str, ok: bool, elapsed: float, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"{status} {name}{suffix} [{elapsed:.2f}s]")


def test_criterion_1_exact_fixture_reproduction():
    start = time.perf_counter()
    result = reproduce_example()
    elapsed = time.perf_counter() - start
    ok = max(result.max_devs) <= 1e-9 and min(result.gaps) > 0 and elapsed < 1.0
    _report(
        "criterion 1: exact fixture chain",
        ok,
        elapsed,
        f"max dev {max(result.max_devs):.2e}, min gap {min(result.gaps):.4f}",
    )
    assert max(result.max_devs) <= 1e-9
    assert min(result.gaps) > 0
    assert elapsed < 1.0


def test_criterion_2_closed_form_oracles():
    start = time.perf_counter()
    square = builtin("square")
    inverse = builtin("power", [-1])
    rng = np.random.default_rng(2024)
    worst = 0.0
    for dim in range(2, 7):
        for _ in range(100):
            left = make_pd(rng, dim)
            right = make_pd(rng, dim)
            r_inv = np.linalg.inv(right.entries)
            l_inv = np.linalg.inv(left.entries)

            got = perspective(square, left.base, right).entries
            want = left.entries @ r_inv @ left.entries
            dev = np.linalg.norm(got - want) / max(1.0, np.linalg.norm(want))
            worst = max(worst, dev)

            got = perspective(inverse, left.base, right).entries
            want = right.entries @ l_inv @ right.entries
            dev = np.linalg.norm(got - want) / max(1.0, np.linalg.norm(want))
            worst = max(worst, dev)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    _report("criterion 2: closed-form oracles", ok, elapsed, f"worst rel dev {worst:.2e}")
    assert worst <= 1e-9
    assert elapsed < 5.0


def test_criterion_3_full_registry_green():
    start = time.perf_counter()
    failures = []
    for dim in (2, 3, 4, 5):
        for seed in (1, 42, 2024):
            report = run_suite(check_ids(), GenConfig(dim=dim, seed=seed, trials=100))
            for check in report.checks:
                if check.violations:
                    failures.append((dim, seed, check.check_id, check.violations))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120.0
    _report(
        "criterion 3: full registry, dims 2-5, seeds {1,42,2024}",
        ok,
        elapsed,
        f"{len(check_ids())} checks x 12 configs",
    )
    assert not failures, failures
    assert elapsed < 120.0


def test_criterion_4_falsification_power():
    start = time.perf_counter()
    result = run_check("THM2_1", GenConfig(dim=2, seed=1, trials=1000), function=quartic())
    elapsed = time.perf_counter() - start
    ok = result.violations >= 1 and elapsed < 10.0
    _report(
        "criterion 4: quartic falsification",
        ok,
        elapsed,
        f"{result.violations} violations, worst {result.worst_margin:.3f}",
    )
    assert result.violations >= 1
    assert elapsed < 10.0


def test_criterion_5_scalar_reduction():
    from opdiv.hermitian import HermitianMatrix, PositiveDefiniteMatrix
    from opdiv.perspective import WeightedOperatorField, theta_divergence

    start = time.perf_counter()
    rng = np.random.default_rng(5)
    pool = [builtin("square"), builtin("neg_log"), builtin("t_log_t"), builtin("power", [-1])]
    worst_rel = 0.0
    worst_gap = np.inf
    for trial in range(1000):
        f = pool[trial % len(pool)]
        n = int(rng.integers(2, 7))
        p = rng.uniform(0.1, 4.0, n)
        q = rng.uniform(0.1, 4.0, n)
        scalar_sum = float(np.sum(q * f.eval_array(p / q)))
        field = WeightedOperatorField(
            [
                (1.0, HermitianMatrix([[pi]]), PositiveDefiniteMatrix([[qi]]))
                for pi, qi in zip(p, q)
            ]
        )
        theta_val = float(theta_divergence(f, field).entries[0, 0].real)
        worst_rel = max(
            worst_rel, abs(theta_val - scalar_sum) / max(1.0, abs(scalar_sum))
        )
        mixture = float(q.sum()) * f.eval_scalar(float(p.sum()) / float(q.sum()))
        worst_gap = min(worst_gap, scalar_sum - mixture)
    elapsed = time.perf_counter() - start
    ok = worst_rel <= 1e-12 and worst_gap >= -1e-10
    _report(
        "criterion 5: scalar reduction on 1000 tuples",
        ok,
        elapsed,
        f"worst rel dev {worst_rel:.2e}, worst mixture gap {worst_gap:.2e}",
    )
    assert worst_rel <= 1e-12
    assert worst_gap >= -1e-10


def test_criterion_6_norm_theorem():
    start = time.perf_counter()
    failures = []
    for f_spec in ({"id": "square"}, {"id": "power", "params": [-1]}, {"id": "neg_log"}):
        from opdiv.funcatalog import from_spec

        f = from_spec(f_spec)
        for dim in range(2, 7):
            result = run_check(
                "THM3_8_NORM", GenConfig(dim=dim, seed=6, trials=200), function=f
            )
            if result.violations:
                failures.append((f.id, dim, result.violations))

    # scalar consequence for the trace and spectral norms
    rng = np.random.default_rng(66)
    worst = np.inf
    for dim in range(2, 7):
        for _ in range(200):
            a = make_pd(rng, dim)
            b = make_pd(rng, dim)
            product = a.entries @ np.linalg.inv(b.entries) @ a.entries
            for k in (1, dim):
                lhs = ky_fan(a.entries, k) ** 2 / ky_fan(b.entries, k)
                rhs = ky_fan(product, k)
                worst = min(worst, rhs - lhs)
    elapsed = time.perf_counter() - start
    ok = not failures and worst >= -1e-8
    _report(
        "criterion 6: Ky Fan norm theorem",
        ok,
        elapsed,
        f"scalar-consequence worst margin {worst:.2e}",
    )
    assert not failures, failures
    assert worst >= -1e-8


def test_criterion_7_determinism(tmp_path, capsys):
    start = time.perf_counter()
    paths = [tmp_path / "run1.json", tmp_path / "run2.json"]
    for path in paths:
        code = main(["verify", "--suite", "all", "--seed", "42", "--out", str(path)])
        assert code == 0
    first = json.loads(paths[0].read_text())
    second = json.loads(paths[1].read_text())
    first.pop("wall_ms")
    second.pop("wall_ms")
    elapsed = time.perf_counter() - start
    ok = first == second
    _report("criterion 7: determinism of verify --suite all --seed 42", ok, elapsed)
    assert first == second
