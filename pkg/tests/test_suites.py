"""Suite runner: mapping, determinism, skip semantics, report rendering."""

from __future__ import annotations

import json

import numpy as np
import pytest

import toruskms as tk


def _small_cfg(seed: int = 0) -> tk.SuiteConfig:
    return tk.SuiteConfig(samples=20, s_samples=6, moment_box=3, seed=seed, fuzz_count=60)


def test_suite_names_cover_all_checks():
    assert set(tk.SUITES) == {"kms", "subinv", "roundtrip", "consistency", "reconcile", "all"}
    assert tk.SUITES["kms"] == ("C05", "C06", "C11")
    assert tk.SUITES["subinv"] == ("C01", "C02", "C04")
    assert tk.SUITES["roundtrip"] == ("C03", "C09", "C10")
    assert tk.SUITES["consistency"] == ("C07",)
    assert tk.SUITES["reconcile"] == ("C08",)
    assert set(tk.SUITES["all"]) == {f"C{i:02d}" for i in range(1, 12)}


def test_all_checks_pass_on_line_tower(line_scenario, line_point_thread):
    rows = tk.run_checks(tk.SUITES["all"], line_scenario, line_point_thread, _small_cfg())
    assert rows
    assert tk.overall_pass(rows)
    assert all(row.status in ("pass", "skip") for row in rows)


def test_subset_rows_match_full_run(line_scenario, line_uniform_thread):
    cfg = _small_cfg(seed=11)
    full = tk.run_checks(tk.SUITES["all"], line_scenario, line_uniform_thread, cfg)
    sub = tk.run_checks(("C05",), line_scenario, line_uniform_thread, cfg)
    full_c05 = [r for r in full if r.check_id == "C05"]
    assert [(r.quantity, r.value, r.residual) for r in full_c05] == [
        (r.quantity, r.value, r.residual) for r in sub
    ]


def test_runs_are_deterministic_across_schedulers(line_scenario, line_uniform_thread):
    cfg = _small_cfg(seed=5)
    parallel = tk.run_checks(tk.SUITES["all"], line_scenario, line_uniform_thread, cfg)
    serial = tk.run_checks(
        tk.SUITES["all"], line_scenario, line_uniform_thread, cfg, parallel=False
    )
    assert [(r.check_id, r.quantity, r.value, r.residual) for r in parallel] == [
        (r.check_id, r.quantity, r.value, r.residual) for r in serial
    ]


def test_seed_changes_results(line_scenario, line_uniform_thread):
    one = tk.run_checks(("C01",), line_scenario, line_uniform_thread, _small_cfg(seed=1))
    two = tk.run_checks(("C01",), line_scenario, line_uniform_thread, _small_cfg(seed=2))
    assert one[0].residual != two[0].residual


def test_reconcile_skips_off_line_dimensions(planar_scenario, planar_uniform_thread):
    rows = tk.run_checks(("C08",), planar_scenario, planar_uniform_thread, _small_cfg())
    assert len(rows) == 1
    assert rows[0].status == "skip"
    assert "d = k = 1" in rows[0].quantity
    assert tk.overall_pass(rows)  # a skip is not a failure


def test_unknown_check_id_rejected(line_scenario, line_uniform_thread):
    with pytest.raises(ValueError):
        tk.run_checks(("C99",), line_scenario, line_uniform_thread, _small_cfg())
    with pytest.raises(ValueError):
        tk.run_suite("nope", line_scenario, line_uniform_thread, _small_cfg())


def test_corrupted_thread_fails_consistency(line_scenario):
    good = tk.build_thread(line_scenario, kind="point", y1=np.array([0.3]))
    measures = list(good.measures)
    measures[1] = tk.AtomicMeasure(np.array([[0.77]]), np.array([1.0]))
    bad = tk.SolenoidMeasureThread(line_scenario, tuple(measures))
    rows = tk.run_checks(("C07",), line_scenario, bad, _small_cfg())
    assert not tk.overall_pass(rows)
    assert any(r.status == "fail" for r in rows)


def test_render_text_contains_verdict(line_scenario, line_uniform_thread):
    rows = tk.run_checks(("C02",), line_scenario, line_uniform_thread, _small_cfg())
    text = tk.render_text(rows)
    assert "[C02]" in text
    assert "ALL CHECKS PASSED" in text


def test_render_json_round_trips(line_scenario, line_uniform_thread):
    rows = tk.run_checks(("C02", "C03"), line_scenario, line_uniform_thread, _small_cfg())
    payload = json.loads(tk.render_json(rows, {"seed": 0}))
    assert payload["overall_pass"] is True
    assert payload["config"] == {"seed": 0}
    assert len(payload["checks"]) == len(rows)
    first = payload["checks"][0]
    for key in (
        "check_id",
        "level",
        "quantity",
        "value_re",
        "value_im",
        "reference_re",
        "reference_im",
        "residual",
        "bound",
        "pass",
    ):
        assert key in first


def test_render_csv_has_contract_columns(line_scenario, line_uniform_thread):
    rows = tk.run_checks(("C02",), line_scenario, line_uniform_thread, _small_cfg())
    lines = tk.render_csv(rows).strip().splitlines()
    assert lines[0] == (
        "check_id,level,quantity,value_re,value_im,reference_re,reference_im,"
        "residual,bound,pass"
    )
    assert len(lines) == len(rows) + 1
