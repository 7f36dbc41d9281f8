import json

import numpy as np
import pytest

from hetcov import (
    SimConfig,
    SolveOptions,
    SweepMode,
    SweepSpec,
    read_rows,
    run_sweep,
    validate_rows,
    write_rows,
)


@pytest.fixture(scope="module")
def small_rows(threetier):
    spec = SweepSpec(values=(5e5, 1e6), modes=(SweepMode.JOINT, SweepMode.EQUAL_FRACTIONS))
    return run_sweep(threetier, spec, opts=SolveOptions(restarts=2), seed=1)


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(values=(), modes=(SweepMode.JOINT,))
    with pytest.raises(ValueError):
        SweepSpec(values=(1e6, 5e5), modes=(SweepMode.JOINT,))  # not increasing
    with pytest.raises(ValueError):
        SweepSpec(values=(1e6,), modes=())
    with pytest.raises(ValueError):
        SweepSpec(values=(1e6,), modes=(SweepMode.JOINT,), variable="one_tier")
    with pytest.raises(ValueError):
        SweepSpec(values=(1e6,), modes=(SweepMode.JOINT,), tier_index=0)


def test_row_grid_shape_and_order(small_rows):
    assert len(small_rows) == 4
    assert [r.threshold for r in small_rows] == [5e5, 5e5, 1e6, 1e6]
    assert [r.mode for r in small_rows] == ["joint", "equal_fractions"] * 2
    for row in small_rows:
        assert row.mc_estimate is None
        assert len(row.assoc) == 3
        assert row.config_hash


def test_equal_fraction_rows_have_matching_splits(small_rows):
    for row in small_rows:
        if row.mode == "equal_fractions":
            assert row.assoc == row.spectrum


def test_implied_bias_normalization(small_rows):
    for row in small_rows:
        live = [b for b in row.biases if b > 0]
        assert min(live) == pytest.approx(1.0)


def test_csv_and_json_agree(small_rows, tmp_path):
    csv_path = tmp_path / "rows.csv"
    json_path = tmp_path / "rows.json"
    write_rows(small_rows, csv_path, "csv")
    write_rows(small_rows, json_path, "json")
    from_csv = read_rows(csv_path)
    from_json = read_rows(json_path)
    assert len(from_csv) == len(from_json) == 4
    for a, b in zip(from_csv, from_json):
        assert a["mode"] == b["mode"]
        assert a["objective"] == pytest.approx(b["objective"], rel=1e-9)
        assert a["converged"] is True and b["converged"] is True
        assert a["mc_estimate"] is None and b["mc_estimate"] is None


def test_csv_layout(small_rows, tmp_path):
    path = tmp_path / "rows.csv"
    write_rows(small_rows, path, "csv")
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "threshold,mode,objective,A_1,A_2,A_3,w_1,w_2,w_3,B_1,B_2,B_3,"
        "converged,mc_estimate,mc_stderr,config_hash,seed,tolerance"
    )
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "500000"
    assert first[1] == "joint"
    # ten significant digits on floats
    assert len(first[2].replace(".", "").replace("-", "").lstrip("0")) <= 10


def test_monte_carlo_columns(threetier):
    spec = SweepSpec(values=(1e6,), modes=(SweepMode.EQUAL_FRACTIONS,))
    rows = run_sweep(threetier, spec, sim=SimConfig(num_drops=3000, seed=5), seed=5)
    row = rows[0]
    assert row.mc_estimate is not None
    assert abs(row.mc_estimate - row.objective) < 0.05
    assert 0.0 < row.mc_stderr < 0.02


def test_one_tier_sweep_only_moves_that_tier(threetier):
    spec = SweepSpec(
        values=(5e5, 2e6),
        modes=(SweepMode.EQUAL_FRACTIONS,),
        variable="one_tier",
        tier_index=2,
    )
    rows = run_sweep(threetier, spec)
    # raising the pico target shrinks the pico share under equal fractions
    assert rows[1].assoc[2] < rows[0].assoc[2]
    assert rows[0].config_hash != rows[1].config_hash


def test_nonconvergence_recorded_not_raised(threetier):
    opts = SolveOptions(tolerance=1e-15, max_iterations=3, restarts=0)
    spec = SweepSpec(values=(1e6,), modes=(SweepMode.JOINT,))
    rows = run_sweep(threetier, spec, opts=opts)
    assert rows[0].converged is False
    assert 0.0 < rows[0].objective <= 1.0


def test_validate_rows_accepts_good_files(small_rows, tmp_path):
    path = tmp_path / "rows.csv"
    write_rows(small_rows, path, "csv")
    validate_rows(read_rows(path))  # must not raise


def test_validate_rows_rejects_corruption(small_rows, tmp_path):
    path = tmp_path / "rows.csv"
    write_rows(small_rows, path, "csv")
    text = path.read_text()
    bad = text.replace("equal_fractions", "equal_plutonium", 1)
    path.write_text(bad)
    with pytest.raises(ValueError):
        validate_rows(read_rows(path))

    path.write_text(text)
    records = read_rows(path)
    records[0]["A_1"] = 0.9  # break the simplex sum
    with pytest.raises(ValueError):
        validate_rows(records)


def test_write_rows_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        write_rows([], tmp_path / "empty.csv", "csv")
    with pytest.raises(ValueError):
        write_rows([], tmp_path / "empty.xml", "xml")
