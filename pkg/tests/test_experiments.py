import numpy as np
import pytest

from isinglearn import (ERROR_CSV_HEADER, ExperimentManifest, InputError,
                        NMIN_CSV_HEADER, loglog_slope, manifest_from_dict,
                        run_error_curve, run_nmin_search, semilog_slope,
                        write_rows_csv)


def test_manifest_validation():
    with pytest.raises(InputError):
        ExperimentManifest(kind="nope", seed=1)
    with pytest.raises(InputError):
        ExperimentManifest(kind="error_vs_n", seed=1, family="glassy")
    with pytest.raises(InputError):
        ExperimentManifest(kind="error_vs_n", seed=1, sampler="mcmc")
    with pytest.raises(InputError):
        ExperimentManifest(kind="error_vs_n", seed=1, trials=0)
    with pytest.raises(InputError):
        ExperimentManifest(kind="nmin_vs_beta", seed=1, rel_width=0.0)
    with pytest.raises(InputError):
        ExperimentManifest(kind="nmin_vs_beta", seed=1, n_start=100, n_max=10)
    with pytest.raises(InputError):
        manifest_from_dict({"kind": "error_vs_n", "seed": 1, "bogus": 2})
    m = manifest_from_dict({"kind": "error_vs_n", "seed": 7,
                            "ns": [100, 200], "betas": [0.5]})
    assert m.ns == (100, 200) and m.betas == (0.5,)


def _tiny_nmin_manifest(out=None):
    return ExperimentManifest(kind="nmin_vs_beta", seed=2024, side=2,
                              betas=(0.8,), trials=3, n_start=250,
                              rel_width=0.25, out=out)


def test_nmin_search_is_deterministic():
    rows_a = run_nmin_search(_tiny_nmin_manifest())
    rows_b = run_nmin_search(_tiny_nmin_manifest())
    assert len(rows_a) == 1
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_seconds"}
                          for r in rows]
    assert strip(rows_a) == strip(rows_b)
    row = rows_a[0]
    assert row["param"] == 0.8
    assert row["success"] is True
    assert 1 <= row["n_min"] <= 10 ** 6
    assert row["trials"] == 3 and row["seed"] == 2024


def test_nmin_csv_reproducible_up_to_timing(tmp_path):
    path_a, path_b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_nmin_search(_tiny_nmin_manifest(out=str(path_a)))
    run_nmin_search(_tiny_nmin_manifest(out=str(path_b)))
    lines_a = path_a.read_text().splitlines()
    lines_b = path_b.read_text().splitlines()
    assert len(lines_a) == len(lines_b) == 3
    assert lines_a[0].startswith("# generated=")
    assert "rng=numpy-pcg64" in lines_a[0]
    assert lines_a[1] == NMIN_CSV_HEADER
    # Data rows agree except for the trailing wall-clock column.
    for a, b in zip(lines_a[2:], lines_b[2:]):
        assert a.split(",")[:-1] == b.split(",")[:-1]


def test_nmin_gives_up_at_n_max():
    # Penalties above 1 force the all-zero fit, so recovery can never
    # happen at these sizes and the search must report failure.
    m = ExperimentManifest(kind="nmin_vs_beta", seed=5, side=2, betas=(1.4,),
                           trials=2, n_start=4, n_max=8)
    rows = run_nmin_search(m)
    assert rows[0]["n_min"] == 8
    assert rows[0]["success"] is False


def test_nmin_vs_p_param_column():
    m = ExperimentManifest(kind="nmin_vs_p", seed=11, sides=(2,), beta=0.8,
                           trials=2, n_start=500, rel_width=0.3)
    rows = run_nmin_search(m)
    assert rows[0]["param"] == 4.0
    with pytest.raises(InputError):
        run_nmin_search(ExperimentManifest(kind="nmin_vs_p", seed=1, trials=1))
    with pytest.raises(InputError):
        run_nmin_search(ExperimentManifest(kind="error_vs_n", seed=1,
                                           ns=(10,)))


def test_error_curve_rows_and_csv(tmp_path):
    out = tmp_path / "err.csv"
    m = ExperimentManifest(kind="error_vs_n", seed=3, side=2, beta=0.8,
                           ns=(500, 8000), trials=2, out=str(out))
    rows = run_error_curve(m)
    assert [r["n"] for r in rows] == [500, 8000]
    assert rows[0]["mean_error"] > rows[1]["mean_error"] > 0.0
    lines = out.read_text().splitlines()
    assert lines[1] == ERROR_CSV_HEADER
    assert len(lines) == 4
    assert [ln.split(",")[0] for ln in lines[2:]] == ["500", "8000"]
    with pytest.raises(InputError):
        run_error_curve(ExperimentManifest(kind="nmin_vs_beta", seed=1,
                                           betas=(0.5,)))
    with pytest.raises(InputError):
        run_error_curve(ExperimentManifest(kind="error_vs_n", seed=1))


def test_slope_helpers_exact_on_synthetic_laws():
    xs = np.array([1e3, 4e3, 1.6e4, 6.4e4])
    assert loglog_slope(xs, 3.5 * xs ** -0.5) == pytest.approx(-0.5, abs=1e-12)
    xs2 = np.array([0.5, 0.8, 1.1, 1.4])
    assert semilog_slope(xs2, 2.0 * np.exp(1.7 * xs2)) == pytest.approx(
        1.7, abs=1e-12)


def test_write_rows_csv_layout(tmp_path):
    path = tmp_path / "rows.csv"
    write_rows_csv(path, "a,b", [[1, 2], [3, 4]])
    text = path.read_text()
    assert text.endswith("\n")
    lines = text.splitlines()
    assert lines[0].startswith("# generated=") and lines[1] == "a,b"
    assert lines[2:] == ["1,2", "3,4"]
