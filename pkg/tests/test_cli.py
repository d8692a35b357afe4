import csv
import io
import json

import pytest

from urllc_ec.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, fmt, main, parse_grid

from .conftest import DATA, USECASES

FIG3 = str(DATA / "fig3.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def perfect_file(tmp_path):
    path = tmp_path / "perfect.json"
    path.write_text(json.dumps({
        "name": "perfect", "p1": 1.0, "p2": 1.0, "p3": 1.0,
        "d_max": 2.0, "service_rate_S": 3.0, "n_max": 2, "r_th": 0.99999,
    }))
    return str(path)


def test_fmt():
    assert fmt(0.1 + 0.2) == "0.3"
    assert fmt(1234567.0) == "1234567"
    assert fmt(3) == "3"
    assert fmt(None) == "null"
    assert fmt(False) == "false"


def test_grid_parsing():
    grid = parse_grid("0.1:10:3")
    assert grid == pytest.approx([0.1, 1.0, 10.0])
    for bad in ("1:0.1:3", "0:1:3", "0.1:1", "a:b:c", "0.1:1:1"):
        with pytest.raises(Exception):
            parse_grid(bad)


def test_region_feasible(capsys, perfect_file):
    code, out, _ = run(capsys, "region", "--scenario", perfect_file)
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["feasible"] is True
    assert report["theta_min"] > 0


def test_region_infeasible_still_reports(capsys):
    code, out, _ = run(capsys, "region", "--scenario", str(USECASES / "telepresence.json"))
    assert code == EXIT_INFEASIBLE
    report = json.loads(out)
    assert report["feasible"] is False
    assert report["achievable_reliability"] == pytest.approx(0.9994, abs=1e-9)


def test_region_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p1": 2.0, "d_max": 5}')
    code, _, err = run(capsys, "region", "--scenario", str(bad))
    assert code == EXIT_INPUT
    assert "p1" in err
    bad.write_text("{not json")
    assert run(capsys, "region", "--scenario", str(bad))[0] == EXIT_INPUT
    assert run(capsys, "region", "--scenario", str(tmp_path / "missing.json"))[0] == EXIT_INPUT


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--scenario", FIG3, "--grid", "oops"])
    assert exc.value.code == EXIT_INPUT
    capsys.readouterr()


def test_region_table_format(capsys, tmp_path, perfect_file):
    out_path = tmp_path / "region.txt"
    code, out, _ = run(capsys, "region", "--scenario", perfect_file, "--format", "table", "--out", str(out_path))
    assert code == EXIT_OK and out == ""
    assert "theta_max" in out_path.read_text()


def _sweep(capsys, *extra):
    code, out, _ = run(capsys, "sweep", "--scenario", FIG3, *extra)
    assert code == EXIT_OK
    return out


def test_sweep_csv(capsys):
    text = _sweep(capsys, "--grid", "0.1:10:41", "--n", "1,2,3")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == "theta,n,ec_bpcu,reliability,unreliability,dvp_first_attempt"
    assert len(rows) == 41 * 3
    by_n = {n: [r for r in rows if r["n"] == str(n)] for n in (1, 2, 3)}
    for n, series in by_n.items():
        ecs = [float(r["ec_bpcu"]) for r in series]
        assert all(b <= a for a, b in zip(ecs, ecs[1:]))
    assert float(by_n[1][0]["ec_bpcu"]) == pytest.approx(3.0, rel=0.02)
    assert float(by_n[2][-1]["reliability"]) == pytest.approx(0.999999, abs=1e-6)


def test_sweep_is_deterministic(capsys):
    assert _sweep(capsys, "--grid", "0.5:5:7") == _sweep(capsys, "--grid", "0.5:5:7")


def test_sweep_rejects_attempts_beyond_limit(capsys):
    code, _, err = run(capsys, "sweep", "--scenario", FIG3, "--n", "4")
    assert code == EXIT_INPUT
    assert "n_max" in err


def test_sweep_json(capsys):
    rows = json.loads(_sweep(capsys, "--grid", "1:2:2", "--n", "2", "--format", "json"))
    assert [r["theta"] for r in rows] == pytest.approx([1.0, 2.0])


def test_table_shipped(capsys):
    code, out, _ = run(capsys, "table", "--format", "json")
    assert code == EXIT_OK
    rows = json.loads(out)
    assert len(rows) == 6
    nav = next(r for r in rows if r["use_case"].startswith("Navigation"))
    assert (nav["d_max"], nav["r_th"], nav["n"]) == (10, 0.9999999, 3)
    assert list(rows[0]) == [
        "use_case", "d_max", "r_th", "n", "theta_min", "theta_max", "achievable_reliability", "ec_bpcu",
    ]


def test_table_empty_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "table", str(tmp_path), "--format", "csv")
    assert code == EXIT_OK
    assert out.strip() == "use_case,d_max,r_th,n,theta_min,theta_max,achievable_reliability,ec_bpcu"


def test_table_reports_bad_files(capsys, tmp_path):
    (tmp_path / "good.json").write_text((USECASES / "navigation_systems.json").read_text())
    (tmp_path / "bad.json").write_text("[]")
    code, out, err = run(capsys, "table", str(tmp_path), "--format", "csv")
    assert code == EXIT_INPUT
    assert "bad.json" in err
    assert len(out.strip().splitlines()) == 2


def test_fbl(capsys):
    code, out, _ = run(capsys, "fbl", "--snr", "15", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["capacity_C"] == pytest.approx(4.0)
    assert report["blocklength_r"] == pytest.approx(77.516684093075759199, rel=1e-12)
    assert report["rate_S"] * report["blocklength_r"] == pytest.approx(256.0, rel=1e-9)
    assert report["t_tx_ms"] == pytest.approx(0.0038758342046537879599, rel=1e-12)


def test_fbl_invalid(capsys):
    assert run(capsys, "fbl", "--snr", "15", "--epsilon", "1.5")[0] == EXIT_INPUT
    assert run(capsys, "fbl", "--snr", "0")[0] == EXIT_INPUT


def test_simulate(capsys):
    argv = ("simulate", "--scenario", FIG3, "--theta", "1", "--n", "2", "--trials", "1000000", "--seed", "42")
    code, first, _ = run(capsys, *argv)
    assert code == EXIT_OK
    report = json.loads(first)
    assert set(report) == {"estimate", "standard_error", "trials", "seed", "analytic_value", "z_score"}
    assert abs(report["z_score"]) <= 3
    assert run(capsys, *argv)[1] == first


def test_simulate_single_trial(capsys):
    code, out, _ = run(capsys, "simulate", "--scenario", FIG3, "--theta", "1", "--trials", "1")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["standard_error"] is None and report["z_score"] is None
