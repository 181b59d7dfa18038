import csv
import io
import json
import subprocess
import sys

import pytest

from lcsgamma.cli import run


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def csv_rows(text):
    return list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))


def test_lcs_prints_length():
    code, text = invoke("lcs", "--strings", "0011,0101")
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# lcs ") and lines[-1] == "3"


def test_lcs_witness_json():
    code, text = invoke("lcs", "--strings", "0011,0101", "--witness", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["schema_version"] == 1
    assert doc["results"] == [{"length": 3, "witness": "001"}]
    assert doc["config"]["strings"] == "0011,0101"


def test_bounds_row():
    code, text = invoke("bounds", "--k", "2", "--d", "2")
    rows = csv_rows(text)
    assert code == 0 and len(rows) == 1
    assert abs(float(rows[0]["upper_bisect"]) - 0.8665) <= 0.001
    assert "upper_closed=invalid" in rows[0]["flags"]


def test_bounds_grid_sandwich():
    _, text = invoke("bounds", "--k", "2", "--d", "2..14")
    rows = csv_rows(text)
    assert len(rows) == 13
    for r in rows:
        assert float(r["lower_kary"]) <= float(r["upper_bisect"])


def test_coins_mean():
    code, text = invoke("coins", "--d", "3", "--trials", "1000000", "--seed", "7")
    assert code == 0
    row = dict(kv.split("=", 1) for kv in text.splitlines()[-1].split())
    assert abs(float(row["mean_Y"]) - 0.75) <= 0.005
    assert row["expected_Y"] == "3/4"


def test_greedy_trace():
    code, text = invoke("greedy", "--strings", "0011,0101", "--budget", "8", "--trace",
                        "--witness")
    assert code == 0
    assert "# 0 0 0 2 2" in text and "# 2 1 0 2 7" in text
    assert "matched=001" in text and "exhausted=true" in text


def test_diag_command():
    _, text = invoke("diag", "--strings", "01,10", "--budget", "3", "--format", "csv")
    assert csv_rows(text) == [{"budget": "3", "value": "1", "argmax_split": "1;2"}]


def test_seed_echoed_when_generated():
    _, text = invoke("estimate", "--n", "20", "--trials", "3")
    seed = text.splitlines()[0].split("seed=")[1].split()[0]
    _, again = invoke("estimate", "--n", "20", "--trials", "3", "--seed", seed)
    assert again == text


def test_exit_codes():
    assert invoke("lcs", "--strings", "012", "--k", "2")[0] == 2
    assert invoke("bounds", "--k", "1", "--d", "2")[0] == 2
    assert invoke("bounds", "--d", "2..x")[0] == 2
    assert invoke("nonsense")[0] == 2
    assert invoke("estimate", "--d", "3", "--n", "2000", "--trials", "1", "--seed", "1")[0] == 3


def test_resource_message(capsys):
    run(["lcs", "--d", "4", "--n", "300", "--seed", "1"], io.StringIO())
    err = capsys.readouterr().err
    assert err.startswith("lcsgamma: resource limit:") and err.count("\n") == 1


def test_table_empty_grid_header_only():
    code, text = invoke("table", "--d", "", "--seed", "1")
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    assert code == 0 and lines == ["k,d,lower_binary,lower_kary,upper_bisect,upper_closed,"
                                   "epsilon,flags"]


def test_table_mc_ci_calibration():
    args = ["table", "--k", "2", "--d", "2..14", "--mc", "--method", "greedy",
            "--n", "2000", "--trials", "30"]
    first = csv_rows(invoke(*args, "--seed", "1")[1])
    second = csv_rows(invoke(*args, "--seed", "2")[1])
    assert len(first) == 13
    assert first != second
    agree = sum(1 for a, b in zip(first, second)
                if float(b["mc_ci_low"]) <= float(a["mc_mean"]) <= float(b["mc_ci_high"]))
    assert agree >= 0.95 * len(first)


def test_table_mc_skips_oversized_dp():
    _, text = invoke("table", "--d", "2..4", "--mc", "--n", "2000", "--trials", "3", "--seed", "1")
    rows = csv_rows(text)
    assert [r["mc_flag"] for r in rows] == ["exact-dp", "skipped", "skipped"]
    assert 0.77 <= float(rows[0]["mc_mean"]) <= 0.83


def test_csv_cells_finite():
    _, text = invoke("bounds", "--k", "2,3,16", "--d", "2,40,200")
    for row in csv_rows(text):
        for key, value in row.items():
            if key != "flags":
                assert float(value) == float(value) and abs(float(value)) < float("inf")


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text("# grid\nk = 2,4\nd = 2..3\nformat = json\n")
    _, text = invoke("bounds", "--config", str(cfg))
    doc = json.loads(text)
    assert [(r["k"], r["d"]) for r in doc["results"]] == [(2, 2), (2, 3), (4, 2), (4, 3)]
    _, text = invoke("bounds", "--config", str(cfg), "--k", "8", "--format", "csv")
    assert [r["k"] for r in csv_rows(text)] == ["8", "8"]


def test_out_file(tmp_path):
    target = tmp_path / "o.csv"
    code, text = invoke("bounds", "--out", str(target))
    assert code == 0 and text == ""
    assert "upper_bisect" in target.read_text()


def test_codes_command():
    code, text = invoke("codes", "--n", "200", "--sizes", "2,4", "--gamma-hat", "0.8",
                        "--eps", "0.1", "--trials", "5", "--seed", "3")
    rows = csv_rows(text)
    assert code == 0 and len(rows) == 4
    assert list(rows[0]) == ["size", "p", "decodable_fraction", "trials", "seed"]


@pytest.mark.parametrize("argv", [
    ["coins", "--d", "5", "--trials", "200000", "--seed", "4"],
    ["estimate", "--n", "120", "--trials", "16", "--seed", "5", "--format", "json"],
    ["estimate", "--kind", "diagonal", "--n", "60", "--trials", "8", "--seed", "5"],
    ["codes", "--n", "120", "--sizes", "2,5", "--p", "0.1,0.3", "--trials", "4", "--seed", "6"],
    ["table", "--d", "2..3", "--mc", "--n", "80", "--trials", "6", "--seed", "7"],
])
def test_workers_byte_identical(argv):
    outputs = {invoke(*argv, "--workers", str(w))[1] for w in (1, 2, 4)}
    assert len(outputs) == 1


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "lcsgamma.cli", "lcs", "--strings", "0011,0101"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[-1] == "3"
