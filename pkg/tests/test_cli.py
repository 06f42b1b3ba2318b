import csv
import io
import re

import pytest

from helpers import diamond
from stochroute import graph
from stochroute.cli import EXIT_INVALID, EXIT_NO_INCUMBENT, EXIT_OK, EXIT_USAGE, main
from stochroute.generator import Family, GenSpec, generate


@pytest.fixture
def g_file(tmp_path):
    path = tmp_path / "diamond.json"
    graph.save_file(diamond(), path)
    return path


def _cells(line):
    parts = re.split(r"(?<!\\)\|", line.strip()[1:-1])
    return [c.strip().replace("\\|", "|") for c in parts]


def _md_rows(text):
    lines = [ln for ln in text.splitlines() if ln.startswith("|")]
    return _cells(lines[0]), [_cells(ln) for ln in lines[2:]]


def test_sspp_row(g_file, capsys):
    assert main(["sspp", str(g_file), "--risk", "ptau", "--tau", "4"]) == EXIT_OK
    head, rows = _md_rows(capsys.readouterr().out)
    assert len(rows) == 1
    assert float(rows[0][head.index("Opt. sol. P(≥τ)")]) == 0.0


def test_srcspp_rows(g_file, capsys):
    assert main(["srcspp", str(g_file), "--risk", "ptau", "--tau", "4", "--rho0", "0.1", "--format", "csv"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert float(rows[0]["c_P"]) == 10
    assert main(["srcspp", str(g_file), "--risk", "ptau", "--tau", "4", "--rho0", "-0.1", "--format", "csv"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["c_P"] == "INFEAS."
    code = main(["srcspp", str(g_file), "--risk", "ptau", "--tau", "4", "--rho0", "0.1", "--time-limit", "0"])
    assert code == EXIT_NO_INCUMBENT


def test_usage_errors(g_file, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sspp", str(g_file)])
    assert exc.value.code == EXIT_USAGE
    assert main(["sspp", str(g_file), "--risk", "cvar"]) == EXIT_USAGE
    assert main(["srcspp", str(g_file), "--risk", "mean", "--alpha", "0.5", "--rho0", "1"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_invalid_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": 2, "origin": 0, "destination": 1, "arcs": ['
                   '{"tail": 0, "head": 1, "cost": 1, "travel": {"offset": 1, "pmf": [0.5, 0.4]}}]}')
    assert main(["sota", str(bad)]) == EXIT_INVALID


def test_generate_then_sota(tmp_path, capsys):
    out = tmp_path / "g10R.json"
    assert main(["generate", "--width", "10", "--family", "generic", "--seed", "1", "-o", str(out)]) == EXIT_OK
    assert out.read_bytes() == graph.save(generate(GenSpec(10, Family.GENERIC, 1)))
    dump = tmp_path / "z.csv"
    assert main(["sota", str(out), "--dump-cdf", "0", str(dump)]) == EXIT_OK
    head, rows = _md_rows(capsys.readouterr().out)
    assert head == ["Instance", "|V|", "|A|", "ℓ", "Upd.", "Exp.", "CPU time (s)"]
    assert rows[0][1:3] == ["100", "360"]
    table = list(csv.DictReader(dump.open()))
    assert int(rows[0][3]) == len(table)
    assert float(table[-1]["cdf"]) == 1.0


def test_oracle_commands(g_file, capsys):
    assert main(["oracle", "paths", str(g_file)]) == EXIT_OK
    assert capsys.readouterr().out.split("\n")[:2] == ["0 1 3", "0 2 3"]
    assert main(["oracle", "sspp", str(g_file), "--risk", "ptau", "--tau", "4"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0.0 0 2 3"
    assert main(["oracle", "srcspp", str(g_file), "--risk", "ptau", "--tau", "4", "--rho0", "0.1"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "10.0 0 2 3"


@pytest.mark.slow
def test_bench_cardinality(capsys):
    code = main(["bench", "--families", "gamma", "--widths", "10", "--seed", "1", "--format", "csv",
                 "--time-limit", "10"])
    assert code == EXIT_OK
    sections = capsys.readouterr().out.split("# ")[1:]
    # each section: title line, header, then one line per row
    counts = {s.splitlines()[0]: len([ln for ln in s.splitlines()[1:] if ln.strip()]) - 1 for s in sections}
    assert counts["Instances"] == 1 and counts["SOTA"] == 1
    assert counts["SSPP, P(X >= tau)"] == 3 and counts["SSPP, CVaR"] == 3
    srcspp = [v for k, v in counts.items() if k.startswith("SRCSPP")]
    assert sorted(srcspp) == [3, 3]
