import csv
import io

import pytest

from ququat.analysis import mavfi
from ququat.basis import make_basis
from ququat.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, fmt, main, parse_complex


def run(capsys, *argv):
    rc = main(list(argv))
    return rc, capsys.readouterr().out


def sheet(text):
    """Split output into (header + rows) and '#' notes."""
    lines = text.splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    notes = dict(ln[2:].split("=", 1) for ln in lines if ln.startswith("# ") and "=" in ln)
    return list(csv.reader(io.StringIO("\n".join(body)))), notes


def test_complex_format_round_trips():
    z = 0.1 - 2.5e-7j
    assert parse_complex(fmt(z)) == z
    assert fmt(0.1) == "0.10000000000000001"


def test_states(capsys):
    rc, out = run(capsys, "states", "--alpha", "1")
    assert rc == EXIT_OK
    rows, notes = sheet(out)
    assert rows[0] == ["name", "j", "k", "value"]
    r = [float(v) for name, _, _, v in rows[1:] if name == "r"]
    assert r == list(make_basis(1.0).r)
    assert float(notes["orthonormality_deviation"]) < 1e-12


def test_states_domain_error(capsys):
    rc, _ = run(capsys, "states", "--alpha", "0.05")
    assert rc == EXIT_DOMAIN


def test_usage_errors(capsys):
    assert run(capsys, "states")[0] == EXIT_USAGE
    assert run(capsys, "teleport", "--alpha", "1", "--alpha-start", "1", "--alpha-stop", "2",
               "--alpha-step", "0.5")[0] == EXIT_USAGE
    assert run(capsys, "teleport", "--alpha", "1", "--info-c", "1,0,0")[0] == EXIT_USAGE
    assert run(capsys, "sweep", "--alpha", "1", "--quantity", "nope")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["teleport", "--bogus"])
    assert err.value.code == EXIT_USAGE


def test_teleport_rows(capsys):
    rc, out = run(capsys, "teleport", "--alpha", "2", "--info-c=0.6,0.3i,-0.5,0.2-0.5i")
    assert rc == EXIT_OK
    rows, notes = sheet(out)
    header, body = rows[0], rows[1:]
    assert header == ["code", "symbols", "group", "probability", "purity", "correction",
                      "success", "fidelity_form", "fidelity"]
    assert len(body) == 369
    assert abs(sum(float(r[3]) for r in body) - 1) < 1e-9
    assert abs(float(notes["probability_sum"]) - 1) < 1e-9
    perfect = next(r for r in body if r[1] == "(4 0 4 4)")
    assert abs(float(perfect[8]) - 1) < 1e-10
    assert all(len(r[0]) == 9 for r in body)


def test_teleport_worst_case_footer_matches_minimizer(capsys):
    rc, out = run(capsys, "teleport", "--alpha", "3.2", "--worst-case", "--fail-policy", "overlap")
    assert rc == EXIT_OK
    _, notes = sheet(out)
    fav = float(notes["favg"])
    assert fav == pytest.approx(mavfi(make_basis(3.2), "overlap"), abs=1e-12)
    assert fav >= 0.99


def test_generate(capsys):
    rc, out = run(capsys, "generate", "--alpha", "3")
    rows, _ = sheet(out)
    assert rc == EXIT_OK and rows[0] == ["j", "probability", "closed_form", "ecs_overlap"]
    for r in rows[1:]:
        assert abs(float(r[1]) - 0.25) <= 0.01
        assert float(r[3]) >= 1 - 1e-10


def test_sweep_default_grid_has_39_rows(capsys, tmp_path):
    plot = tmp_path / "p.dat"
    rc, out = run(capsys, "sweep", "--quantity", "P_I_max", "--plot-data", str(plot))
    rows, _ = sheet(out)
    assert rc == EXIT_OK and rows[0] == ["alpha", "quantity", "value"]
    assert len(rows) - 1 == 39
    lines = plot.read_text().splitlines()
    assert lines[0] == "# alpha P_I_max" and len(lines) == 40


@pytest.mark.slow
def test_sweep_mavfi_default_grid(capsys):
    rc, out = run(capsys, "sweep", "--quantity", "MAVFI", "--workers", "4")
    rows, _ = sheet(out)
    assert rc == EXIT_OK and len(rows) - 1 == 39


def test_sweep_below_guard(capsys):
    rc, _ = run(capsys, "sweep", "--quantity", "P_I_max", "--alpha-start", "0.05", "--alpha-stop", "1",
                "--alpha-step", "0.5")
    assert rc == EXIT_DOMAIN


def test_verify_tables_emits_diffs(capsys):
    rc, out = run(capsys, "verify-tables")
    assert rc == EXIT_OK
    _, notes = sheet(out)
    assert int(notes["diffs"]) > 0
    diff_part = out.split("table,class,issue,claimed,derived\n", 1)[1]
    assert "(4 4 0 2)" in diff_part


def test_oracle_check(capsys):
    rc, out = run(capsys, "oracle-check", "--alpha", "2")
    _, notes = sheet(out)
    assert rc == EXIT_OK and float(notes["max_deviation"]) < 1e-8


def test_oracle_check_resource_error(capsys):
    assert run(capsys, "oracle-check", "--alpha", "2", "--cutoff-override", "1000")[0] == EXIT_DOMAIN


@pytest.mark.parametrize("argv", [
    ["states", "--alpha", "1.3"],
    ["teleport", "--alpha", "1.7", "--info-eps", "1,0.5,0,0.2i"],
    ["verify-tables", "--alpha", "2.5"],
])
def test_outputs_are_byte_identical(capsys, tmp_path, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == EXIT_OK
    assert main(argv + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_table_format(capsys):
    rc, out = run(capsys, "generate", "--alpha", "2", "--format", "table")
    assert rc == EXIT_OK
    assert out.splitlines()[0].split() == ["j", "probability", "closed_form", "ecs_overlap"]
