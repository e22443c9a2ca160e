import numpy as np
import pytest

from ququat.basis import make_basis
from ququat.tables import FormSpec, claimed_table1, claimed_table2, verify_tables
from ququat.teleport import PCClass

SAMPLES = [
    [0.5, 0.5, 0.5, 0.5],
    [0.6, 0.3j, -0.5, 0.2 - 0.5j],
    [0.1, 0.7, 0.2j, -0.68],
    [0.8, -0.1, 0.4 + 0.3j, 0.3j],
    [0.25, 0.35 - 0.4j, 0.55, 0.6j],
]


@pytest.fixture(scope="module")
def report():
    return verify_tables(make_basis(2.0), SAMPLES)


def test_form_parsing():
    f = FormSpec.parse("sqrt2*U(3,1,3)")
    assert f.letter == "U" and f.indices == (3, 1, 3) and f.prefactor == pytest.approx(np.sqrt(2))
    assert FormSpec.parse("-iB(2,2)").prefactor == -1j
    with pytest.raises(ValueError):
        FormSpec.parse("V(1,1)")


def test_claimed_row_counts():
    t1, t2 = claimed_table1(), claimed_table2()
    assert len(t1) == 32
    assert len({r.pc_class for r in t1}) == 32
    assert len(t2) == 256
    assert all(r.pc_class.group == "III.II" for r in t1)


def test_table1_first_row():
    r = claimed_table1()[0]
    assert r.bob_form.label() == "B(1,0,0)" and r.correction.label() == "U(1,0)"
    assert r.fidelity_id == "F1"


def test_table2_first_row():
    r = claimed_table2()[0]
    assert r.pc_class == PCClass.parse("(0,4,4,4)")
    assert r.bob_form.label() == "B(2,0)" and r.correction.label() == "U(2,0)" and r.fidelity_id == "F7"


def test_table1_fidelity_forms_confirmed(report):
    rows = report.rows(1)
    assert len(rows) == 32
    assert all(c.bob_match and c.fidelity_match for c in rows)


def test_table2_diff_is_nonempty_and_machine_readable(report):
    assert report.diffs
    for d in report.diffs:
        assert set(d) == {"table", "pc_class", "issue", "claimed", "derived"}
        PCClass.parse(d["pc_class"])


def test_duplicated_row_flagged(report):
    dup = [d for d in report.diffs if d["pc_class"] == "(4,4,0,2)" and d["issue"].startswith("listed 2 times")]
    assert len(dup) == 1


def test_mismatched_entries_flagged(report):
    flagged = {d["pc_class"] for d in report.diffs if d["issue"] == "printed correction differs from derived correction"}
    assert {"(4,0,4,3)", "(0,4,4,1)", "(2,2,0,2)"} <= flagged


def test_missing_group_iv_classes(report):
    missing = {d["pc_class"] for d in report.diffs if d["issue"] == "missing from table"}
    assert missing == {"(0,4,1,1)", "(2,2,0,3)", "(4,0,1,3)", "(4,3,0,3)"}


def test_other_table2_rows_clean(report):
    bad = {c.pc_class.label() for c in report.rows(2) if not c.ok}
    assert bad <= {"(4,0,4,3)", "(0,4,4,1)", "(2,2,0,2)", "(4,4,0,2)"}


def test_needs_three_samples():
    with pytest.raises(ValueError):
        verify_tables(make_basis(2.0), SAMPLES[:2])
