import io

import pytest

from todacalc.database import DatabaseError, NotInDatabase, dump_database, load_database, lookup_group
from todacalc.wedge import WedgeSpace


def test_group_record_orders():
    db = load_database(
        "gen omega 14 16 ?\ngen nu 5 3 8\ngen sigmabar 6 19 ?\ngen zetabar 6 19 ?\n"
        "group pi 33 S 14 basis omega_14.nu_30:2 sigmabar_14:2 zetabar_14:8 Toda"
    )
    g = lookup_group(db, 33, 14)
    assert g.orders == (2, 2, 8)
    assert g.citation == "Toda"


def test_empty_stream():
    db = load_database(io.StringIO(""))
    assert db.is_empty


def test_trivial_by_table_vs_connectivity(db):
    g = lookup_group(db, 33, 20)
    assert g.is_trivial and g.status == "table"
    g = lookup_group(db, 12, 13)
    assert g.is_trivial and g.status == "connectivity"


def test_lookups(db):
    assert lookup_group(db, 22, 13).shape() == "Z/2 + Z/2 + Z/2"
    assert lookup_group(db, 18, 6).names == ("w_6.sigma_11",)
    assert lookup_group(db, 6, 6).shape() == "Z_(2)"
    with pytest.raises(NotInDatabase):
        lookup_group(db, 26, 9)


def test_wedge_lookup_single_summand(db):
    assert lookup_group(db, 33, WedgeSpace((13,))) == lookup_group(db, 33, 13)


def test_round_trip(db):
    again = load_database(dump_database(db))
    assert again == db
    assert dump_database(again) == dump_database(db)


@pytest.mark.parametrize(
    "text, line",
    [
        ("gen eta 3 1 2\ngen eta 3 1 2", 2),
        ("gen eta 3 1 3", 1),
        ("gen eta 3 1 2\ngroup pi 5 S 4 basis eta_4:3", 2),
        ("gen eta 3 1 2\nrel eta_4 = 0 min 3", 2),
        ("bogus record", 1),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises((DatabaseError, ValueError)) as exc:
        load_database(text)
    if isinstance(exc.value, DatabaseError):
        assert exc.value.line == line


def test_relation_must_keep_degree():
    with pytest.raises(DatabaseError):
        load_database("gen eta 3 1 2\ngen nu 5 3 8\nrel eta_5 = nu_5 min 5")


def test_e_records_become_rules(db):
    lhs = [r.lhs.render() for r in db.rules]
    assert "nu_6.eta_9" in lhs
