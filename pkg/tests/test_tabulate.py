import json
import math
import random

import pytest

from cubitab.errors import CapacityError, DomainError, TableParseError
from cubitab.forms import CubicForm, act, disc, is_p_maximal, reduce_form
from cubitab.tabulate import (
    FieldTable,
    count,
    count_progression,
    cross_check,
    enumerate_fields,
    import_table,
    multiplicity,
    read_table,
    write_table,
)
from test_forms import random_unimodular


class TestEnumerate:
    def test_first_negative(self):
        table = enumerate_fields("-", 30)
        assert len(table.records) == 1
        rec = table.records[0]
        assert rec.disc == -23
        assert rec.form == reduce_form(CubicForm(1, 0, -1, -1))
        assert rec.galois is False

    def test_positive_below_49_empty(self):
        assert enumerate_fields("+", 48).records == ()

    def test_first_positive_is_galois(self):
        table = enumerate_fields("+", 49)
        assert len(table.records) == 1
        assert table.records[0].disc == 49
        assert table.records[0].galois is True

    def test_known_negative_run(self):
        table = enumerate_fields("-", 300)
        assert [r.disc for r in table.records] == [
            -23, -31, -44, -59, -76, -83, -87, -104, -107, -108, -116,
            -135, -139, -140, -152, -172, -175, -199, -200, -204, -211,
            -212, -216, -231, -239, -243, -244, -247, -255, -268, -283,
            -300,
        ]

    def test_known_positive_run(self):
        table = enumerate_fields("+", 1000)
        assert [r.disc for r in table.records] == [
            49, 81, 148, 169, 229, 257, 316, 321, 361, 404, 469, 473,
            564, 568, 621, 697, 733, 756, 761, 785, 788, 837, 892, 940,
            961, 985, 993,
        ]

    def test_record_invariants(self, table_neg_2000, table_pos_2000):
        for table in (table_neg_2000, table_pos_2000):
            seen = set()
            last_key = None
            for rec in table.records:
                assert disc(rec.form) == rec.disc
                assert rec.form.content() == 1
                assert reduce_form(rec.form) == rec.form
                assert rec.galois == (
                    rec.disc > 0 and math.isqrt(rec.disc) ** 2 == rec.disc
                )
                for p in range(2, math.isqrt(abs(rec.disc)) + 1):
                    if rec.disc % (p * p) == 0:
                        assert is_p_maximal(rec.form, p)
                assert rec.form not in seen
                seen.add(rec.form)
                key = (abs(rec.disc), rec.form)
                assert last_key is None or last_key < key
                last_key = key

    def test_bad_sign(self):
        with pytest.raises(DomainError):
            enumerate_fields("x", 100)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            enumerate_fields("-", 10**9)

    def test_worker_determinism_small(self):
        base = enumerate_fields("-", 20000)
        for workers in (2, 8):
            assert enumerate_fields("-", 20000, workers=workers) == base


class TestCounting:
    def test_empty_below_23(self):
        assert count("-", 22) == 0

    def test_zero_bound(self):
        assert count("+", 0) == 0

    def test_taussky_scholz_window(self, table_neg_big):
        # The four fields at -3299; -3300 happens to be a discriminant too,
        # so the window is anchored at 3299 under the inclusive convention.
        assert (
            count("-", 3299, table=table_neg_big)
            - count("-", 3298, table=table_neg_big)
            == 4
        )
        assert count("-", 3300, table=table_neg_big) - count(
            "-", 3298, table=table_neg_big
        ) == 4 + multiplicity(-3300)

    def test_progression_partition(self, table_neg_2000):
        total = count("-", 2000, table=table_neg_2000)
        split = sum(
            count_progression("-", 2000, 5, a, table=table_neg_2000)
            for a in range(5)
        )
        assert split == total

    def test_progression_signed_residue(self, table_neg_2000):
        # The single field below 30 has disc -23 = 2 (mod 5).
        assert count_progression("-", 30, 5, (-23) % 5, table=table_neg_2000) == 1
        assert count_progression("-", 30, 5, 3, table=table_neg_2000) == 0

    def test_progression_positive(self, table_pos_2000):
        assert count_progression("+", 49, 7, 0, table=table_pos_2000) == 1

    def test_residue_validation(self, table_neg_2000):
        with pytest.raises(DomainError):
            count_progression("-", 100, 5, 7, table=table_neg_2000)

    def test_table_mismatch(self, table_neg_2000):
        with pytest.raises(DomainError):
            count("+", 100, table=table_neg_2000)
        with pytest.raises(DomainError):
            count("-", 5000, table=table_neg_2000)


class TestMultiplicity:
    def test_taussky_scholz(self):
        assert multiplicity(-3299) == 4

    def test_absent(self):
        assert multiplicity(-24) == 0

    def test_simple(self):
        assert multiplicity(49) == 1

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            multiplicity(0)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            multiplicity(-(10**10))

    def test_agrees_with_table(self, table_neg_2000):
        from collections import Counter

        counts = Counter(r.disc for r in table_neg_2000.records)
        rng = random.Random(4)
        for delta in rng.sample(sorted(counts), 12):
            assert multiplicity(delta) == counts[delta]
        assert multiplicity(-1996) == counts.get(-1996, 0)


class TestCache:
    def test_cache_round_trip(self, tmp_path):
        fresh = enumerate_fields("-", 3000)
        cached_first = enumerate_fields("-", 3000, cache_dir=tmp_path)
        cached_second = enumerate_fields("-", 3000, cache_dir=tmp_path)
        assert cached_first == fresh
        assert cached_second == fresh

    def test_incremental_extension(self, tmp_path):
        enumerate_fields("-", 1500, cache_dir=tmp_path)
        extended = enumerate_fields("-", 4000, cache_dir=tmp_path)
        assert extended == enumerate_fields("-", 4000)

    def test_cache_info(self, tmp_path):
        from cubitab.tabulate import cache_info

        enumerate_fields("+", 500, cache_dir=tmp_path)
        entries = cache_info(tmp_path)
        assert len(entries) == 1
        assert entries[0]["sign"] == "+" and entries[0]["bound"] == 500

    def test_env_var_default(self, tmp_path, monkeypatch):
        from cubitab.tabulate import default_cache_dir

        monkeypatch.setenv("CUBITAB_CACHE", str(tmp_path / "xyz"))
        assert default_cache_dir() == tmp_path / "xyz"


class TestTableIO:
    def test_jsonl_round_trip_with_meta(self, tmp_path, table_neg_2000):
        path = tmp_path / "neg.jsonl"
        write_table(table_neg_2000, path, meta=True)
        again = read_table(path)
        assert again == table_neg_2000
        first = path.read_text().splitlines()[0]
        assert json.loads(first)["schema"] == 1

    def test_plain_format_is_one_record_per_line(self, tmp_path, table_pos_2000):
        path = tmp_path / "pos.jsonl"
        write_table(table_pos_2000, path)
        rows = [json.loads(line) for line in path.read_text().splitlines()]
        assert len(rows) == len(table_pos_2000.records)
        assert set(rows[0]) == {"disc", "form"}
        keys = [(abs(r["disc"]), tuple(r["form"])) for r in rows]
        assert keys == sorted(keys)

    def test_malformed_row_has_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"disc": -23, "form": [1, 0, -1, -1]}\nnot json\n')
        with pytest.raises(TableParseError) as err:
            read_table(path)
        assert err.value.line_number == 2


class TestImportCrossCheck:
    def test_self_comparison_empty(self, table_neg_2000):
        report = cross_check(table_neg_2000, table_neg_2000)
        assert report.clean

    def test_missing_record_detected(self, table_neg_2000):
        pruned = FieldTable(
            "-", table_neg_2000.bound, table_neg_2000.records[:-1]
        )
        report = cross_check(pruned, table_neg_2000)
        assert not report.clean
        assert len(report.missing) == 1
        assert report.missing[0]["disc"] == table_neg_2000.records[-1].disc

    def test_extra_record_detected(self, table_neg_2000):
        pruned = FieldTable(
            "-", table_neg_2000.bound, table_neg_2000.records[:-1]
        )
        report = cross_check(table_neg_2000, pruned)
        assert not report.clean
        assert len(report.extra) == 1

    def test_external_style_table(self, tmp_path, table_neg_2000):
        # Simulate a published table: arbitrary defining forms per field.
        rng = random.Random(77)
        path = tmp_path / "external.csv"
        with open(path, "w") as fh:
            fh.write("disc,a,b,c,d\n")
            for rec in table_neg_2000.records:
                g = random_unimodular(rng, size=2)
                f = act(g, rec.form)
                fh.write(f"{rec.disc},{f.a},{f.b},{f.c},{f.d}\n")
        imported = import_table(path, fmt="csv")
        report = cross_check(imported, table_neg_2000)
        assert report.clean

    def test_csv_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("disc,w,x,y,z\n-23,1,0,-1,-1\n")
        with pytest.raises(TableParseError):
            import_table(path, fmt="csv")

    def test_csv_bad_row_line_number(self, tmp_path):
        path = tmp_path / "bad2.csv"
        path.write_text("disc,a,b,c,d\n-23,1,0,-1,-1\n-31,one,0,1,-1\n")
        with pytest.raises(TableParseError) as err:
            import_table(path, fmt="csv")
        assert err.value.line_number == 3

    def test_invalid_disc_flagged(self, tmp_path, table_neg_2000):
        path = tmp_path / "wrongdisc.csv"
        path.write_text("disc,a,b,c,d\n-24,1,0,-1,-1\n")
        imported = import_table(path, fmt="csv")
        report = cross_check(imported, table_neg_2000)
        assert report.invalid
        assert not report.clean
