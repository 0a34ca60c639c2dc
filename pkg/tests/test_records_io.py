"""Record model and the JSON Lines store."""

from datetime import date, datetime, timezone

import pytest

from conftest import day, make_record, sorted_records
from scalemine.errors import RecordFormatError
from scalemine.records import (
    CommitRecord,
    FileEdit,
    day_end_instant,
    day_start_instant,
    format_timestamp,
    load_records,
    measure_value,
    normalize_email,
    parse_timestamp,
    persist_records,
    record_to_json,
)


class TestModel:
    def test_file_edit_validation(self):
        with pytest.raises(ValueError):
            FileEdit(path="a", is_binary=False, levenshtein_distance=-1)

    def test_record_requires_aware_timestamp(self):
        with pytest.raises(ValueError):
            CommitRecord(
                commit_id="0" * 40,
                author_email="a@x",
                timestamp=datetime(2010, 1, 1),
                file_edits=(),
            )

    def test_derived_measures(self):
        record = make_record(
            day(0),
            files=[
                FileEdit(path="a", is_binary=False, levenshtein_distance=5),
                FileEdit(path="b", is_binary=True, levenshtein_distance=0),
                FileEdit(path="c", is_binary=False, levenshtein_distance=7),
            ],
        )
        assert record.file_edit_count == 3
        assert record.total_edit_distance == 12
        assert measure_value(record, "file_edits") == 3.0
        assert measure_value(record, "levenshtein") == 12.0
        with pytest.raises(ValueError):
            measure_value(record, "lines")

    def test_normalize_email(self):
        assert normalize_email("  Dev@Example.COM ") == "dev@example.com"
        assert normalize_email("") == ""


class TestTimestamps:
    def test_format_uses_z_suffix(self):
        assert format_timestamp(day(0)) == "2010-01-01T00:00:00Z"

    def test_parse_round_trip(self):
        ts = day(3, hours=7.5)
        assert parse_timestamp(format_timestamp(ts)) == ts

    def test_parse_rejects_naive(self):
        with pytest.raises(ValueError):
            parse_timestamp("2010-01-01T00:00:00")

    def test_day_instants(self):
        d = date(2014, 3, 1)
        assert day_start_instant(d) == datetime(2014, 3, 1, tzinfo=timezone.utc)
        assert day_end_instant(d) == datetime(2014, 3, 2, tzinfo=timezone.utc)


class TestStore:
    def test_round_trip(self, tmp_path):
        records = sorted_records(
            [
                make_record(day(0), email="a@x", files=2, lev=3),
                make_record(day(1), email="b@x", files=1, lev=9),
                make_record(day(1, hours=1), email="a@x", files=3, lev=1),
            ]
        )
        path = tmp_path / "records.jsonl"
        persist_records(records, path)
        assert load_records(path) == records

    def test_persist_sorts_and_is_deterministic(self, tmp_path):
        r1 = make_record(day(2))
        r2 = make_record(day(0))
        p1 = tmp_path / "a.jsonl"
        p2 = tmp_path / "b.jsonl"
        persist_records([r1, r2], p1)
        persist_records([r2, r1], p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert [r.timestamp for r in load_records(p1)] == [day(0), day(2)]

    def test_canonical_line_shape(self):
        record = make_record(day(0), email="dev@x", files=1, lev=4, commit_id="ab" * 20)
        line = record_to_json(record)
        assert line == (
            '{"commit":"' + "ab" * 20 + '","author_email":"dev@x",'
            '"timestamp":"2010-01-01T00:00:00Z",'
            '"files":[{"path":"f0.txt","binary":false,"lev":4}]}'
        )

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert load_records(path) == []

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        persist_records([make_record(day(0))], path)
        with path.open("a") as fh:
            fh.write("{not json\n")
        with pytest.raises(RecordFormatError, match="line 2"):
            load_records(path)

    def test_missing_field_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"commit":"x","author_email":"a@x","files":[]}\n')
        with pytest.raises(RecordFormatError, match="line 1"):
            load_records(path)

    def test_negative_distance_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"commit":"x","author_email":"a@x",'
            '"timestamp":"2010-01-01T00:00:00Z",'
            '"files":[{"path":"f","binary":false,"lev":-2}]}\n'
        )
        with pytest.raises(RecordFormatError, match="line 1"):
            load_records(path)

    def test_out_of_order_lines_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        lines = [
            record_to_json(make_record(day(5))),
            record_to_json(make_record(day(1))),
        ]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(RecordFormatError, match="line 2"):
            load_records(path)
