import io

import pytest

from fdeval import (
    ParseError,
    Qrels,
    QuerySet,
    RunEntry,
    RunFile,
    TrecFormatWarning,
    ValidationError,
    parse_qrels,
    parse_run,
    serialize_qrels,
    serialize_run,
    truncate,
)


def qrels_from(text: str) -> Qrels:
    return parse_qrels(io.StringIO(text))


def run_from(text: str) -> RunFile:
    return parse_run(io.StringIO(text))


class TestParseQrels:
    def test_single_line(self):
        qrels = qrels_from("q1 0 d7 1\n")
        assert qrels.entries == {"q1": {"d7": 1}}

    def test_two_docs_same_query(self):
        qrels = qrels_from("q1 0 d7 3\nq1 0 d9 2\n")
        assert qrels.entries == {"q1": {"d7": 3, "d9": 2}}

    def test_non_integer_grade(self):
        with pytest.raises(ParseError) as exc:
            qrels_from("q1 0 d7 x\n")
        assert exc.value.line_number == 1

    def test_float_grade_rejected(self):
        with pytest.raises(ParseError):
            qrels_from("q1 0 d7 1.0\n")

    def test_negative_grade(self):
        with pytest.raises(ParseError) as exc:
            qrels_from("q1 0 d1 2\nq1 0 d2 -1\n")
        assert exc.value.line_number == 2

    def test_too_few_fields(self):
        with pytest.raises(ParseError) as exc:
            qrels_from("q1 0 d1 1\nq2 d2 1\n")
        assert exc.value.line_number == 2

    def test_extra_fields_tolerated(self):
        # anything past the grade column is ignored
        qrels = qrels_from("q1 0 d1 2 trailing comment\n")
        assert qrels.entries == {"q1": {"d1": 2}}

    def test_duplicate_pair(self):
        with pytest.raises(ParseError) as exc:
            qrels_from("q1 0 d1 1\nq1 0 d1 2\n")
        assert exc.value.line_number == 2

    def test_same_doc_under_two_queries_ok(self):
        qrels = qrels_from("q1 0 d1 1\nq2 0 d1 2\n")
        assert qrels.entries == {"q1": {"d1": 1}, "q2": {"d1": 2}}

    def test_blank_lines_and_comments_skipped(self):
        qrels = qrels_from("\n# header\nq1 0 d1 1\n\n  \nq2 0 d2 0\n")
        assert qrels.entries == {"q1": {"d1": 1}, "q2": {"d2": 0}}

    def test_tabs_as_separators(self):
        qrels = qrels_from("q1\t0\td1\t4\n")
        assert qrels.entries == {"q1": {"d1": 4}}

    def test_grades_above_four_accepted(self):
        assert qrels_from("q1 0 d1 17\n").entries["q1"]["d1"] == 17

    def test_line_number_counts_skipped_lines(self):
        with pytest.raises(ParseError) as exc:
            qrels_from("# comment\n\nq1 0 d1 bad\n")
        assert exc.value.line_number == 3

    def test_path_in_message(self, tmp_path):
        path = tmp_path / "broken.qrels"
        path.write_text("q1 0 d1 x\n")
        with pytest.raises(ParseError, match="broken.qrels:1"):
            parse_qrels(path)

    def test_bytes_stream(self):
        qrels = parse_qrels(io.BytesIO(b"q1 0 d1 1\n"))
        assert qrels.entries == {"q1": {"d1": 1}}

    def test_disjoint_concatenation_equals_merge(self):
        text_a = "q1 0 d1 1\nq2 0 d2 2\n"
        text_b = "q3 0 d3 0\nq4 0 d1 1\n"
        merged = qrels_from(text_a + text_b)
        separate_a = qrels_from(text_a)
        separate_b = qrels_from(text_b)
        assert merged.entries == {**separate_a.entries, **separate_b.entries}


class TestParseRun:
    def test_single_line(self):
        run = run_from("q1 Q0 d3 1 12.5 bm25\n")
        assert run.system_tag == "bm25"
        assert run.rankings == {"q1": [RunEntry("d3", 1, 12.5)]}

    def test_resorted_by_rank(self):
        run = run_from("q1 Q0 d2 2 11.0 bm25\nq1 Q0 d1 1 12.5 bm25\n")
        assert [e.doc_id for e in run.rankings["q1"]] == ["d1", "d2"]
        assert [e.rank for e in run.rankings["q1"]] == [1, 2]

    def test_duplicate_doc(self):
        with pytest.raises(ParseError) as exc:
            run_from("q1 Q0 d3 1 12.5 bm25\nq1 Q0 d3 2 11.0 bm25\n")
        assert exc.value.line_number == 2

    def test_duplicate_rank(self):
        with pytest.raises(ParseError) as exc:
            run_from("q1 Q0 d1 1 12.5 bm25\nq1 Q0 d2 1 11.0 bm25\n")
        assert exc.value.line_number == 2

    def test_non_integer_rank(self):
        with pytest.raises(ParseError) as exc:
            run_from("q1 Q0 d3 one 12.5 bm25\n")
        assert exc.value.line_number == 1

    def test_non_positive_rank(self):
        with pytest.raises(ParseError):
            run_from("q1 Q0 d3 0 12.5 bm25\n")

    def test_non_numeric_score(self):
        with pytest.raises(ParseError) as exc:
            run_from("q1 Q0 d1 1 12.5 bm25\nq1 Q0 d2 2 high bm25\n")
        assert exc.value.line_number == 2

    def test_non_finite_score(self):
        with pytest.raises(ParseError):
            run_from("q1 Q0 d1 1 nan bm25\n")

    def test_wrong_field_count(self):
        with pytest.raises(ParseError) as exc:
            run_from("q1 Q0 d1 1 12.5\n")
        assert exc.value.line_number == 1

    def test_empty_file_rejected(self):
        with pytest.raises(ParseError):
            run_from("# only a comment\n")

    def test_mixed_tags_warn(self):
        with pytest.warns(TrecFormatWarning, match="mixes system tags"):
            run = run_from("q1 Q0 d1 1 2.0 bm25\nq1 Q0 d2 2 1.0 other\n")
        assert run.system_tag == "bm25"

    def test_score_order_violation_warns_not_fails(self):
        with pytest.warns(TrecFormatWarning, match="scores increase"):
            run = run_from("q1 Q0 d1 1 1.0 bm25\nq1 Q0 d2 2 5.0 bm25\n")
        # rank order is kept authoritative
        assert [e.doc_id for e in run.rankings["q1"]] == ["d1", "d2"]

    def test_per_query_independence(self):
        run = run_from(
            "q1 Q0 d1 1 2.0 bm25\n"
            "q2 Q0 d1 1 9.0 bm25\n"  # same doc under another query is fine
            "q2 Q0 d2 2 8.0 bm25\n"
        )
        assert len(run.rankings["q2"]) == 2


class TestTruncate:
    RUN = "q1 Q0 d{i} {i} {score} tagA\n"

    def _run(self, n=10):
        text = "".join(f"q1 Q0 d{i} {i} {float(n - i)} tagA\n" for i in range(1, n + 1))
        return run_from(text)

    def test_keep_first(self):
        out = truncate(self._run(10), 1)
        assert [e.doc_id for e in out.rankings["q1"]] == ["d1"]

    def test_k_exceeds_length(self):
        run = self._run(3)
        assert truncate(run, 10).rankings == run.rankings

    def test_empty_query_list(self):
        run = RunFile(system_tag="t", rankings={"q1": []})
        assert truncate(run, 5).rankings == {"q1": []}

    def test_idempotent(self):
        run = self._run(10)
        once = truncate(run, 4)
        twice = truncate(once, 4)
        assert once == twice

    def test_k_zero_rejected(self):
        with pytest.raises(ValueError):
            truncate(self._run(3), 0)


class TestSerialization:
    def test_qrels_round_trip_structure(self):
        text = "q1 0 d1 2\nq1 0 d2 0\nq2 0 d9 4\n"
        qrels = qrels_from(text)
        assert qrels_from(serialize_qrels(qrels)) == qrels

    def test_qrels_canonical_bytes(self):
        text = "q1 0 d1 2\nq2 0 d9 4\n"
        assert serialize_qrels(qrels_from(text)) == text

    def test_run_round_trip_structure(self):
        text = "q1 Q0 d1 1 12.5 bm25\nq1 Q0 d2 2 11.0 bm25\nq2 Q0 d3 1 0.125 bm25\n"
        run = run_from(text)
        assert run_from(serialize_run(run)) == run

    def test_run_canonical_bytes(self):
        text = "q1 Q0 d1 1 12.5 bm25\nq1 Q0 d2 2 11.0 bm25\n"
        assert serialize_run(run_from(text)) == text

    def test_empty_qrels_serializes_empty(self):
        assert serialize_qrels(Qrels(entries={})) == ""


class TestConstructionInvariants:
    def test_run_ranks_must_increase(self):
        with pytest.raises(ValidationError):
            RunFile(system_tag="t", rankings={"q1": [RunEntry("d1", 2, 1.0), RunEntry("d2", 1, 0.5)]})

    def test_run_unique_docs(self):
        with pytest.raises(ValidationError):
            RunFile(system_tag="t", rankings={"q1": [RunEntry("d1", 1, 1.0), RunEntry("d1", 2, 0.5)]})

    def test_qrels_reject_whitespace_ids(self):
        with pytest.raises(ValidationError):
            Qrels(entries={"q 1": {"d1": 1}})

    def test_qrels_reject_negative(self):
        with pytest.raises(ValidationError):
            Qrels(entries={"q1": {"d1": -2}})

    def test_qrels_reject_bool_grade(self):
        with pytest.raises(ValidationError):
            Qrels(entries={"q1": {"d1": True}})

    def test_query_set_unique(self):
        with pytest.raises(ValidationError):
            QuerySet(ids=("q1", "q1"))
        assert list(QuerySet(ids=("q1", "q2"))) == ["q1", "q2"]

    def test_judged_doc_ids(self):
        qrels = qrels_from("q1 0 d1 1\nq1 0 d2 0\nq2 0 d3 2\n")
        assert qrels.judged_doc_ids() == {"d1", "d2", "d3"}

    def test_relevant_docs_threshold(self):
        qrels = qrels_from("q1 0 d1 1\nq1 0 d2 2\nq1 0 d3 0\n")
        assert qrels.relevant_docs("q1", threshold=2) == {"d2": 2}
        assert qrels.relevant_docs("q1") == {"d1": 1, "d2": 2}
