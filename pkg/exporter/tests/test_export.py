import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from embed_export import (
    CorpusError,
    HashingEncoder,
    UnresolvableEncoderError,
    export_embeddings,
    read_corpus,
    resolve_encoder,
)
from embed_export.cli import main


@pytest.fixture
def toy_corpus(tmp_path):
    """100-doc corpus with varied text lengths and unicode."""
    lines = []
    for i in range(100):
        text = f"passage number {i}: " + " ".join(f"token{j}" for j in range(i % 17 + 1))
        if i % 10 == 0:
            text += " naïve café résumé"
        lines.append(f"doc{i:03d}\t{text}")
    path = tmp_path / "corpus.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def run_validate_store(store_dir: Path) -> subprocess.CompletedProcess:
    # the consumer toolkit is only touched through its public CLI
    return subprocess.run(
        [sys.executable, "-m", "fdeval.cli", "validate-store", "--store", str(store_dir)],
        capture_output=True,
        text=True,
    )


class TestCorpus:
    def test_reads_rows_in_order(self, toy_corpus):
        rows = read_corpus(toy_corpus)
        assert len(rows) == 100
        assert rows[0][0] == "doc000" and rows[99][0] == "doc099"

    def test_text_keeps_internal_tabs(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tleft\tright\n", encoding="utf-8")
        assert read_corpus(path) == [("d1", "left\tright")]

    def test_duplicate_doc_id_named(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\talpha\nd1\tbeta\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="d1") as exc:
            read_corpus(path)
        assert exc.value.line_number == 2

    def test_empty_corpus(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("\n\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="no documents"):
            read_corpus(path)

    def test_missing_tab(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1 text without tab\n", encoding="utf-8")
        with pytest.raises(CorpusError) as exc:
            read_corpus(path)
        assert exc.value.line_number == 1

    def test_empty_text(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\t   \n", encoding="utf-8")
        with pytest.raises(CorpusError, match="empty text"):
            read_corpus(path)


class TestHashingEncoder:
    def test_shape_and_normalization(self):
        enc = HashingEncoder(dim=16)
        out = enc.encode(["hello world", "another passage"])
        assert out.shape == (2, 16) and out.dtype == np.float32
        np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-6)

    def test_deterministic(self):
        a = HashingEncoder(dim=32).encode(["same text"])
        b = HashingEncoder(dim=32).encode(["same text"])
        np.testing.assert_array_equal(a, b)

    def test_short_text_fallback(self):
        out = HashingEncoder(dim=8).encode(["ab"])
        assert np.linalg.norm(out) > 0

    def test_resolver_parses_dim(self):
        assert resolve_encoder("hashing/64").dim == 64
        with pytest.raises(UnresolvableEncoderError):
            resolve_encoder("hashing/not-a-number")


class TestExport:
    def test_store_layout_and_primary_validation(self, toy_corpus, tmp_path):
        out = tmp_path / "store"
        summary = export_embeddings(toy_corpus, "hashing/32", out, batch_size=7)
        assert (summary.count, summary.dim) == (100, 32)

        meta = json.loads((out / "meta.json").read_text())
        assert meta["dim"] == 32 and meta["count"] == 100
        assert meta["encoder"] == "hashing/32"
        assert meta["pooling"] == "hashing"
        assert (out / "vectors.f32").stat().st_size == 100 * 32 * 4
        ids = (out / "ids.tsv").read_text().splitlines()
        assert ids[0] == "doc000" and ids == sorted(ids)  # corpus order here is sorted

        proc = run_validate_store(out)
        assert proc.returncode == 0, proc.stderr
        verdict = json.loads(proc.stdout)
        assert verdict["valid"] is True
        assert verdict["dim"] == 32 and verdict["count"] == 100

    def test_repeated_export_agrees(self, toy_corpus, tmp_path):
        export_embeddings(toy_corpus, "hashing/24", tmp_path / "a", batch_size=13)
        export_embeddings(toy_corpus, "hashing/24", tmp_path / "b", batch_size=50)
        va = np.frombuffer((tmp_path / "a" / "vectors.f32").read_bytes(), dtype="<f4")
        vb = np.frombuffer((tmp_path / "b" / "vectors.f32").read_bytes(), dtype="<f4")
        np.testing.assert_allclose(va, vb, atol=1e-5)
        np.testing.assert_array_equal(va, vb)  # hashing is exactly reproducible

    def test_row_order_matches_corpus(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("zeta\tzzz text\nalpha\taaa text\n", encoding="utf-8")
        export_embeddings(path, "hashing/8", tmp_path / "s")
        ids = (tmp_path / "s" / "ids.tsv").read_text().splitlines()
        assert ids == ["zeta", "alpha"]
        direct = HashingEncoder(dim=8).encode(["zzz text", "aaa text"])
        stored = np.frombuffer(
            (tmp_path / "s" / "vectors.f32").read_bytes(), dtype="<f4"
        ).reshape(2, 8)
        np.testing.assert_array_equal(stored, direct)

    def test_duplicate_doc_id_fails(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tone\nd1\ttwo\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="d1"):
            export_embeddings(path, "hashing/8", tmp_path / "s")

    def test_unresolvable_encoder(self, toy_corpus, tmp_path, monkeypatch):
        monkeypatch.setenv("HF_HUB_OFFLINE", "1")
        monkeypatch.setenv("TRANSFORMERS_OFFLINE", "1")
        with pytest.raises(UnresolvableEncoderError):
            export_embeddings(toy_corpus, "no-such-org/no-such-model", tmp_path / "s")


class TestCli:
    def test_cli_export_and_validate(self, toy_corpus, tmp_path, capsys):
        out = tmp_path / "store"
        code = main(
            ["--corpus", str(toy_corpus), "--model", "hashing/16", "--out", str(out),
             "--batch-size", "9"]
        )
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["count"] == 100 and summary["dim"] == 16
        assert run_validate_store(out).returncode == 0

    def test_cli_corpus_error_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("no-tab-here\n", encoding="utf-8")
        code = main(["--corpus", str(bad), "--model", "hashing/8", "--out", str(tmp_path / "s")])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "CorpusError" and err["line_number"] == 1

    def test_cli_missing_corpus_exit_3(self, tmp_path, capsys):
        code = main(
            ["--corpus", str(tmp_path / "nope.tsv"), "--model", "hashing/8",
             "--out", str(tmp_path / "s")]
        )
        assert code == 3
