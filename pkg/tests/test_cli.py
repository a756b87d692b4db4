import json
import subprocess
import sys

import pytest

from monostream.cli import main

from .conftest import TABLE2_LINE, TABLE2_SOURCE


@pytest.fixture
def corpus_files(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    aln = tmp_path / "c.aln"
    src.write_text("a b\nc d\ne f\n", encoding="utf-8")
    tgt.write_text("x y\nu v\nw z\n", encoding="utf-8")
    aln.write_text("0-0 1-1\n1-0\n\n", encoding="utf-8")
    return src, tgt, aln


class TestAACommand:
    def test_tsv_and_summary(self, corpus_files, tmp_path, capsys):
        src, tgt, aln = corpus_files
        out = tmp_path / "r.tsv"
        code = main(["aa", "--src", str(src), "--tgt", str(tgt), "--align", str(aln), "--out", str(out)])
        assert code == 0
        rows = out.read_text(encoding="utf-8").splitlines()
        assert rows[0] == "line-1\t0.0"
        assert rows[1] == "line-2\t1.0"
        assert rows[2].startswith("line-3\t\t")
        summary = json.loads(capsys.readouterr().out)
        assert summary["mean_aa"] == 0.5
        assert summary["monotonic"] == 1
        assert summary["errors"] == 1

    def test_tsv_to_stdout(self, corpus_files, capsys):
        src, tgt, aln = corpus_files
        assert main(["aa", "--src", str(src), "--tgt", str(tgt), "--align", str(aln)]) == 0
        captured = capsys.readouterr()
        assert "line-1\t0.0" in captured.out
        assert json.loads(captured.err)["total"] == 3

    def test_missing_file_is_data_error(self, tmp_path, capsys):
        code = main(["aa", "--src", "nope.src", "--tgt", "nope.tgt", "--align", "nope.aln"])
        assert code == 2

    def test_line_mismatch_is_data_error(self, tmp_path, capsys):
        src = tmp_path / "a.src"
        tgt = tmp_path / "a.tgt"
        aln = tmp_path / "a.aln"
        src.write_text("one\ntwo\n", encoding="utf-8")
        tgt.write_text("uno\n", encoding="utf-8")
        aln.write_text("\n\n", encoding="utf-8")
        code = main(["aa", "--src", str(src), "--tgt", str(tgt), "--align", str(aln)])
        assert code == 2
        assert "line count mismatch" in capsys.readouterr().err


class TestFilterCommand:
    def test_outputs(self, corpus_files, tmp_path, capsys):
        src, tgt, aln = corpus_files
        prefix = str(tmp_path / "out")
        code = main([
            "filter", "--src", str(src), "--tgt", str(tgt), "--align", str(aln),
            "--out-prefix", prefix,
        ])
        assert code == 0
        assert (tmp_path / "out.kept.src").read_text(encoding="utf-8") == "a b\n"
        assert (tmp_path / "out.kept.tgt").read_text(encoding="utf-8") == "x y\n"
        stats = json.loads((tmp_path / "out.stats.json").read_text(encoding="utf-8"))
        assert stats == json.loads(capsys.readouterr().out)
        assert stats["kept"] == 1 and stats["unscoreable"] == 1

    def test_sample_without_seed_is_usage_error(self, corpus_files, tmp_path):
        src, tgt, aln = corpus_files
        with pytest.raises(SystemExit) as exc:
            main([
                "filter", "--src", str(src), "--tgt", str(tgt), "--align", str(aln),
                "--out-prefix", str(tmp_path / "x"), "--sample", "1",
            ])
        assert exc.value.code == 1


class TestStatsCommand:
    def test_source_only(self, tmp_path, capsys):
        src = tmp_path / "s.txt"
        src.write_text("a b c d\na b c d e f\n", encoding="utf-8")
        assert main(["stats", "--src", str(src)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["corpus"]["mean_source_len"] == 5.0

    def test_with_logs(self, tmp_path, capsys):
        src = tmp_path / "s.txt"
        src.write_text("And this made me sad\n", encoding="utf-8")
        logs = tmp_path / "logs.jsonl"
        logs.write_text(TABLE2_LINE + "\n", encoding="utf-8")
        assert main(["stats", "--src", str(src), "--logs", str(logs)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["corpus"]["mean_al"] == 1.625


class TestMetricCommands:
    def test_al_over_file(self, tmp_path, capsys):
        logs = tmp_path / "logs.jsonl"
        logs.write_text(TABLE2_LINE + "\n", encoding="utf-8")
        assert main(["al", "--logs", str(logs)]) == 0
        captured = capsys.readouterr()
        assert captured.out == "t2\t1.625\n"
        summary = json.loads(captured.err)
        assert summary == {
            "metric": "AL",
            "mean": 1.625,
            "count": 1,
            "parameters": {"logs": str(logs), "retranslation_extension": False},
        }

    def test_al_retrans_requires_flag(self, tmp_path, capsys):
        logs = tmp_path / "h.jsonl"
        logs.write_text(
            '{"id":"h","mode":"retranslation","actions":[["R","a"],["H",["x"]]]}\n',
            encoding="utf-8",
        )
        assert main(["al", "--logs", str(logs)]) == 2
        assert main(["al", "--logs", str(logs), "--retrans"]) == 0

    def test_ne_over_file(self, tmp_path, capsys):
        logs = tmp_path / "h.jsonl"
        logs.write_text(
            '{"id":"h","mode":"retranslation","actions":'
            '[["R","a"],["H",["a","b"]],["R","b"],["H",["a","c"]],["R","c"],["H",["a","c","d"]]]}\n',
            encoding="utf-8",
        )
        assert main(["ne", "--logs", str(logs)]) == 0
        captured = capsys.readouterr()
        value = float(captured.out.split("\t")[1])
        assert value == pytest.approx(1 / 3)

    def test_bleu(self, tmp_path, capsys):
        hyp = tmp_path / "h.txt"
        ref = tmp_path / "r.txt"
        hyp.write_text("the cat sat on the mat\n", encoding="utf-8")
        ref.write_text("the cat sat on the mat\n", encoding="utf-8")
        assert main(["bleu", "--hyp", str(hyp), "--ref", str(ref), "--smoothing", "none"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["score"] == 100.0
        assert payload["brevity_penalty"] == 1.0

    def test_norm(self, capsys):
        assert main(["norm", "--score", "12", "--base", "24"]) == 0
        assert capsys.readouterr().out.strip() == "0.5"

    def test_drop_table1(self, capsys):
        assert main(["drop", "--high", "25.2", "--low", "19.3"]) == 0
        assert capsys.readouterr().out.strip() == "-23.4%"
        assert main(["drop", "--high", "78", "--low", "67"]) == 0
        assert capsys.readouterr().out.strip() == "-14.1%"

    def test_bleu_stream(self, tmp_path, capsys):
        logs = tmp_path / "logs.jsonl"
        logs.write_text(TABLE2_LINE + "\n", encoding="utf-8")
        assert main(["bleu-stream", "--system", str(logs), "--reference", str(logs)]) == 0
        assert json.loads(capsys.readouterr().out)["score"] == 100.0


class TestWaitkAndValidate:
    def test_waitk_path_output(self, capsys):
        assert main(["waitk-path", "--src-len", "3", "--tgt-len", "3", "--k", "1"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert [a[0] for a in record["actions"]] == ["R", "W", "R", "W", "R", "W"]

    def test_validate_clean(self, tmp_path, capsys):
        logs = tmp_path / "logs.jsonl"
        logs.write_text(TABLE2_LINE + "\n", encoding="utf-8")
        src = tmp_path / "src.txt"
        src.write_text(" ".join(TABLE2_SOURCE) + "\n", encoding="utf-8")
        assert main(["validate-log", "--logs", str(logs), "--src", str(src)]) == 0

    def test_validate_violation_exits_2(self, tmp_path, capsys):
        logs = tmp_path / "logs.jsonl"
        logs.write_text('{"id":"x","mode":"streaming","actions":[["R","And"]]}\n', encoding="utf-8")
        src = tmp_path / "src.txt"
        src.write_text(" ".join(TABLE2_SOURCE) + "\n", encoding="utf-8")
        assert main(["validate-log", "--logs", str(logs), "--src", str(src)]) == 2
        assert "source not fully read" in capsys.readouterr().out


class TestExportCommand:
    def test_export_from_journal(self, tmp_path, capsys):
        from monostream.annotation import SessionStore

        store = SessionStore(tmp_path / "journal")
        session = store.create_session(["a", "b"])
        store.act_write(session.session_id, "x")
        store.act_read(session.session_id)
        store.finish_session(session.session_id)
        prefix = str(tmp_path / "exp")
        assert main(["export", "--journal-dir", str(tmp_path / "journal"), "--out-prefix", prefix]) == 0
        assert (tmp_path / "exp.ref.txt").read_text(encoding="utf-8") == "x\n"
        log_line = (tmp_path / "exp.logs.jsonl").read_text(encoding="utf-8")
        assert json.loads(log_line)["actions"] == [["R", "a"], ["W", "x"], ["R", "b"]]


class TestUsageContract:
    def test_unknown_subcommand_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_missing_required_flag_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            main(["bleu", "--hyp", "x"])
        assert exc.value.code == 1

    def test_help_on_every_subcommand(self, capsys):
        for name in [
            "aa", "filter", "stats", "al", "ne", "bleu", "norm", "drop",
            "bleu-stream", "waitk-path", "validate-log", "serve", "export",
        ]:
            with pytest.raises(SystemExit) as exc:
                main([name, "--help"])
            assert exc.value.code == 0
            assert "--" in capsys.readouterr().out


def test_pipe_composition():
    gen = subprocess.run(
        [sys.executable, "-m", "monostream.cli", "waitk-path", "--src-len", "10", "--tgt-len", "10", "--k", "3"],
        capture_output=True,
        text=True,
        check=True,
    )
    scored = subprocess.run(
        [sys.executable, "-m", "monostream.cli", "al"],
        input=gen.stdout,
        capture_output=True,
        text=True,
        check=True,
    )
    assert scored.stdout.strip().split("\t")[1] == "3.0"
    assert json.loads(scored.stderr)["mean"] == 3.0
