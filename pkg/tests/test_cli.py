import json
from pathlib import Path

import pytest

from codegloss.cli import run
from conftest import CANNY_LINE, PLOTTING_LINES

GOLDEN = Path(__file__).parent / "data" / "explain_canny.json"


def run_cli(argv, capsys, stdin_text=None, monkeypatch=None):
    if stdin_text is not None:
        import io
        import sys

        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_explain_stdin_expressions_json(capsys, monkeypatch):
    code, out, err = run_cli(
        ["explain", "-", "--granularity", "expressions"],
        capsys,
        stdin_text=CANNY_LINE,
        monkeypatch=monkeypatch,
    )
    assert code == 0
    doc = json.loads(out)
    spans = [
        (i["span"]["colStart"], i["span"]["colEnd"])
        for i in doc["expressionsByLine"]["0"]
    ]
    assert spans == [(0, 8), (9, 12), (14, 17), (19, 22)]


def test_explain_json_matches_golden_byte_for_byte(capsys, monkeypatch):
    code, out, err = run_cli(
        ["explain", "-"], capsys, stdin_text=CANNY_LINE, monkeypatch=monkeypatch
    )
    assert code == 0
    assert out.encode() == GOLDEN.read_bytes()


def test_explain_json_deterministic_across_runs(capsys, monkeypatch, tmp_path):
    src = tmp_path / "snippet.py"
    src.write_text("\n".join(PLOTTING_LINES))
    code1, out1, _ = run_cli(["explain", str(src)], capsys)
    code2, out2, _ = run_cli(["explain", str(src)], capsys)
    assert code1 == code2 == 0
    assert out1 == out2


def test_explain_missing_file_exits_2(capsys):
    code, out, err = run_cli(["explain", "missing_file.py"], capsys)
    assert code == 2
    assert "missing_file.py" in err


def test_explain_empty_input_exits_2(capsys, monkeypatch):
    code, out, err = run_cli(
        ["explain", "-"], capsys, stdin_text="", monkeypatch=monkeypatch
    )
    assert code == 2


def test_unknown_subcommand_exits_2(capsys):
    assert run(["frobnicate"]) == 2


def test_explain_remote_without_endpoint_exits_3(capsys, monkeypatch):
    code, out, err = run_cli(
        ["explain", "-", "--provider", "remote"],
        capsys,
        stdin_text="x = 1",
        monkeypatch=monkeypatch,
    )
    assert code == 3
    assert "provider" in err


def test_explain_annotated_text_blocks_in_margin(capsys, monkeypatch, tmp_path):
    src = tmp_path / "plot.py"
    src.write_text("\n".join(PLOTTING_LINES))
    code, out, err = run_cli(
        ["explain", str(src), "--output", "annotated-text", "--granularity", "blocks"],
        capsys,
    )
    assert code == 0
    rows = out.splitlines()
    assert len(rows) == len(PLOTTING_LINES)
    # margin anchor: longest line is 66 chars, so labels start at col 68
    longest = max(len(ln) for ln in PLOTTING_LINES)
    anchored = [r for r in rows if "| " in r]
    assert anchored
    for r in anchored:
        assert r.index("|") == longest + 2
    assert any("Step 1" in r for r in rows)


def test_explain_annotated_text_expression_rows(capsys, monkeypatch):
    code, out, err = run_cli(
        ["explain", "-", "--output", "annotated-text", "--granularity", "expressions"],
        capsys,
        stdin_text=CANNY_LINE,
        monkeypatch=monkeypatch,
    )
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == CANNY_LINE
    assert "Function being called: cv.Canny." in rows[1]


def test_annotated_text_respects_viewport_except_overflow(capsys, monkeypatch, tmp_path):
    src = tmp_path / "w.py"
    src.write_text("\n".join(PLOTTING_LINES))
    code, out, err = run_cli(
        ["explain", str(src), "--output", "annotated-text", "--granularity", "blocks",
         "--viewport-cols", "90"],
        capsys,
    )
    assert code == 0
    for row in out.splitlines():
        assert len(row) <= 90, row


def test_serve_stdio_eof_exits_0(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "codegloss.cli", "serve", "--stdio"],
        input=b"",
        capture_output=True,
        timeout=30,
    )
    assert proc.returncode == 0


def test_serve_bad_listen_spec_exits_2(capsys):
    code, out, err = run_cli(["serve", "--listen", "nonsense"], capsys)
    assert code == 2
    assert "HOST:PORT" in err
