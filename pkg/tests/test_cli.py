"""Test CLI functionality."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from typer.testing import CliRunner

from lipsnakes.cli import app

runner = CliRunner()

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
GOLDEN = Path(__file__).resolve().parent / "golden"


def model(name: str) -> str:
    return str(MODELS / name)


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert "lipsnakes 0.1.0" in result.output


def test_analyze_text():
    """Text report lists the decomposition of the two-node snake."""
    result = runner.invoke(app, ["analyze", model("cs2.snk")])
    assert result.exit_code == 0
    assert "class: CIRCULAR_SNAKE" in result.output
    assert "segments: 4" in result.output
    assert "nodal zones: 4" in result.output
    assert "N(g4) N(g2)  spectrum={3}" in result.output


def test_analyze_json(tmp_path):
    out = tmp_path / "cs2.json"
    result = runner.invoke(app, ["--format", "json", "--out", str(out), "analyze", model("cs2.snk")])
    assert result.exit_code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["class"] == "CIRCULAR_SNAKE"
    assert report["multiplicities"]["g1"] == 2
    assert [n["members"] for n in report["nodes"]] == [["N(g4)", "N(g2)"], ["N(g1)", "N(g3)"]]
    assert [n["spectrum"] for n in report["nodes"]] == [["3"], ["2"]]


def test_analyze_germ(tmp_path):
    out = tmp_path / "bubble.json"
    result = runner.invoke(app, ["--format", "json", "--out", str(out), "analyze", model("bubble.germ")])
    assert result.exit_code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["class"] == "SNAKE"
    assert len(report["segments"]) == 1


def test_analyze_other():
    result = runner.invoke(app, ["analyze", model("cusp_snake.snk")])
    assert result.exit_code == 0
    assert "class: OTHER" in result.output
    assert "singular" in result.output


def test_analyze_dot_and_render():
    for args in (["--format", "dot", "analyze", model("cs2.snk")], ["render", model("cs2.snk")]):
        result = runner.invoke(app, args)
        assert result.exit_code == 0
        assert "graph link {" in result.output
        assert 'label="{2}"' in result.output


def test_pizza_command():
    result = runner.invoke(app, ["pizza", model("cs2.snk"), "--pancake", "X1", "--target", "X3"])
    assert result.exit_code == 0
    assert "(2 slices)" in result.output
    assert "[1, 3]" in result.output and "[1, 2]" in result.output


def test_multipizza_command():
    result = runner.invoke(app, ["pizza", model("cs2.snk"), "--pancake", "X1"])
    assert result.exit_code == 0
    assert "multipizza on X1 (2 slices)" in result.output


def test_pizza_unknown_pancake():
    result = runner.invoke(app, ["pizza", model("cs2.snk"), "--pancake", "X9"])
    assert result.exit_code == 2
    assert "unknown pancake X9" in result.output


def test_surgery_remove():
    result = runner.invoke(app, ["surgery", model("cs2.snk"), "--remove-segment", "1"])
    assert result.exit_code == 0
    assert "topology segment" in result.output
    assert "criterion=true recognized=SNAKE" in result.output


def test_surgery_cut_json(tmp_path):
    out = tmp_path / "cut.json"
    result = runner.invoke(
        app, ["--format", "json", "--out", str(out), "surgery", model("eight_segments.snk"), "--cut-nodal", "1", "--alpha", "2"]
    )
    assert result.exit_code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["criterion"] is False
    assert report["recognized"] == "OTHER"
    assert "contact g1+ g1- 2" in report["model"]


def test_surgery_argument_errors():
    both = runner.invoke(app, ["surgery", model("cs2.snk"), "--remove-segment", "1", "--cut-nodal", "1"])
    assert both.exit_code == 2
    no_alpha = runner.invoke(app, ["surgery", model("cs2.snk"), "--cut-nodal", "1"])
    assert no_alpha.exit_code == 2
    low_alpha = runner.invoke(app, ["surgery", model("cs2.snk"), "--cut-nodal", "1", "--alpha", "1"])
    assert low_alpha.exit_code == 2
    assert "must exceed beta" in low_alpha.output


def test_ingest_writes_snk(tmp_path):
    out = tmp_path / "bubble.snk"
    result = runner.invoke(app, ["ingest", model("bubble.germ"), "-o", str(out)])
    assert result.exit_code == 0
    assert out.read_text(encoding="utf-8") == (MODELS / "bubble.snk").read_text(encoding="utf-8")


def test_oracle_pair():
    result = runner.invoke(app, ["oracle", model("bubble.germ"), "--pair", "g1,g2"])
    assert result.exit_code == 0
    assert "tord(g1,g2) ~ 1.5000" in result.output


def test_oracle_cross_validation():
    result = runner.invoke(app, ["oracle", model("bubble.germ")])
    assert result.exit_code == 0
    assert "all pairs agree" in result.output


def test_oracle_tight_tolerance_fails():
    result = runner.invoke(app, ["--tolerance", "0.000001", "oracle", model("bubble.germ")])
    assert result.exit_code == 1
    assert "MISMATCH" in result.output


def test_validate_ok():
    result = runner.invoke(app, ["validate", model("cs2.snk")])
    assert result.exit_code == 0
    assert "ok" in result.output


def test_validate_reports_violations(tmp_path):
    bad = tmp_path / "bad.snk"
    bad.write_text("beta 1\ntopology segment\npancake X1 a b c\ncontact a c 2\n", encoding="utf-8")
    result = runner.invoke(app, ["validate", str(bad)])
    assert result.exit_code == 2
    assert "violation: pancake X1 is not normally embedded" in result.output


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.snk"
    bad.write_text("beta 1\nfoo bar\n", encoding="utf-8")
    result = runner.invoke(app, ["analyze", str(bad)])
    assert result.exit_code == 2
    assert "line 2" in result.output


def test_missing_file():
    result = runner.invoke(app, ["analyze", "nonexistent.snk"])
    assert result.exit_code == 2


TWINS = """\
arc a = (t, t^2 + O(t^3))
arc c = (t, 2*t)
arc b = (t, t^2 + O(t^3))
triangle T1 = ruled(a, c)
triangle T2 = ruled(c, b)
glue chain T1 T2
"""


def test_undecided_order_exit_code(tmp_path):
    """a and b agree up to the truncation, so their contact order cannot be decided."""
    germ = tmp_path / "twins.germ"
    germ.write_text(TWINS, encoding="utf-8")
    for args in (["analyze", str(germ)], ["ingest", str(germ)]):
        result = runner.invoke(app, args)
        assert result.exit_code == 3
        assert "order undecided" in result.output or "truncation order" in result.output


def test_render_matches_golden_dot():
    result = runner.invoke(app, ["render", model("cs2.snk")])
    assert result.exit_code == 0
    assert result.output == (GOLDEN / "cs2.dot").read_text(encoding="utf-8")


def _run(seed: str, *args: str) -> bytes:
    env = {**os.environ, "PYTHONHASHSEED": seed, "LOG_LEVEL": "WARNING"}
    done = subprocess.run(
        [sys.executable, "-m", "lipsnakes", *args], cwd=ROOT, env=env, capture_output=True, check=True
    )
    return done.stdout


@pytest.mark.parametrize(
    "args",
    [
        ["render", "models/eight_segments.snk"],
        ["--format", "json", "analyze", "models/eight_segments.snk"],
        ["--format", "json", "analyze", "models/cs2.snk"],
    ],
)
def test_output_is_byte_stable_across_hash_seeds(args):
    first = _run("1", *args)
    assert first
    assert _run("2", *args) == first
    assert _run("3", *args) == first
