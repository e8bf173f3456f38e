import json
import subprocess
import sys

import pytest

from chartgen.cli import main
from tests.conftest import fixture_10pt_doc


@pytest.fixture
def input_file(tmp_path):
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(fixture_10pt_doc()), encoding="utf-8")
    return path


def test_generalize_writes_svg_and_json(tmp_path, input_file, capsys):
    out = tmp_path / "phone.svg"
    code = main(
        ["generalize", str(input_file), "--width", "750", "--height", "1334", "--out", str(out)]
    )
    assert code == 0
    assert out.exists()
    sidecar = out.with_suffix(".json")
    assert sidecar.exists()
    payload = json.loads(sidecar.read_text())
    assert payload["target"] == {"width": 750.0, "height": 1334.0}
    assert "elapsedMs" not in json.dumps(payload)


def test_missing_input_exits_2(tmp_path, capsys):
    code = main(["generalize", str(tmp_path / "absent.json"), "--width", "100", "--height", "100"])
    assert code == 2
    assert "chartgen:" in capsys.readouterr().err


def test_zero_width_exits_3(tmp_path, input_file, capsys):
    code = main(["generalize", str(input_file), "--width", "0", "--height", "100"])
    assert code == 3
    assert "too small" in capsys.readouterr().err


def test_malformed_document_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"series": []}', encoding="utf-8")
    code = main(["generalize", str(bad), "--width", "100", "--height", "100"])
    assert code == 2


def test_metrics_prints_deterministic_json(input_file, capsys):
    assert main(["metrics", str(input_file), "--width", "6307", "--height", "3220"]) == 0
    first = capsys.readouterr().out
    payload = json.loads(first)
    assert payload["report"]["satisfied"] is True
    assert payload["collisionArea"] == 0.0
    assert main(["metrics", str(input_file), "--width", "6307", "--height", "3220"]) == 0
    assert capsys.readouterr().out == first


def test_metrics_dense_watch_unsatisfied(input_file, capsys):
    assert main(["metrics", str(input_file), "--width", "324", "--height", "394"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["report"]["satisfied"] is False
    assert payload["report"]["prominence"]


def test_sweep_writes_per_size_outputs(tmp_path, input_file, capsys):
    out_dir = tmp_path / "sweep"
    code = main(
        [
            "sweep",
            str(input_file),
            "--sizes",
            "1536x2048,750x1334,324x394",
            "--out-dir",
            str(out_dir),
        ]
    )
    assert code == 0
    assert len(list(out_dir.glob("*.svg"))) == 3
    assert len(list(out_dir.glob("*.json"))) == 3
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3


def test_config_file_and_env(tmp_path, input_file, monkeypatch, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"seed": 5, "weights": {"importance": 1, "density": 1, "overlap": 2}}))
    out = tmp_path / "a.svg"
    assert main(
        ["generalize", str(input_file), "--width", "750", "--height", "1334",
         "--config", str(config_path), "--out", str(out)]
    ) == 0
    monkeypatch.setenv("CHARTGEN_CONFIG", str(config_path))
    out2 = tmp_path / "b.svg"
    assert main(
        ["generalize", str(input_file), "--width", "750", "--height", "1334", "--out", str(out2)]
    ) == 0
    assert out.read_text() == out2.read_text()


def test_bad_config_exits_2(tmp_path, input_file, capsys):
    config_path = tmp_path / "config.json"
    config_path.write_text('{"unknownKnob": 1}')
    code = main(
        ["generalize", str(input_file), "--width", "750", "--height", "1334",
         "--config", str(config_path)]
    )
    assert code == 2


def test_console_entry_point_runs(tmp_path, input_file):
    out = tmp_path / "cli.svg"
    proc = subprocess.run(
        [sys.executable, "-m", "chartgen.cli", "generalize", str(input_file),
         "--width", "324", "--height", "394", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
