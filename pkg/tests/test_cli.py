from __future__ import annotations

import json
import subprocess
import sys

import pytest

from lorentz_lab import __version__
from lorentz_lab.cli import main

CHAR = '{"kind":"char","a":0,"b":1}'
STEP = '{"kind":"step","breakpoints":[1],"values":[1]}'
SMALL = ["--grid-min", "1e-3", "--grid-max", "1e3", "--grid-per-decade", "16"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norm_json_envelope(capsys):
    code, out, _ = run(capsys, "norm", "--space", "lambda", "--p", "1", "--weight", CHAR, "--function", STEP)
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "lorentz-lab/1" and doc["version"] == __version__
    assert doc["command"] == "norm" and doc["result"]["value"] == pytest.approx(1.0)


def test_diverged_value_is_encoded(capsys):
    code, out, _ = run(capsys, "norm", "--space", "gamma", "--p", "1", "--q", "1",
                       "--weight", '{"kind":"const","c":1}', "--function", STEP)
    assert code == 0 and json.loads(out)["result"]["diverged"] is True


def test_certify_exit_codes(capsys):
    assert run(capsys, "certify", "--class", "rp", "--p", "1", "--weight", CHAR)[0] == 0
    assert run(capsys, "certify", "--class", "bp", "--p", "1", "--weight", CHAR)[0] == 1


def test_certify_csv(capsys):
    code, out, _ = run(capsys, "certify", "--class", "rp", "--p", "1", "--weight", CHAR, "--format", "csv", *SMALL)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "t,value" and len(lines) > 10
    float(lines[1].split(",")[0])


def test_text_format(capsys):
    code, out, _ = run(capsys, "certify", "--class", "bp", "--p", "1", "--weight", '{"kind":"power","gamma":-0.5}',
                       "--format", "text")
    assert code == 0 and "member" in out


def test_construct_wq_and_equiv_norm(capsys):
    assert run(capsys, "construct-wq", "--q", "2", "--weight", '{"kind":"exp"}', *SMALL)[0] == 0
    code, out, _ = run(capsys, "construct-wq", "--q", "2", "--weight", '{"kind":"const","c":1}')
    assert code == 1 and "w(inf)" in json.loads(out)["result"]["error"]
    code, out, _ = run(capsys, "equiv-norm", "--weight", '{"kind":"const","c":1}')
    assert code == 0 and json.loads(out)["result"]["case"] == "ii"


def test_check_relations(capsys):
    v = '{"kind":"char","a":0.5,"b":1}'
    assert run(capsys, "check", "--relation", "gamma1", "--weight", CHAR, "--v", v, *SMALL)[0] == 0
    assert run(capsys, "check", "--relation", "sandwich", "--q", "2", "--weight", '{"kind":"const","c":1}',
               "--v", v, *SMALL)[0] == 1
    code, out, _ = run(capsys, "check", "--relation", "ratio", "--weight", CHAR,
                       "--source", '{"space":"lambda","p":1}', "--target", '{"space":"gamma","p":1,"q":2}',
                       "--family", '{"kind":"char"}')
    assert code == 0 and json.loads(out)["result"]["evidence"]["outcome"] == "strictness demonstrated"


@pytest.mark.parametrize("argv,needle", [
    (["norm", "--space", "lambda", "--p", "1", "--weight", '{"kind":"power"}', "--function", STEP], "weight.gamma"),
    (["norm", "--space", "lambda", "--p", "1", "--weight", "{bad", "--function", STEP], "weight"),
    (["norm", "--space", "lambda", "--p", "1", "--weight", CHAR, "--function", '{"kind":"x"}'], "function.kind"),
    (["norm", "--space", "lambda", "--weight", CHAR, "--function", STEP], "--p"),
    (["gallery", "nope"], "unknown scenario"),
    (["norm", "--space", "lambda", "--p", "1", "--weight", CHAR, "--function", STEP, "--format", "csv"], "no grid"),
])
def test_usage_errors(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 2 and needle in err


def test_output_file_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["gallery", "wq-exactness", "--out", str(p)]) == 0
    assert paths[0].read_text() == paths[1].read_text()
    assert json.loads(paths[0].read_text())["result"]["passed"] is True


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lorentz_lab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
