import json

import numpy as np
import pytest

from tensortom.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_NUMERIC, EXIT_OK, main
from tensortom.io import load_sinogram, load_tensor

SMALL = ["--grid-n", "65", "--n-beta", "128", "--n-phi", "128", "--modes-N", "24"]


def test_phantom_writes_outputs(tmp_path, capsys):
    assert main(["phantom", "--output", str(tmp_path), "--grid-n", "65"]) == EXIT_OK
    F = load_tensor(tmp_path / "phantom.ttg")
    assert F.grid.n == 65
    assert json.loads((tmp_path / "phantom.json").read_text())["kind"] == "incompressible"
    assert "max |div F|" in capsys.readouterr().out


def test_phantom_from_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid_n": 33, "phantom": {"kind": "tracefree",
                                                         "bumps": [[0.0, 0.0, 0.5, 1.0, 0.2]]}}))
    assert main(["phantom", "--config", str(cfg), "--output", str(tmp_path)]) == EXIT_OK
    F = load_tensor(tmp_path / "phantom.ttg")
    assert F.grid.n == 33 and np.all(F.trace == 0)
    assert "max |trace|: 0.000e+00" in capsys.readouterr().out


def test_phantom_forward_invert_chain(tmp_path):
    assert main(["phantom", "--output", str(tmp_path), "--class", "tracefree", *SMALL]) == EXIT_OK
    assert main(["forward", "--input", str(tmp_path / "phantom.ttg"), "--output", str(tmp_path),
                 "--class", "tracefree", *SMALL]) == EXIT_OK
    s, meta = load_sinogram(tmp_path / "sinogram.csv")
    assert meta["class"] == "tracefree" and s.n_phi == 128
    assert main(["invert", "--input", str(tmp_path / "sinogram.csv"), "--truth", str(tmp_path / "phantom.ttg"),
                 "--output", str(tmp_path / "rec"), *SMALL]) == EXIT_OK
    report = json.loads((tmp_path / "rec" / "report.json").read_text())
    assert report["errors"]["tensor"]["rel_l2"] < 0.05
    assert "total" in json.loads((tmp_path / "rec" / "timings.json").read_text())


def test_roundtrip_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["roundtrip", "--output", str(a), *SMALL]) == EXIT_OK
    assert "relative L2 error" in capsys.readouterr().out
    assert main(["roundtrip", "--output", str(b), *SMALL, "--threads", "1"]) == EXIT_OK
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "reconstruction.ttg").read_bytes() == (b / "reconstruction.ttg").read_bytes()


def test_roundtrip_tolerance_failure(tmp_path):
    assert main(["roundtrip", "--output", str(tmp_path), *SMALL, "--tol", "1e-9"]) == EXIT_NUMERIC


def test_input_errors(tmp_path, capsys):
    assert main(["forward", "--output", str(tmp_path)]) == EXIT_INPUT
    assert main(["forward", "--input", str(tmp_path / "missing.ttg"), "--output", str(tmp_path)]) == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["phantom", "--config", str(bad), "--output", str(tmp_path)]) == EXIT_INPUT
    assert main(["phantom", "--config", str(tmp_path / "none.json"), "--output", str(tmp_path)]) == EXIT_INPUT
    assert main(["roundtrip", "--output", str(tmp_path), "--grid-n", "64"]) == EXIT_INPUT
    assert main(["roundtrip", "--output", str(tmp_path), "--threads", "0"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_mismatch_exit_code(tmp_path):
    assert main(["roundtrip", "--output", str(tmp_path), "--class", "tracefree", *SMALL]) == EXIT_OK
    sino = str(tmp_path / "sinogram.csv")
    assert main(["invert", "--input", sino, "--class", "incompressible", "--output", str(tmp_path), *SMALL]) \
        == EXIT_MISMATCH
    assert main(["invert", "--input", sino, "--mu", "2.0", "--output", str(tmp_path), *SMALL]) == EXIT_MISMATCH
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"class": "incompressible", "phantom": {"kind": "tracefree", "bumps": []}}))
    assert main(["roundtrip", "--config", str(cfg), "--output", str(tmp_path), *SMALL]) == EXIT_MISMATCH


@pytest.mark.parametrize("mu", ["1.0", "0"])
def test_selftest_passes(mu, capsys):
    assert main(["selftest", "--mu", mu]) == EXIT_OK
    out = capsys.readouterr().out
    assert "8/8 checks passed" in out and "FAIL" not in out


def test_selftest_detects_corruption(capsys):
    assert main(["selftest", "--corrupt-alpha"]) == EXIT_NUMERIC
    assert "FAIL" in capsys.readouterr().out
