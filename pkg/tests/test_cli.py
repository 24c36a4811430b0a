import json
import subprocess
import sys

import pytest

from holosphere.cli import canonical_json, main
from holosphere.dataset import make

PANTS = make([(0, "-", (0, 1)), (0, "-", (1, 1)), (0, "+", (1, 2))])
FLUX = make([(0, "+", (0, 1)), (0, "-", (0, -1))])
CYL = make([(0, "+", (1, 1)), (0, "-", (1, 1))])
CYL2 = make([(0, "+", (2, 2)), (0, "-", (2, 2))])
CHART = {"q": [0, 1], "sigma_lo": 1.2, "sigma_hi": 1.9, "eps": 0.1}


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_validate_exit_codes(tmp_path, capsys):
    assert _run(capsys, ["validate", _write(tmp_path, "a.json", PANTS.to_json())])[0] == 0
    code, doc = _run(capsys, ["validate", _write(tmp_path, "b.json", FLUX.to_json())])
    assert code == 1 and "1.15" in doc["rules"]
    code, doc = _run(capsys, ["validate", _write(tmp_path, "c.json", '{"ends": [')])
    assert code == 2 and "malformed" in doc["error"]
    assert _run(capsys, ["validate", str(tmp_path / "missing.json")])[0] == 2
    assert _run(capsys, ["validate", _write(tmp_path, "d.json", {"ends": 3})])[0] == 2


def test_decide(tmp_path, capsys):
    code, doc = _run(capsys, ["decide", _write(tmp_path, "a.json", PANTS.to_json())])
    assert code == 0 and doc["nonempty"]
    assert [(e["q"], e["qp"]) for e in doc["witness"]["edges"]] == [(0, 1), (-1, -1)]
    code, doc = _run(capsys, ["decide", _write(tmp_path, "b.json", CYL2.to_json())])
    assert code == 1 and "1.16" in doc["rules"]
    code, doc = _run(capsys, ["decide", _write(tmp_path, "c.json", CYL.to_json())])
    assert code == 0 and doc["witness"]["kind"] == "one-angle"


def test_dim(tmp_path, capsys):
    path = _write(tmp_path, "a.json", PANTS.to_json())
    code, doc = _run(capsys, ["dim", path])
    assert code == 0 and doc["i_hat"] == 3 and doc["euler"] == -1
    assert _run(capsys, ["dim", path, "--genus", "-1"])[0] == 2
    code, doc = _run(capsys, ["dim", path, "--kc", "0"])
    assert code == 0


def test_expand_linearize_round_trip(tmp_path, capsys):
    code, moduli = _run(capsys, ["expand", _write(tmp_path, "a.json", PANTS.to_json())])
    assert code == 0 and 0 < moduli["delta"] <= 1e-3
    code, line = _run(capsys, ["linearize", _write(tmp_path, "m.json", moduli)])
    assert code == 0 and line["kind"] == "line"
    code, dec = _run(capsys, ["decide", _write(tmp_path, "a2.json", PANTS.to_json())])
    assert line["edges"] == dec["witness"]["edges"]
    code, doc = _run(capsys, ["expand", _write(tmp_path, "c.json", CYL.to_json())])
    assert code == 1 and "one-angle" in doc["error"]
    # the pole cluster needs offset vertices, so delta is bounded by the angle gaps
    pole = make([(-1, "+", (-1, -2)), (0, "-", (-1, -3))], c_minus=1)
    path = _write(tmp_path, "d.json", pole.to_json())
    code, doc = _run(capsys, ["expand", path, "--delta", "1.0"])
    assert code == 2 and "too large" in doc["error"]
    assert _run(capsys, ["expand", path, "--delta", "1e-4"])[0] == 0


def test_sample_and_mesh(tmp_path, capsys):
    spec = _write(tmp_path, "s.json", CHART)
    out = str(tmp_path / "chart.json")
    code, doc = _run(capsys, ["sample", spec, "--res", "32", "-o", out])
    assert code == 0 and doc["report"]["embedding"]["collisions"] == 0 and doc["resolution"] == [32, 32]
    mesh = str(tmp_path / "m.csv")
    code, doc = _run(capsys, ["mesh", out, "--format", "csv", "-o", mesh])
    assert code == 0 and doc["nodes"] == 32 * 32
    code, doc = _run(capsys, ["mesh", spec, "--format", "csv", "--res", "8", "-o", mesh])
    assert code == 0
    assert len(open(mesh).read().splitlines()) == 65
    bad = _write(tmp_path, "bad.json", dict(CHART, eps=0.6))
    code, doc = _run(capsys, ["sample", bad])
    assert code == 1 and "eps*alpha_Q" in doc["error"]
    assert _run(capsys, ["mesh", "--format", "csv", "-o", mesh])[0] == 2
    assert _run(capsys, ["sample", spec, "--res", "1x"])[0] == 2


def test_usage_errors(capsys):
    assert main(["bogus"]) == 2
    assert main(["mesh", "--format", "stl"]) == 2
    capsys.readouterr()


def test_output_is_byte_identical(tmp_path):
    path = _write(tmp_path, "a.json", PANTS.to_json())
    runs = [subprocess.run([sys.executable, "-m", "holosphere", "--seed", "3", "expand", path],
                           capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1] and runs[0].endswith(b"\n")


def test_canonical_json():
    import numpy as np
    assert canonical_json({"b": np.float64(0.1 + 0.2), "a": (1, np.int64(2))}) == \
        '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 0.3\n}'
    with pytest.raises(TypeError):
        canonical_json({"x": object()})
