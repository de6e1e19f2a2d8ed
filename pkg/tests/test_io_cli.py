import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from procmat import io
from procmat.classical import random_classical_process
from procmat.cli import main
from procmat.process import ProcessMatrix, ctc, mixture, nonseparable, random_process, state
from procmat.tensor import LabSystems

QUBITS = LabSystems(2, 2, 2, 2)
floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(st.lists(floats, min_size=4, max_size=4), st.lists(floats, min_size=2, max_size=2))
def test_matrix_json_roundtrip_bit_exact(diag, off):
    m = np.diag(np.asarray(diag, dtype=complex))
    m[0, 1] = complex(off[0], off[1])
    m[1, 0] = np.conj(m[0, 1])
    back = io.matrix_from_json(json.loads(json.dumps(io.matrix_to_json(m))))
    assert back.tobytes() == m.tobytes()


def test_process_roundtrip_bit_exact(tmp_path, rng):
    pm = random_process(LabSystems(2, 3, 3, 2), rng=rng)
    io.write_process(pm, tmp_path / "w.json")
    back = io.read_process(tmp_path / "w.json")
    assert back.systems == pm.systems
    assert back.w.tobytes() == pm.w.tobytes()


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"dims": {"A1": 2}, "matrix": []}',
    '{"dims": {"A1": 2, "A2": 2, "B1": 2, "B2": 2}, "matrix": [[1, 2], [3, 4]]}',
    '{"dims": {"A1": 2, "A2": 2, "B1": 2, "B2": 2}, "matrix": [[[1, 0]]]}',
    '{"dims": {"A1": 1, "A2": 1, "B1": 1, "B2": 1}, "matrix": [[["a", 0]]]}',
])
def test_malformed_files(tmp_path, text, capsys):
    with pytest.raises(io.FormatError):
        io.loads(text)
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert main(["validate", str(p)]) == 2
    assert "error" in capsys.readouterr().err


def _write(tmp_path, name, pm):
    p = tmp_path / name
    io.write_process(pm, p)
    return str(p)


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", _write(tmp_path, "ns.json", nonseparable())]) == 0
    assert "verdict: valid" in capsys.readouterr().out
    assert main(["validate", _write(tmp_path, "ctc.json", ctc())]) == 1
    out = capsys.readouterr().out
    assert "verdict: invalid" in out and "A1A2" in out
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("mode", ["structural", "probe", "both"])
def test_validate_modes(tmp_path, mode):
    assert main(["validate", _write(tmp_path, "ns.json", nonseparable()), "--mode", mode]) == 0


def test_classify(tmp_path, capsys):
    assert main(["classify", _write(tmp_path, "ns.json", nonseparable())]) == 0
    out = capsys.readouterr().out
    assert "A1B1B2" in out and "A2B1" in out and "ACCEPT" in out
    assert main(["classify", _write(tmp_path, "ctc.json", ctc()), "--json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "reject" and "A1A2" in data["metrics"]["forbidden_terms"]


def test_builtin_nonseparable_exact(tmp_path):
    out = tmp_path / "o.json"
    assert main(["builtin", "nonseparable", "--out", str(out)]) == 0
    assert io.read_process(out).w.tobytes() == nonseparable().w.tobytes()


def test_builtin_stdout_and_params(tmp_path, capsys):
    assert main(["builtin", "state", "--rho", "phi-plus"]) == 0
    pm = io.loads(capsys.readouterr().out)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(pm.w, state(np.outer(phi, phi)).w)
    for name in ("channel-b-to-a", "channel_a_to_b", "ctc"):
        assert main(["builtin", name, "--out", str(tmp_path / f"{name}.json")]) == 0
    assert main(["builtin", "nope"]) == 2
    assert main(["builtin", "state", "--rho", "nope"]) == 2
    assert main(["builtin", "mixture"]) == 2


def test_builtin_mixture(tmp_path):
    a = _write(tmp_path, "a.json", nonseparable())
    b = _write(tmp_path, "b.json", state(np.eye(4) / 4))
    out = tmp_path / "m.json"
    assert main(["builtin", "mixture", "--q", "0.25", "--w1", a, "--w2", b, "--out", str(out)]) == 0
    assert np.allclose(io.read_process(out).w, mixture(0.25, nonseparable(), state(np.eye(4) / 4)).w)
    assert main(["builtin", "mixture", "--q", "1.5", "--w1", a, "--w2", b]) == 2


def test_builtin_channel_with_memory(tmp_path):
    rho = np.eye(8) / 4
    tri = tmp_path / "t.json"
    tri.write_text(json.dumps({"dims": {"A1": 2, "B1": 2, "B2": 2}, "matrix": io.matrix_to_json(rho)}))
    assert main(["builtin", "channel-with-memory", "--tripartite", str(tri),
                 "--out", str(tmp_path / "c.json")]) == 0
    assert main(["builtin", "channel-with-memory"]) == 2


def test_game_run(tmp_path, capsys):
    assert main(["game", "run", _write(tmp_path, "ns.json", nonseparable()), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert abs(data["metrics"]["p_succ"] - (2 + np.sqrt(2)) / 4) <= 1e-12
    assert data["verdict"] == "violation"
    assert main(["game", "run", _write(tmp_path, "s.json", state(np.eye(4) / 4))]) == 0
    assert "respected" in capsys.readouterr().out
    assert main(["game", "run", _write(tmp_path, "big.json", random_process(LabSystems(3, 2, 2, 2)))]) == 2


@pytest.mark.parametrize("backend", ["auto", "python"])
def test_bruteforce(capsys, backend):
    assert main(["game", "brute-force", "--message-dim", "2", "--backend", backend, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "3/4"
    assert data["metrics"]["max_p_succ"] == "3/4"
    assert main(["game", "brute-force", "--message-dim", "0"]) == 2


def test_decompose_classical(tmp_path, capsys, rng):
    cp = random_classical_process(QUBITS, rng)
    path = _write(tmp_path, "c.json", cp.to_process())
    prefix = str(tmp_path / "out_")
    assert main(["decompose-classical", path, "--out-prefix", prefix, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["metrics"]["recombination_residual"] <= 1e-9
    w1 = io.read_process(data["artifacts"][0])
    w2 = io.read_process(data["artifacts"][1])
    q = data["metrics"]["q"]
    assert np.allclose(q * w1.w + (1 - q) * w2.w, cp.to_process().w, atol=1e-9)
    assert main(["decompose-classical", _write(tmp_path, "o.json", nonseparable())]) == 2


@pytest.mark.parametrize("argv", [
    ["validate", "{ns}"],
    ["classify", "{ns}"],
    ["builtin", "nonseparable"],
    ["game", "run", "{ns}"],
    ["game", "brute-force", "--message-dim", "1"],
])
def test_json_schema(tmp_path, capsys, argv):
    path = _write(tmp_path, "ns.json", nonseparable())
    assert main([a.replace("{ns}", path) for a in argv] + ["--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {"command", "verdict", "metrics", "artifacts"}
    assert isinstance(data["metrics"], dict) and isinstance(data["artifacts"], list)


def test_missing_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_compatibility_spellings(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert main(["builtin", "ocb", "--out", str(out)]) == 0
    assert io.read_process(out).w.tobytes() == nonseparable().w.tobytes()
    capsys.readouterr()
    assert main(["game", "run", str(out), "--protocol", "appendix-e", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "violation"
    assert main(["game", "run", str(out), "--protocol", "nope"]) == 2
