import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pencilkit import fileio
from pencilkit.canonical import KroneckerStructure, Transform, synthesize
from pencilkit.cli import main
from pencilkit.exactla import Matrix
from pencilkit.pencil import Pencil

N2 = {"rows": 2, "cols": 2, "E": [[0, 1], [0, 0]], "A": [[1, 0], [0, 1]]}
L2 = {"rows": 2, "cols": 1, "E": [[1], [0]], "A": [[0], [1]]}
IDENT = {"rows": 3, "cols": 3, "E": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "A": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)

    return _write


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


# -- serialization -----------------------------------------------------------

big = st.integers(-(10**40), 10**40)
rationals = st.builds(lambda p, q: fileio.rational_from_json(f"{p}/{q}"), big, st.integers(1, 10**30))


@given(st.integers(0, 4).flatmap(lambda r: st.integers(0, 4).flatmap(
    lambda c: st.tuples(st.just(r), st.just(c), st.lists(rationals, min_size=2 * r * c, max_size=2 * r * c)))))
def test_pencil_round_trip(shape):
    r, c, xs = shape
    E = Matrix.from_rows([xs[i * c:(i + 1) * c] for i in range(r)], c)
    A = Matrix.from_rows([xs[r * c + i * c:r * c + (i + 1) * c] for i in range(r)], c)
    P = Pencil(E, A)
    text = fileio.dumps(fileio.pencil_to_json(P))
    assert fileio.pencil_from_json(json.loads(text)) == P


def test_structure_and_transform_round_trip():
    s = KroneckerStructure({2: 1}, {1: 3}, {4: 1}, 1, Matrix.from_rows([["-7/3"]]))
    back = fileio.structure_from_json(json.loads(fileio.dumps(fileio.structure_to_json(s))))
    assert back.blocks_equal(s) and back.core == s.core
    T = Transform(Matrix.identity(2), Matrix.from_rows([["1/2"]]), Matrix.from_rows([[3]]))
    U = fileio.transform_from_json(fileio.transform_to_json(T))
    assert (U.P, U.Q, U.R) == (T.P, T.Q, T.R)


@pytest.mark.parametrize(
    "obj",
    [
        {"rows": 2, "cols": 2, "E": [[0, 1], [0]], "A": [[1, 0], [0, 1]]},
        {"rows": 1, "cols": 1, "E": [[0.5]], "A": [[1]]},
        {"rows": 1, "cols": 1, "E": [["1/0"]], "A": [[1]]},
        {"rows": 1, "cols": 1, "E": [[True]], "A": [[1]]},
        {"rows": -1, "cols": 1, "E": [], "A": []},
        [1, 2],
    ],
    ids=["ragged", "float", "zero-denominator", "bool", "negative-dim", "not-object"],
)
def test_malformed_pencils(obj):
    with pytest.raises(fileio.FormatError):
        fileio.pencil_from_json(obj)


@pytest.mark.parametrize(
    "obj",
    [{"nilpotent": {"2": 0}}, {"l_blocks": {"x": 1}}, {"lt_blocks": {"0": 1}}, {"core_dim": 2, "core": [[1]]}],
    ids=["zero-count", "bad-key", "zero-size", "core-mismatch"],
)
def test_malformed_structures(obj):
    with pytest.raises(fileio.FormatError):
        fileio.structure_from_json(obj)


# -- commands ----------------------------------------------------------------


def test_analyze_n2(write, capsys):
    code, r = run_json(capsys, ["analyze", write("n2.json", N2)])
    assert code == 0
    assert r["index"] == 2 and r["alpha"] == [0, 1] and r["delta"] == 0 and r["regular"] is True
    assert r["strangeness"] == {"d": 0, "a": 0, "s": 1}
    assert r["initial_conditions"] == {"rows": 2, "cols": 1, "data": [[1], [0]]}


def test_analyze_identity(write, capsys):
    code, r = run_json(capsys, ["analyze", write("id.json", IDENT)])
    assert code == 0
    assert r["index"] == 0 and r["alpha"] == r["beta_plus"] == r["beta_minus"] == [] and r["delta"] == 3


def test_analyze_human_output(write, capsys):
    assert main(["analyze", write("n2.json", N2)]) == 0
    out = capsys.readouterr().out
    assert "index:      2" in out and "regular:    yes" in out


def test_analyze_ragged_file(write, capsys):
    bad = write("bad.json", {"rows": 2, "cols": 2, "E": [[0, 1], [0]], "A": [[1, 0], [0, 1]]})
    assert main(["analyze", bad]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_and_invalid_files(write, tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.json")]) == 2
    assert main(["analyze", write("junk.json", "{not json")]) == 2
    assert main(["bogus"]) == 2


def test_canonical_scrambled_l2(write, tmp_path, capsys):
    src = write("l2s.json", {"l_blocks": {"2": 1}})
    assert main(["synth", src, "--scramble", "--seed", "3", "--out", str(tmp_path / "s.")]) == 0
    capsys.readouterr()
    code, r = run_json(capsys, ["canonical", str(tmp_path / "s.pencil.json")])
    assert code == 0
    assert r["structure"]["l_blocks"] == {"2": 1}
    s = fileio.read_structure(r["files"]["structure"])
    assert s.l_blocks == {2: 1}
    can = fileio.read_pencil(r["files"]["canonical"])
    T = fileio.transform_from_json(fileio.load_json(r["files"]["transform"]))
    P = fileio.read_pencil(str(tmp_path / "s.pencil.json"))
    assert T.apply(P) == can == synthesize(s)


def test_canonical_identity_is_core_only(write, capsys):
    code, r = run_json(capsys, ["canonical", write("id.json", IDENT)])
    assert code == 0
    st_ = r["structure"]
    assert st_["nilpotent"] == st_["l_blocks"] == st_["lt_blocks"] == {} and st_["core_dim"] == 3


def test_canonical_weierstrass(write, capsys):
    assert main(["canonical", "--weierstrass", write("l2.json", L2)]) == 1
    assert "not a regular pencil" in capsys.readouterr().err
    code, r = run_json(capsys, ["canonical", "--weierstrass", write("n2.json", N2)])
    assert code == 0 and r["nilpotent_sizes"] == [2]


def test_weak_command(write, capsys):
    code, r = run_json(capsys, ["weak", write("l2.json", L2)])
    assert code == 0 and (r["d"], r["a"], r["s"]) == (0, 0, 1)
    T = fileio.transform_from_json(fileio.load_json(r["files"]["transform"]))
    assert T.R is not None
    code, r = run_json(capsys, ["weak", write("id.json", IDENT)])
    assert (r["d"], r["a"], r["s"]) == (3, 0, 0)
    code, r = run_json(capsys, ["weak", write("e.json", {"rows": 0, "cols": 0, "E": [], "A": []})])
    assert code == 0 and (r["d"], r["a"], r["s"]) == (0, 0, 0)
    assert fileio.read_pencil(r["files"]["canonical"]).shape == (0, 0)


def test_synth_n2_and_determinism(write, tmp_path, capsys):
    src = write("n2s.json", {"nilpotent": {"2": 1}})
    assert main(["synth", src]) == 0
    assert fileio.read_pencil(str(tmp_path / "n2s.pencil.json")) == Pencil.from_lists(N2["E"], N2["A"])
    outs = []
    for _ in range(2):
        assert main(["synth", src, "--scramble", "--seed", "9"]) == 0
        outs.append(
            (tmp_path / "n2s.pencil.json").read_bytes() + (tmp_path / "n2s.scramble.json").read_bytes()
        )
    assert outs[0] == outs[1]
    assert main(["synth", write("zero.json", {"nilpotent": {"2": 0}})]) == 2


def test_check_command(write, tmp_path, capsys):
    src = write("mix.json", {"nilpotent": {"1": 1, "2": 1}, "l_blocks": {"3": 1}, "lt_blocks": {"2": 1},
                             "core": [["1/2", 1], [0, 2]]})
    assert main(["synth", src, "--out", str(tmp_path / "m.")]) == 0
    assert main(["check", str(tmp_path / "m.pencil.json")]) == 0
    assert main(["synth", src, "--scramble", "--seed", "4", "--out", str(tmp_path / "ms.")]) == 0
    capsys.readouterr()
    code, r = run_json(capsys, ["check", str(tmp_path / "ms.pencil.json")])
    assert code == 0 and r["passed"] and len(r["checks"]) == 9
    assert main(["check", write("bad.json", "[]")]) == 2


def test_module_entry_point(write):
    p = subprocess.run(
        [sys.executable, "-m", "pencilkit", "analyze", "--json", write("n2.json", N2)],
        capture_output=True, text=True,
    )
    assert p.returncode == 0 and json.loads(p.stdout)["index"] == 2
