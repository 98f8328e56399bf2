from __future__ import annotations

import json

import pytest

from cycleforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_scene_canonical_is_byte_stable(capsys):
    c1, a, _ = run(capsys, "scene", "canonical")
    c2, b, _ = run(capsys, "scene", "canonical")
    assert c1 == c2 == 0 and a == b


def test_scene_new_and_show_round_trip(capsys, tmp_path):
    path = tmp_path / "s.json"
    code, _, err = run(capsys, "scene", "new", "--seed", "7", "--out", str(path))
    assert code == 0 and "fingerprint" in err
    code, out, _ = run(capsys, "scene", "show", str(path))
    assert code == 0 and out == path.read_text()


def test_scene_show_rejects_a_equal_b(capsys, tmp_path):
    _, text, _ = run(capsys, "scene", "canonical")
    d = json.loads(text)
    d["tangency"]["b"] = d["tangency"]["a"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    code, _, err = run(capsys, "scene", "show", str(path))
    assert code == 3 and "triple-root" in err


def test_scene_show_missing_file(capsys):
    code, _, _ = run(capsys, "scene", "show", "/nonexistent/scene.json")
    assert code == 3


def test_verify_cocycle_passes(capsys):
    code, out, err = run(capsys, "verify", "--suite", "cocycle")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass"
    assert rep["parameters"] == {"primes": [7, 13], "samples": 25, "seed": 0, "t": "1"}
    assert "cocycle: pass" in err
    assert all("elapsed_ms" not in r for r in rep["records"])


def test_verify_is_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "--suite", "lines-p0", "--q", "13", "--t", "1")
    _, b, _ = run(capsys, "verify", "--suite", "lines-p0", "--q", "13", "--t", "1")
    assert a == b
    rep = json.loads(a)
    assert rep["status"] == "pass"


def test_verify_timings_flag(capsys):
    _, out, _ = run(capsys, "verify", "--suite", "cocycle", "--timings")
    assert all("elapsed_ms" in r for r in json.loads(out)["records"])


def test_eckardt_zero_samples_inconclusive(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "eckardt", "--q", "13", "--samples", "0")
    assert code == 2 and json.loads(out)["status"] == "inconclusive"
    code, _, _ = run(capsys, "verify", "--suite", "eckardt", "--q", "13", "--samples", "0", "--allow-inconclusive")
    assert code == 0


def test_verify_symbolic_t_skips_numeric_checks(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lines-p0", "--q", "13", "--t", "symbolic")
    rep = json.loads(out)
    assert code == 0
    assert rep["parameters"]["t"] == "symbolic"
    assert rep["counts"]["pass"] >= 1 and rep["counts"]["skipped"] >= 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--suite", "nope"],
        ["verify", "--suite", "cocycle", "--q", "5"],
        ["verify", "--suite", "cocycle", "--samples", "-1"],
        ["count", "--q", "5"],
        ["count", "--q", "9"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_3(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 3


def test_count_at_13(capsys):
    code, out, _ = run(capsys, "count", "--q", "13")
    d = json.loads(out)
    assert code == 0
    assert (d["#C1"], d["#C2"], d["#C1∩C2"], d["#S"]) == (14, 14, 3, 195)
    assert d["#lines-through-p0"] == d["#C1"] + d["#C2"] - d["#C1∩C2"] == 25
    assert d["#W"] == 2393
    # the intersection C1 ∩ C2 is the cube roots of -8: 7^3 = 343 = -8 mod 13
    assert pow(7, 3, 13) == (-8) % 13


def test_count_at_7_notes_bad_reduction(capsys):
    code, out, _ = run(capsys, "count", "--q", "7")
    d = json.loads(out)
    assert code == 0 and "note" in d
    assert d["#lines-through-p0"] == 27
