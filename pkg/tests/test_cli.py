import json
import time

import numpy as np
import pytest

from minuncert import serialization as ser
from minuncert.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from minuncert.counterexample import three_level_example

from . import oracles


def _write(tmp_path, name, m):
    path = tmp_path / name
    ser.save_matrix(np.asarray(m), path)
    return str(path)


@pytest.fixture
def pair_files(tmp_path):
    a, b, _ = three_level_example()
    return _write(tmp_path, "a.json", a.matrix), _write(tmp_path, "b.json", b.matrix)


# -- verify-examples --------------------------------------------------------------

def test_verify_examples_passes(capsys, tmp_path):
    out = tmp_path / "bundle.json"
    t0 = time.perf_counter()
    assert main(["verify-examples", "--out", str(out)]) == EXIT_OK
    assert time.perf_counter() - t0 < 10
    text = capsys.readouterr().out
    assert "overall: PASS" in text
    row = next(line for line in text.splitlines() if line.startswith("three-level"))
    assert row.split()[1:5] == ["0.5000000000"] * 4
    bundle = json.loads(out.read_text())
    assert bundle["pass"] and [e["name"] for e in bundle["examples"]] == ["three-level", "angular-momentum", "gaussian"]
    assert bundle["examples"][1]["report"]["product"] == pytest.approx(0.25, abs=1e-12)
    assert bundle["examples"][2]["report"]["bound"] == pytest.approx(4.0, abs=1e-8)


def test_verify_examples_is_deterministic(capsys):
    main(["verify-examples", "--json"])
    first = json.loads(capsys.readouterr().out)
    main(["verify-examples", "--json"])
    assert json.loads(capsys.readouterr().out) == first


def test_verify_examples_fails_below_round_off(capsys):
    # every gap sits at ~1e-16, so only an absurdly small tolerance rejects them
    assert main(["verify-examples", "--saturation-tol", "1e-300"]) == EXIT_FAIL
    assert "overall: FAIL" in capsys.readouterr().out


def test_verify_examples_zero_displacement(capsys):
    assert main(["verify-examples", "--gaussian-a", "0", "--json"]) == EXIT_FAIL
    gauss = json.loads(capsys.readouterr().out)["examples"][2]
    assert gauss["saturated"] and not gauss["mixed"]
    assert any("pure-degenerate" in n for n in gauss["notes"])


def test_bad_tolerance_is_usage_error(capsys):
    assert main(["verify-examples", "--saturation-tol", "0"]) == EXIT_USAGE


# -- find ----------------------------------------------------------------------

def test_find_three_level_pair(pair_files, tmp_path, capsys):
    out = tmp_path / "fams.json"
    assert main(["find", "--a", pair_files[0], "--b", pair_files[1], "--lambda", "1", "--out", str(out)]) == EXIT_OK
    (fam,) = [ser.family_from_dict(d) for d in json.loads(out.read_text())]
    np.testing.assert_allclose(fam.canonical_state.matrix, np.diag([0.5, 0, 0.5]), atol=1e-10)
    assert "1 saturating family" in capsys.readouterr().out


def test_find_zero_b_is_trivial(tmp_path, capsys):
    a = _write(tmp_path, "a.json", np.diag([1.0, 1.0, 2.0, 2.0]))
    b = _write(tmp_path, "b.json", np.zeros((4, 4)))
    assert main(["find", "--a", a, "--b", b, "--json"]) == EXIT_OK
    fams = json.loads(capsys.readouterr().out)
    assert len(fams) == 2
    assert all(not f["report"]["nontrivial"] and f["report"]["bound"] == 0 for f in fams)


def test_find_generic_pair_is_empty(tmp_path, capsys, rng):
    a = _write(tmp_path, "a.json", oracles.random_hermitian(rng, 4))
    b = _write(tmp_path, "b.json", oracles.random_hermitian(rng, 4))
    assert main(["find", "--a", a, "--b", b, "--lambda", "0.5,1,2", "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == []


def test_find_with_probe(pair_files, capsys):
    assert main(["find", "--a", pair_files[0], "--b", pair_files[1], "--probe", "0", "--json"]) == EXIT_OK
    assert len(json.loads(capsys.readouterr().out)) == 1


def test_malformed_json(tmp_path, pair_files):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["find", "--a", str(bad), "--b", pair_files[1]]) == EXIT_USAGE
    bad.write_text('{"dim": 3, "entries": [[0, 0]]}')
    assert main(["find", "--a", str(bad), "--b", pair_files[1]]) == EXIT_USAGE


def test_dimension_mismatch(tmp_path, pair_files):
    small = _write(tmp_path, "small.json", np.eye(2))
    assert main(["find", "--a", small, "--b", pair_files[1]]) == EXIT_USAGE


def test_missing_file(tmp_path, pair_files):
    assert main(["find", "--a", str(tmp_path / "nope.json"), "--b", pair_files[1]]) == EXIT_USAGE
    assert main(["find", "--b", pair_files[1]]) == EXIT_USAGE


def test_non_hermitian_input(tmp_path, pair_files):
    m = _write(tmp_path, "m.json", [[0, 1], [0, 0]])
    assert main(["find", "--a", m, "--b", m]) == EXIT_USAGE


# -- search --------------------------------------------------------------------

def test_search_three_level_pair(pair_files, tmp_path, capsys):
    out = tmp_path / "res.json"
    code = main(["search", "--a", pair_files[0], "--b", pair_files[1], "--rank", "2", "--seed", "7", "--out", str(out)])
    assert code == EXIT_OK
    d = json.loads(out.read_text())
    assert d["converged"] and d["report"]["gap"] < 1e-6
    assert d["config"]["seed"] == 7
    assert "converged=True" in capsys.readouterr().out


def test_search_rejects_rank_one(pair_files, capsys):
    code = main(["search", "--a", pair_files[0], "--b", pair_files[1], "--rank", "1", "--purity-max", "0.5", "--seed", "0"])
    assert code == EXIT_USAGE
    assert "rank" in capsys.readouterr().err


def test_search_commuting_pair(tmp_path, capsys):
    a = _write(tmp_path, "a.json", np.diag([0.0, 1.0, 1.0]))
    b = _write(tmp_path, "b.json", np.diag([0.0, 2.0, 2.0]))
    assert main(["search", "--a", a, "--b", b, "--seed", "0", "--gap-tol", "1e-10", "--json"]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert d["converged"] and not d["report"]["nontrivial"]


def test_search_needs_seed_in_ci(pair_files, monkeypatch):
    monkeypatch.setenv("CI", "1")
    assert main(["search", "--a", pair_files[0], "--b", pair_files[1]]) == EXIT_USAGE
    assert main(["search", "--a", pair_files[0], "--b", pair_files[1], "--seed", "7", "--json"]) == EXIT_OK


# -- gaussian and spin -----------------------------------------------------------

def test_gaussian_table(capsys):
    assert main(["gaussian", "--json"]) == EXIT_OK
    d = json.loads(capsys.readouterr().out)
    assert d["exact"]["mixture"]["bound"] == pytest.approx(4.0, abs=1e-12)
    assert d["fock_report"]["product"] == pytest.approx(4.0, abs=1e-8)
    assert d["tail_weight"] < 1e-10


def test_gaussian_bad_params():
    assert main(["gaussian", "--kappa", "-1"]) == EXIT_USAGE


def test_spin_export(tmp_path):
    assert main(["spin", "--j", "0,1", "--out", str(tmp_path)]) == EXIT_OK
    ref = oracles.spin_matrices([0, 1])
    for name, r in zip(("Jx", "Jy", "Jz"), ref[:3]):
        np.testing.assert_allclose(ser.load_observable(tmp_path / f"{name}.json").matrix, r, atol=1e-14)
    labels = json.loads((tmp_path / "labels.json").read_text())
    assert [(e["j"], e["m"]) for e in labels] == [("0", "0"), ("1", "1"), ("1", "0"), ("1", "-1")]


def test_spin_rejects_bad_j():
    assert main(["spin", "--j", "0.3"]) == EXIT_USAGE


def test_unknown_command():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2


def test_verify_alias(capsys):
    assert main(["verify-paper", "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["pass"]
