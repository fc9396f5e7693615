import json

import pytest

from symspace import cli, tree
from symspace.padic import PrimeConfig


@pytest.fixture
def run(capsys, caplog):
    """Call the CLI; returns exit code, parsed stdout and the logged messages."""

    def call(*argv):
        caplog.clear()
        code = cli.main(list(argv))
        out = capsys.readouterr().out
        return code, (json.loads(out) if out.strip() else None), caplog.text

    return call


# -- parsing -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,expected",
    [("3", (3, 0)), ("-1/2", (-0.5, 0)), ("1+√δ", (1, 1)), ("2-3/4√δ", (2, -0.75)),
     ("√δ", (0, 1)), ("-sqrt(delta)", (0, -1)), ("1/3*√δ", (0, 1 / 3))],
)
def test_parse_entry(text, expected):
    a, b = cli.parse_entry(text)
    assert (float(a), float(b)) == expected


@pytest.mark.parametrize("bad", ["1.5", "x", "", "1/0", "√δ+"])
def test_parse_entry_rejects(bad):
    with pytest.raises(cli.InputError):
        cli.parse_entry(bad)


def test_parse_matrix_rejects_ragged():
    with pytest.raises(cli.InputError):
        cli.parse_matrix('[["1","2"],["3"]]')


# -- factor-orth ---------------------------------------------------------------------


def test_factor_orth_worked_example(run):
    code, out, _ = run("factor-orth", "--p", "5", "--g", '[["1","2"],["2","-1"]]')
    assert code == 0
    assert out["class"] == ["pi", "pi"] and out["verified"] is True
    assert all(out["checks"].values())
    assert out["y"]["entries"] == [["1", "2"], ["2", "-1"]]


def test_factor_orth_identity(run):
    code, out, _ = run("factor-orth", "--p", "7", "--g", "[[1,0,0],[0,1,0],[0,0,1]]")
    eye = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    assert code == 0
    for key in ("h", "y", "s", "kappa"):
        assert out[key]["entries"] == eye
    assert out["class"] == ["1", "1", "1"]


def test_factor_orth_singular(run):
    code, out, err = run("factor-orth", "--g", '[["1","1"],["1","1"]]')
    assert code == 2 and out is None and "not invertible" in err


def test_factor_orth_parse_error(run):
    code, _, err = run("factor-orth", "--g", "[[1,0],[0,")
    assert code == 2


def test_factor_orth_precision_exhaustion(run):
    # entries spread over 4 digits in each direction at only 4 digits of precision
    code, _, err = run("factor-orth", "--p", "3", "--precision", "4",
                       "--g", '[["81","1/81"],["1","1"]]')
    assert code == 3 and "precision" in err


def test_verification_failure_is_precision_exit(run, monkeypatch):
    monkeypatch.setattr(cli.orthsym, "verify", lambda fac, g: {"recomposes": False})
    code, out, err = run("factor-orth", "--g", "[[1,0],[0,1]]")
    assert code == 3 and out is None and "recomposes" in err


# -- classify --------------------------------------------------------------------------


def test_classify_diag(run):
    code, out, _ = run("classify", "--p", "5", "--g", "[[5,0],[0,5]]")
    assert code == 0 and out["class"] == ["1", "1"] and out["rank"] == 2


def test_list_j(run):
    _, out7, _ = run("classify", "--list-J", "--n", "2", "--p", "7")
    assert sorted(map(tuple, out7["classes"])) == [("1", "1"), ("xi", "xi")]
    _, out5, _ = run("classify", "--list-J", "--n", "2", "--p", "5")
    assert out5["count"] == 4


def test_classify_needs_input(run):
    assert run("classify")[0] == 2


# -- factor-galois ----------------------------------------------------------------------


def test_factor_galois_rational(run):
    code, out, _ = run("factor-galois", "--p", "3", "--extension", "ramified-pi",
                       "--g", '[["2","1"],["7","3"]]')
    assert code == 0 and out["i"] == 0 and all(out["checks"].values())
    assert out["radius"] == 4


def test_factor_galois_u_witness(run):
    # u_1 diag(5, 1) with u_1 = [[√δ, -√δ], [1, 1]]
    g = '[["5√δ","-√δ"],["5","1"]]'
    for ext in ("ramified-pi", "ramified-xipi", "unramified"):
        code, out, _ = run("factor-galois", "--p", "5", "--extension", ext, "--g", g)
        assert code == 0 and out["i"] == 1, ext


def test_factor_galois_search_exhausted(run, monkeypatch):
    monkeypatch.setattr(tree, "find_sigma_stable_apartment", lambda *a, **k: None)
    code, out, err = run("factor-galois", "--p", "3", "--extension", "unramified",
                         "--radius", "2", "--g", "[[1,0],[0,1]]")
    assert code == 4 and out is None and "radius 2" in err


def test_factor_galois_rejects_3x3(run):
    code, _, _ = run("factor-galois", "--extension", "unramified",
                     "--g", "[[1,0,0],[0,1,0],[0,0,1]]")
    assert code == 2


# -- tree ---------------------------------------------------------------------------


def test_tree_census(run):
    code, out, _ = run("tree", "census", "--p", "3", "--extension", "ramified-pi", "--radius", "3")
    assert code == 0
    assert all(r["neighbors"] == 4 for r in out["records"])
    assert {r["type"] for r in out["records"] if r["fixed"]} == {"A", "B"}


def test_tree_census_needs_extension(run):
    assert run("tree", "census", "--p", "3")[0] == 2


def test_tree_stable_apartment_sweep(run):
    code, out, _ = run("tree", "raince", "--p", "3", "--radius", "2")
    assert code == 0 and out["all_found"] and len(out["vertices"]) == 1 + 4 + 12


def test_tree_stable_apartment_sweep_exhausted(run, monkeypatch):
    monkeypatch.setattr(tree, "find_sigma_stable_apartment", lambda *a, **k: None)
    code, out, _ = run("tree", "raince", "--p", "3", "--radius", "1")
    assert code == 4 and out["all_found"] is False


def test_tree_counterexample(run):
    code, out, _ = run("tree", "counterexample", "--p", "3",
                       "--extension", "ramified-pi", "--radius", "3")
    assert code == 0 and out["verdict"] == "all pointwise fixed"
    assert run("tree", "counterexample", "--p", "3", "--extension", "unramified")[0] == 2


# -- selftest and config ---------------------------------------------------------------------


def test_selftest_smoke(run):
    code, out, _ = run("selftest", "--trials", "5")
    assert code == 0 and out["all_passed"] and len(out["criteria"]) == 10


def test_selftest_failure_exit(run, monkeypatch):
    from symspace import acceptance

    def broken(seed, trials, only=None, log=None):
        return [acceptance.CriterionResult(1, "broken", False, {}, 0.0)]

    monkeypatch.setattr(acceptance, "run_all", broken)
    code, out, _ = run("selftest", "--trials", "1")
    assert code == 5 and out["all_passed"] is False


@pytest.mark.parametrize("argv", [["selftest", "--precision", "2"], ["classify", "--p", "4", "--list-J", "--n", "2"],
                                  ["selftest", "--trials", "0"]])
def test_config_rejected(run, argv):
    assert run(*argv)[0] == 2


def test_deterministic_output(capsys):
    argv = ["factor-galois", "--p", "5", "--extension", "ramified-xipi", "--g", '[["1+√δ","2"],["3","5"]]']
    cli.main(argv)
    first = capsys.readouterr().out
    cli.main(argv)
    assert capsys.readouterr().out == first


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("SYMSPACE_SEED", "1234")
    assert cli._default_seed() == 1234
    monkeypatch.delenv("SYMSPACE_SEED")
    assert cli._default_seed() == 0


def test_fmt_balanced():
    F = PrimeConfig(5, 10)
    assert cli.fmt(F(-3)) == "-3"
    assert cli.fmt(F(12)) == "12"
