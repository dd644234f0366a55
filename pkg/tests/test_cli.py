from fractions import Fraction

import pytest
from click.testing import CliRunner

from twoway.cli import ExperimentConfig, main, run_gap_trial
from twoway.core import Tree, TreeKind, cost, eq, less, validate, KeyLeaf, NilLeaf
from twoway.dot import to_dot
from twoway.formats import dumps_instance, dumps_tree, loads_instance, loads_tree
from twoway.generate import two_key_instance, two_key_loc_tree, two_key_nil_tree, random_instance, tightness_instance


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def files(tmp_path):
    inst = tmp_path / "two_key.json"
    inst.write_text(dumps_instance(two_key_instance()))
    nil = tmp_path / "nil.json"
    nil.write_text(dumps_tree(two_key_nil_tree()))
    loc = tmp_path / "loc.json"
    loc.write_text(dumps_tree(two_key_loc_tree()))
    return tmp_path, str(inst), str(nil), str(loc)


def run(runner, *args):
    return runner.invoke(main, [str(a) for a in args])


# --- solve ------------------------------------------------------------------

def test_solve_two_key(runner, files):
    tmp, inst, _, _ = files
    assert run(runner, "solve", "--kind", "nil", "--input", inst).output == "9/5\n"
    out = tmp / "opt.json"
    r = run(runner, "solve", "--kind", "loc", "--input", inst, "--emit-tree", out)
    assert r.exit_code == 0 and r.output == "12/5\n"
    tree = loads_tree(out.read_text(), 2)
    assert validate(tree, two_key_instance(), TreeKind.LOC).correct
    assert cost(tree, two_key_instance()) == Fraction(12, 5)


def test_solve_tightness(runner, tmp_path):
    p = tmp_path / "t.json"
    p.write_text(dumps_instance(tightness_instance(Fraction(1, 10))))
    assert run(runner, "solve", "--kind", "loc", "--input", p).output == "19/10\n"
    assert run(runner, "solve", "--kind", "nil", "--input", p).output == "1\n"


def test_exit_codes(runner, files, tmp_path):
    _, inst, nil, _ = files
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "beta": ["1/2"], "alpha": ["1/2"]}')
    assert run(runner, "solve", "--kind", "nil", "--input", bad).exit_code == 1
    assert run(runner, "solve", "--kind", "nil", "--input", tmp_path / "missing.json").exit_code == 1
    assert run(runner, "solve", "--kind", "nil", "--input", inst, "--max-n", 1).exit_code == 2

    wrong = tmp_path / "wrong.json"
    wrong.write_text(dumps_tree(Tree(eq(1, KeyLeaf(1), NilLeaf()), 2)))
    assert run(runner, "convert", "--tree", wrong, "--input", inst).exit_code == 3
    junk = tmp_path / "junk.json"
    junk.write_text("{")
    assert run(runner, "convert", "--tree", junk, "--input", inst).exit_code == 3

    d_inst = tmp_path / "d.json"
    d_inst.write_text(dumps_instance(random_instance(3, 1)))
    d_tree = tmp_path / "dtree.json"
    d_tree.write_text(
        dumps_tree(Tree(eq(2, KeyLeaf(2), less(3, eq(1, KeyLeaf(1), NilLeaf()), eq(3, KeyLeaf(3), NilLeaf()))), 3))
    )
    r = run(runner, "convert", "--tree", d_tree, "--input", d_inst, "--mode", "exact", "--branch-limit", 0)
    assert r.exit_code == 4
    assert run(runner, "gap", "--n-max", 11, "--trials", 1).exit_code == 2


# --- convert ----------------------------------------------------------------

def test_convert_modes(runner, files):
    _, inst, nil, _ = files
    r = run(runner, "convert", "--tree", nil, "--input", inst)
    assert r.exit_code == 0
    assert r.output.splitlines() == ["input_cost 9/5", "bound 14/5", "cases a1 g", "cost 12/5", "PASS"]
    r = run(runner, "convert", "--tree", nil, "--input", inst, "--mode", "exact")
    assert "executions 1" in r.output and "expected 12/5" in r.output
    r = run(runner, "convert", "--tree", nil, "--input", inst, "--mode", "best")
    assert "best 12/5" in r.output and r.output.endswith("PASS\n")


def test_convert_seeded_is_byte_identical(runner, tmp_path):
    inst = random_instance(6, 99)
    from twoway.optimal import optimal

    (tmp_path / "i.json").write_text(dumps_instance(inst))
    (tmp_path / "t.json").write_text(dumps_tree(optimal(inst, TreeKind.NIL)[1]))
    outs = []
    for j in range(2):
        tree, trace = tmp_path / f"out{j}.json", tmp_path / f"trace{j}.json"
        r = run(runner, "convert", "--tree", tmp_path / "t.json", "--input", tmp_path / "i.json",
                "--seed", 7, "--emit-tree", tree, "--emit-trace", trace)
        assert r.exit_code == 0
        outs.append((r.output, tree.read_bytes(), trace.read_bytes()))
    assert outs[0] == outs[1]


# --- gap --------------------------------------------------------------------

def test_gap_zero_trials(runner):
    r = run(runner, "gap", "--trials", 0)
    assert r.exit_code == 0
    assert r.output.splitlines() == ["trial\tn\topt_nil\topt_loc\tgap\tconverted", "max_gap -"]


def test_gap_tightness(runner):
    r = run(runner, "gap", "--tightness", "1/4", "--tightness", "1/10", "--tightness", "1/100")
    assert r.exit_code == 0
    assert r.output.splitlines()[1:] == ["1/4\t1\t7/4\t3/4", "1/10\t1\t19/10\t9/10", "1/100\t1\t199/100\t99/100"]
    assert run(runner, "gap", "--tightness", "1/2").exit_code == 1


def test_gap_random(runner):
    r = run(runner, "gap", "--n-min", 1, "--n-max", 4, "--trials", 15, "--seed", 3)
    assert r.exit_code == 0
    lines = r.output.splitlines()
    assert len(lines) == 17
    rows = [line.split("\t") for line in lines[1:-1]]
    assert [int(row[0]) for row in rows] == list(range(15))
    for row in rows:
        nil, loc, gap = map(Fraction, row[2:5])
        assert 0 <= gap == loc - nil <= 1
        assert Fraction(row[5]) <= nil + 1
    assert run(runner, "gap", "--n-min", 1, "--n-max", 4, "--trials", 15, "--seed", 3).output == r.output


def test_gap_trial_seeding():
    config = ExperimentConfig(1, 5, 10, 42)
    assert config.trial_instance(3) == ExperimentConfig(1, 5, 99, 42).trial_instance(3)
    row = run_gap_trial(config, 0)
    assert row.ok and row.gap >= 0
    with pytest.raises(ValueError):
        ExperimentConfig(3, 2, 1, 0)


# --- entropy, dot, instance -------------------------------------------------

def test_entropy_command(runner, files):
    _, inst, _, _ = files
    r = run(runner, "entropy", "--input", inst)
    assert r.exit_code == 0
    assert "nil_direct_bound 1.370951" in r.output
    assert "opt_nil 9/5 (1.800000)" in r.output
    assert "FAIL" not in r.output and r.output.count("PASS") == 4


def test_entropy_extreme(runner, tmp_path):
    r = run(runner, "instance", "--extreme", 100)
    p = tmp_path / "x.json"
    p.write_text(r.output)
    r = run(runner, "entropy", "--input", p)
    assert r.exit_code == 0 and "skipped" in r.output
    fields = dict(line.rsplit(" ", 1) for line in r.output.splitlines()[:4])
    assert float(fields["nil_direct_bound"]) < 0.2
    assert float(fields["loc_bound_minus_one"]) > 5


def test_dot(runner, files, tmp_path):
    _, _, _, loc = files
    r = run(runner, "dot", "--tree", loc)
    assert r.exit_code == 0
    assert r.output.count("shape=ellipse") == 4
    assert r.output.count("shape=box") == 5
    assert r.output.count("->") == 8
    assert run(runner, "dot", "--tree", loc).output == r.output
    leaf = tmp_path / "leaf.json"
    leaf.write_text('{"leaf": "interval", "i": 0}')
    out = run(runner, "dot", "--tree", leaf).output
    assert out.count("[label=") == 1 and "->" not in out


def test_dot_edge_order():
    lines = to_dot(two_key_loc_tree()).splitlines()
    edges = [line for line in lines if "->" in line]
    assert edges[0].strip().startswith("n0 -> n1") and "yes" in edges[0]
    assert "no" in edges[1] and edges[1].strip().startswith("n0 ->")


def test_instance_command(runner):
    r = run(runner, "instance", "--random", 3, "--seed", 5)
    assert loads_instance(r.output) == random_instance(3, 5)
    assert run(runner, "instance", "--two-key").output == dumps_instance(two_key_instance())
    assert loads_instance(run(runner, "instance", "--tight", "1/10").output) == tightness_instance(Fraction(1, 10))
    assert run(runner, "instance").exit_code == 1
    assert run(runner, "instance", "--extreme", 1).exit_code == 1


def test_random_instance_properties():
    assert random_instance(4, 11) == random_instance(4, 11)
    assert random_instance(0, 1).alpha == (1,)
    for seed in range(20):
        inst = random_instance(5, seed)
        assert sum(inst.atom_probs()) == 1
        assert all(p > 0 for p in inst.atom_probs())
    with pytest.raises(ValueError):
        random_instance(-1, 0)
