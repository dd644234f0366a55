"""Command-line interface.

Exit codes: 0 ok, 1 parse error, 2 solver limit, 3 invalid input tree,
4 branch limit, 5 bound violation.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from . import convert as cv
from .core import Tree, TreeKind, cost, validate
from .dot import to_dot
from .entropy import (
    bound_difference,
    extreme_instance,
    loc_bound_minus_one,
    loc_entropy,
    nil_direct_bound,
)
from .formats import (
    FormatError,
    dumps_instance,
    dumps_tree,
    loads_instance,
    loads_tree,
    parse_rational,
    rational_to_str,
)
from .generate import two_key_instance, random_instance, tightness_instance
from .optimal import MAX_N, SolverLimitError, optimal

EXIT_PARSE = 1
EXIT_LIMIT = 2
EXIT_BAD_TREE = 3
EXIT_BRANCH = 4
EXIT_VIOLATION = 5

KINDS = {"loc": TreeKind.LOC, "nil": TreeKind.NIL, "succ": TreeKind.SUCCESSFUL_ONLY}


def _fail(msg: str, code: int):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc), EXIT_PARSE)


def _load_instance(path: str):
    try:
        return loads_instance(_read(path))
    except FormatError as exc:
        _fail(f"{path}: {exc}", EXIT_PARSE)


def _load_tree(path: str, n: int | None = None, code: int = EXIT_PARSE) -> Tree:
    try:
        return loads_tree(_read(path), n)
    except FormatError as exc:
        _fail(f"{path}: {exc}", code)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _r(x: Fraction) -> str:
    return rational_to_str(x)


@click.group()
def main():
    """Optimal two-way comparison search trees and the nil-to-loc conversion."""


@main.command()
@click.option("--kind", type=click.Choice(sorted(KINDS)), required=True)
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--emit-tree", type=click.Path(), help="Write the optimal tree as JSON.")
@click.option("--max-n", default=MAX_N, show_default=True)
def solve(kind, input_path, emit_tree, max_n):
    """Print the optimal cost of a tree of KIND."""
    inst = _load_instance(input_path)
    try:
        value, tree = optimal(inst, KINDS[kind], max_n=max_n)
    except SolverLimitError as exc:
        _fail(str(exc), EXIT_LIMIT)
    click.echo(_r(value))
    if emit_tree:
        _write(emit_tree, dumps_tree(tree))


@main.command(name="convert")
@click.option("--tree", "tree_path", required=True, type=click.Path())
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--mode", type=click.Choice(["seeded", "exact", "best"]), default="seeded", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--branch-limit", default=cv.DEFAULT_BRANCH_LIMIT, show_default=True)
@click.option("--emit-trace", type=click.Path(), help="Write the conversion trace (seeded mode).")
@click.option("--emit-tree", type=click.Path(), help="Write the resulting loc tree.")
def convert_cmd(tree_path, input_path, mode, seed, branch_limit, emit_trace, emit_tree):
    """Convert a nil tree into a loc tree and check the +1 bound."""
    inst = _load_instance(input_path)
    tree = _load_tree(tree_path, inst.n, EXIT_BAD_TREE)
    report = validate(tree, inst, TreeKind.NIL)
    if not report.correct or report.redundant_nodes:
        problems = report.violations or [f"redundant nodes {report.redundant_nodes}"]
        _fail("input is not a correct non-redundant nil tree: " + "; ".join(problems), EXIT_BAD_TREE)

    base = cost(tree, inst)
    bound = base + 1
    click.echo(f"input_cost {_r(base)}")
    click.echo(f"bound {_r(bound)}")
    out_tree = None
    try:
        if mode == "seeded":
            out_tree, trace = cv.process(tree, inst, seed)
            value = cost(out_tree, inst)
            click.echo(f"cases {' '.join(s.case.value for s in trace.steps) or '-'}")
            click.echo(f"cost {_r(value)}")
            if emit_trace:
                _write(emit_trace, trace.dumps())
        elif mode == "exact":
            res = cv.exact_expected_cost(tree, inst, branch_limit)
            value = res.expected_cost
            click.echo(f"executions {res.executions}")
            click.echo(f"expected {_r(value)}")
        else:
            out_tree, value = cv.best_conversion(tree, inst, branch_limit)
            click.echo(f"best {_r(value)}")
    except cv.BranchLimitError as exc:
        _fail(str(exc), EXIT_BRANCH)
    if emit_tree and out_tree is not None:
        _write(emit_tree, dumps_tree(out_tree))
    ok = value <= bound
    click.echo("PASS" if ok else "FAIL")
    if not ok:
        sys.exit(EXIT_VIOLATION)


@dataclass(frozen=True)
class ExperimentConfig:
    n_min: int
    n_max: int
    trials: int
    seed: int

    def __post_init__(self):
        if not 0 <= self.n_min <= self.n_max:
            raise ValueError("need 0 <= n-min <= n-max")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def trial_seed(self, index: int) -> int:
        return self.seed + index

    def trial_instance(self, index: int):
        rng = random.Random(self.trial_seed(index))
        n = rng.randint(self.n_min, self.n_max)
        return random_instance(n, rng.getrandbits(64))


@dataclass
class GapRow:
    trial: int
    n: int
    opt_nil: Fraction
    opt_loc: Fraction
    converted: Fraction

    @property
    def gap(self) -> Fraction:
        return self.opt_loc - self.opt_nil

    @property
    def ok(self) -> bool:
        return self.opt_nil <= self.opt_loc <= self.opt_nil + 1 and self.converted <= self.opt_nil + 1

    def line(self) -> str:
        return "\t".join(
            [str(self.trial), str(self.n), _r(self.opt_nil), _r(self.opt_loc), _r(self.gap), _r(self.converted)]
        )


def run_gap_trial(config: ExperimentConfig, index: int, branch_limit: int = cv.DEFAULT_BRANCH_LIMIT) -> GapRow:
    inst = config.trial_instance(index)
    nil_cost, nil_tree = optimal(inst, TreeKind.NIL)
    loc_cost, _ = optimal(inst, TreeKind.LOC)
    expected = cv.exact_expected_cost(nil_tree, inst, branch_limit).expected_cost
    return GapRow(index, inst.n, nil_cost, loc_cost, expected)


@main.command()
@click.option("--n-min", default=1, show_default=True)
@click.option("--n-max", default=6, show_default=True)
@click.option("--trials", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--branch-limit", default=cv.DEFAULT_BRANCH_LIMIT, show_default=True)
@click.option("--tightness", "eps_list", multiple=True, help="Run the one-key family for these eps instead.")
def gap(n_min, n_max, trials, seed, branch_limit, eps_list):
    """Tabulate optimal nil vs loc costs on random instances."""
    if eps_list:
        click.echo("eps\topt_nil\topt_loc\tgap")
        for text in eps_list:
            try:
                inst = tightness_instance(parse_rational(text))
            except (FormatError, ValueError) as exc:
                _fail(str(exc), EXIT_PARSE)
            a, _ = optimal(inst, TreeKind.NIL)
            b, _ = optimal(inst, TreeKind.LOC)
            click.echo(f"{text}\t{_r(a)}\t{_r(b)}\t{_r(b - a)}")
            if not a <= b <= a + 1:
                _fail(f"bound violated for eps={text}", EXIT_VIOLATION)
        return
    try:
        config = ExperimentConfig(n_min, n_max, trials, seed)
        if n_max > MAX_N:
            raise SolverLimitError(f"n-max {n_max} exceeds solver limit {MAX_N}")
    except SolverLimitError as exc:
        _fail(str(exc), EXIT_LIMIT)
    except ValueError as exc:
        _fail(str(exc), EXIT_PARSE)
    click.echo("trial\tn\topt_nil\topt_loc\tgap\tconverted")
    worst = None
    bad = []
    for i in range(trials):
        try:
            row = run_gap_trial(config, i, branch_limit)
        except cv.BranchLimitError as exc:
            _fail(f"trial {i}: {exc}", EXIT_BRANCH)
        click.echo(row.line())
        worst = row.gap if worst is None else max(worst, row.gap)
        if not row.ok:
            bad.append(i)
    click.echo(f"max_gap {'-' if worst is None else _r(worst)}")
    if bad:
        _fail(f"bound violated in trials {bad}", EXIT_VIOLATION)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
def entropy(input_path):
    """Print entropy bounds and, for small n, the optimal costs."""
    inst = _load_instance(input_path)
    h = loc_entropy(inst)
    direct = nil_direct_bound(inst)
    via_loc = loc_bound_minus_one(inst)
    click.echo(f"H(alpha,beta) {h:.6f}")
    click.echo(f"nil_direct_bound {direct:.6f}")
    click.echo(f"loc_bound_minus_one {via_loc:.6f}")
    click.echo(f"difference {bound_difference(inst):.6f}")
    if inst.n > MAX_N:
        click.echo(f"opt costs skipped (n={inst.n} > {MAX_N})")
        return
    nil_cost, _ = optimal(inst, TreeKind.NIL)
    loc_cost, _ = optimal(inst, TreeKind.LOC)
    click.echo(f"opt_nil {_r(nil_cost)} ({float(nil_cost):.6f})")
    click.echo(f"opt_loc {_r(loc_cost)} ({float(loc_cost):.6f})")
    tol = 1e-9
    checks = {
        "opt_loc >= H": float(loc_cost) >= h - tol,
        "opt_nil >= direct": float(nil_cost) >= direct - tol,
        "opt_nil >= H - 1": float(nil_cost) >= via_loc - tol,
        "opt_nil <= opt_loc <= opt_nil + 1": nil_cost <= loc_cost <= nil_cost + 1,
    }
    for name, ok in checks.items():
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}")
    if not all(checks.values()):
        sys.exit(EXIT_VIOLATION)


@main.command()
@click.option("--tree", "tree_path", required=True, type=click.Path())
def dot(tree_path):
    """Render a tree file as Graphviz DOT."""
    click.echo(to_dot(_load_tree(tree_path)), nl=False)


@main.command()
@click.option("--random", "random_n", type=int, help="Random instance with this many keys.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--two-key", is_flag=True, help="Two keys, all probabilities 1/5.")
@click.option("--tight", "eps", help="One-key family with key and left gap at EPS.")
@click.option("--extreme", type=int, help="Keys at 1/n^2, gaps share the rest.")
def instance(random_n, seed, two_key, eps, extreme):
    """Print an instance file."""
    chosen = [x for x in (random_n is not None, two_key, eps is not None, extreme is not None) if x]
    if len(chosen) != 1:
        _fail("choose exactly one of --random, --two-key, --tight, --extreme", EXIT_PARSE)
    try:
        if random_n is not None:
            inst = random_instance(random_n, seed)
        elif two_key:
            inst = two_key_instance()
        elif eps is not None:
            inst = tightness_instance(parse_rational(eps))
        else:
            inst = extreme_instance(extreme)
    except (FormatError, ValueError) as exc:
        _fail(str(exc), EXIT_PARSE)
    click.echo(dumps_instance(inst), nl=False)


if __name__ == "__main__":
    main()
