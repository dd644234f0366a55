"""Randomised conversion of nil trees into loc trees.

Every equality node ``=B`` is visited in post-order.  The first few nodes on
the search path for ``B`` below it (at most ``=B`` and two more) decide one
of ten local shapes, and the subtree at ``=B`` is rewritten so that no leaf
is split by ``B`` any more.  Exactly one shape (``d``) has two rewrites; a
fair coin picks between them.  The expected depth of every query grows by at
most one, so the expected cost grows by at most one.

Rewrites copy subtrees instead of pruning them, which leaves redundant nodes
behind; they are spliced out once at the end.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .core import (
    Comparison,
    Instance,
    Internal,
    IntervalLeaf,
    KeyLeaf,
    NilLeaf,
    Node,
    Op,
    Tree,
    TreeError,
    TreeKind,
    all_atoms,
    break_leaf_path,
    cost,
    depths,
    eq,
    is_leaf,
    leaves_with_break,
    less,
    loc_to_nil,
    nil_to_loc,
    prune_redundant,
    query_set,
    validate,
)
from .optimal import successful_only_optimal_over_items

DEFAULT_BRANCH_LIMIT = 20


class Case(str, enum.Enum):
    A1 = "a1"
    A2 = "a2"
    B = "b"
    C1 = "c1"
    C2 = "c2"
    D = "d"
    E = "e"
    F = "f"
    G = "g"
    H = "h"


IDENTITY_CASES = {Case.C1, Case.C2}
SPLIT_CASES = {Case.A1, Case.A2}


class ConversionError(RuntimeError):
    """An intermediate tree has a shape the conversion cannot occur on.

    Valid non-redundant input never triggers this; it signals a bug.
    """


class InvalidInputTree(ValueError):
    pass


class BranchLimitError(RuntimeError):
    pass


class ContractViolation(AssertionError):
    pass


@dataclass(frozen=True)
class CaseBindings:
    case: Case
    path: str
    subtree: Node = field(repr=False)
    B: int
    A: int | None = None
    op_A: Op | None = None
    C: int | None = None
    D: int | None = None
    X: int | None = None
    t1: Node | None = field(default=None, repr=False)
    t2: Node | None = field(default=None, repr=False)
    t3: Node | None = field(default=None, repr=False)
    # yes-leaf of =D (g, h) or =C (f)
    key_leaf: Node | None = field(default=None, repr=False)
    # ℓ_B for a1/a2
    leaf_path: str | None = None


def classify(tree: Tree, path: str) -> CaseBindings:
    """Match the prefix of the search path for ``B`` below ``=B`` at ``path``."""
    node = tree.node(path)
    if not isinstance(node, Internal) or node.op is not Op.EQ:
        raise ConversionError(f"node at {path or 'root'} is not an equality test")
    B = node.key
    base = dict(path=path, subtree=node, B=B)
    n2 = node.no
    if is_leaf(n2):
        return CaseBindings(Case.A1, leaf_path=path + "N", **base)
    if n2.key < B:
        return CaseBindings(Case.B, A=n2.key, op_A=n2.op, t1=n2.yes, t2=n2.no, **base)
    if n2.key == B:
        if n2.op is Op.EQ:
            raise ConversionError(f"second =={B} directly below =={B} at {path or 'root'}")
        return CaseBindings(Case.C1, **base)

    D = n2.key
    if n2.op is Op.LESS:
        n3, t3 = n2.yes, n2.no
        if is_leaf(n3):
            return CaseBindings(Case.A2, D=D, t3=t3, leaf_path=path + "NY", **base)
        if n3.key < B:
            return CaseBindings(
                Case.D, A=n3.key, op_A=n3.op, D=D, t1=n3.yes, t2=n3.no, t3=t3, **base
            )
        if n3.key == B:
            if n3.op is Op.EQ:
                raise ConversionError(f"second =={B} below =={B} at {path or 'root'}")
            return CaseBindings(Case.C2, D=D, **base)
        if n3.key >= D:
            raise ConversionError(
                f"<{D} at {path}N has yes-child comparing to {n3.key} >= {D}"
            )
        if n3.op is Op.LESS:
            return CaseBindings(Case.E, C=n3.key, D=D, t1=n3.yes, t2=n3.no, t3=t3, **base)
        return CaseBindings(
            Case.F, C=n3.key, D=D, t1=n3.yes, t2=n3.no, t3=t3, key_leaf=n3.yes, **base
        )

    n3 = n2.no
    if is_leaf(n3) or n3.op is not Op.LESS or n3.key < D:
        raise ConversionError(
            f"=={D} at {path}N must have a no-child <X with X >= {D}, found {n3}"
        )
    case = Case.G if n3.key == D else Case.H
    return CaseBindings(case, D=D, X=n3.key, t1=n3.yes, t2=n3.no, key_leaf=n2.yes, **base)


def _replacement(b: CaseBindings, coin: bool | None) -> Node:
    N = b.subtree
    kb = N.yes
    B = b.B
    if b.case in IDENTITY_CASES:
        return N
    if b.case is Case.A1:
        leaf = N.no
        return eq(B, kb, less(B, leaf, leaf))
    if b.case is Case.A2:
        leaf = N.no.yes
        return eq(B, kb, less(b.D, less(B, leaf, leaf), b.t3))
    if b.case is Case.B:
        m = Internal(Comparison(b.op_A, b.A), b.t1, b.t2)
        return less(B, m, eq(B, kb, b.t2))
    if b.case is Case.D:
        m = Internal(Comparison(b.op_A, b.A), b.t1, b.t2)
        if coin:
            return less(B, m, eq(B, kb, less(b.D, b.t2, b.t3)))
        return less(b.D, eq(B, kb, less(B, m, b.t2)), b.t3)
    if b.case is Case.E:
        return less(b.C, eq(B, kb, less(B, b.t1, b.t1)), less(b.D, b.t2, b.t3))
    if b.case is Case.F:
        return less(
            b.C,
            eq(B, kb, less(B, b.t2, b.t2)),
            less(b.D, eq(b.C, b.key_leaf, b.t2), b.t3),
        )
    if b.case is Case.G:
        return less(b.D, eq(B, kb, less(B, b.t1, b.t1)), eq(b.D, b.key_leaf, b.t2))
    if b.case is Case.H:
        return less(
            b.D,
            eq(B, kb, less(B, b.t1, b.t1)),
            eq(b.D, b.key_leaf, less(b.X, b.t1, b.t2)),
        )
    raise AssertionError(b.case)


def apply_replacement(tree: Tree, bindings: CaseBindings, coin: bool | None = None) -> Tree:
    """Rewrite the subtree at ``bindings.path`` for its case.

    ``coin`` (True for the first variant) must be given exactly for case ``d``.
    """
    if (coin is None) == (bindings.case is Case.D):
        raise ValueError(
            f"case {bindings.case.value} {'needs' if coin is None else 'takes no'} coin"
        )
    current = tree.node(bindings.path)
    if current is not bindings.subtree and current != bindings.subtree:
        raise ValueError(f"bindings for {bindings.path or 'root'} are stale")
    return tree.replace(bindings.path, _replacement(bindings, coin))


# --------------------------------------------------------------------------
# Contract checking
# --------------------------------------------------------------------------

@dataclass
class StepReport:
    path: str
    case: Case
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _delta(before: list[int], after: list[int]) -> list[int]:
    return [a - b for a, b in zip(after, before)]


def check_step_contract(
    before: Tree,
    after: Tree,
    bindings: CaseBindings,
    instance: Instance,
    history: Iterable[str] | None = None,
) -> StepReport:
    """Verify one conversion step.

    Checks that ``after`` is a correct nil tree, that no leaf has a break due
    to ``B``, the per-atom depth contract of the case, and (given the paths
    of earlier steps in ``history``) that a split leaf was never inside an
    earlier replacement.
    """
    rep = StepReport(bindings.path, bindings.case)
    v = rep.violations
    B = bindings.B
    kb = 2 * B - 1

    report = validate(after, instance, TreeKind.NIL)
    if not report.correct:
        v.extend(f"incorrect: {x}" for x in report.violations)
    broken = leaves_with_break(after, B)
    if broken:
        v.append(f"leaves {broken} still have a break due to {B}")

    d0 = depths(before)
    if bindings.case is Case.D:
        variants = {c: apply_replacement(before, bindings, c) for c in (True, False)}
        if after not in variants.values():
            v.append("tree after a d step matches neither coin's replacement")
        dy = _delta(d0, depths(variants[True]))
        dn = _delta(d0, depths(variants[False]))
        for j in range(len(d0)):
            if j == kb:
                if dy[j] != 1 or dn[j] != 1:
                    v.append(f"key {B} changes by {dy[j]}/{dn[j]}, expected +1 under both coins")
            elif dy[j] not in (-1, 0, 1) or dy[j] + dn[j] != 0:
                v.append(f"atom {j} changes by {dy[j]}/{dn[j]} under the two coins")
    else:
        delta = _delta(d0, depths(after))
        if bindings.case in IDENTITY_CASES:
            if after != before:
                v.append("identity case changed the tree")
        elif bindings.case in SPLIT_CASES:
            split = {a.index for a in query_set(before, bindings.leaf_path)}
            for j, dj in enumerate(delta):
                want = 1 if j in split else 0
                if dj != want:
                    v.append(f"atom {j} changes by {dj}, expected {want}")
        else:
            for j, dj in enumerate(delta):
                if j == kb and dj != 1:
                    v.append(f"key {B} changes by {dj}, expected +1")
                elif j != kb and dj > 0:
                    v.append(f"atom {j} gets deeper by {dj}")

    if bindings.case in SPLIT_CASES | IDENTITY_CASES:
        root = after.node(bindings.path)
        tail = root.no if isinstance(root, Internal) else None
        if not (
            isinstance(root, Internal)
            and root.cmp == Comparison(Op.EQ, B)
            and isinstance(tail, Internal)
            and tail.op is Op.LESS
            and tail.key >= B
        ):
            v.append(f"result root is not =={B} with a <X (X >= {B}) no-child")

    if bindings.case in SPLIT_CASES:
        try:
            expected = break_leaf_path(before, B, start=bindings.path)
        except TreeError as exc:
            expected = str(exc)
        if expected != bindings.leaf_path:
            v.append(f"split leaf {bindings.leaf_path} is not the break leaf ({expected})")

    if bindings.case in SPLIT_CASES and history is not None:
        earlier = [p for p in history if bindings.leaf_path.startswith(p)]
        if earlier:
            v.append(f"split leaf {bindings.leaf_path} lies in earlier replacement(s) at {earlier}")
    return rep


# --------------------------------------------------------------------------
# Process and traces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    path: str
    case: Case
    coin: bool | None = None


@dataclass
class ConversionTrace:
    steps: list[Step] = field(default_factory=list)
    seed: int | None = None

    @property
    def coins(self) -> list[bool]:
        return [s.coin for s in self.steps if s.coin is not None]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "steps": [
                {
                    "path": s.path,
                    "case": s.case.value,
                    "coin": None if s.coin is None else ("yes" if s.coin else "no"),
                }
                for s in self.steps
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ConversionTrace":
        steps = []
        for s in data["steps"]:
            coin = s.get("coin")
            if coin not in (None, "yes", "no"):
                raise ValueError(f"bad coin {coin!r}")
            steps.append(Step(s["path"], Case(s["case"]), None if coin is None else coin == "yes"))
        return cls(steps, data.get("seed"))

    @classmethod
    def loads(cls, text: str) -> "ConversionTrace":
        return cls.from_dict(json.loads(text))


@dataclass
class Execution:
    """One complete run of the conversion."""

    tree: Tree
    raw: Tree
    trace: ConversionTrace
    probability: Fraction = Fraction(1)
    reports: list[StepReport] = field(default_factory=list)


class _NeedCoin(Exception):
    pass


def _postorder_eq_paths(node: Node, path: str = "") -> list[str]:
    if not isinstance(node, Internal):
        return []
    out = _postorder_eq_paths(node.yes, path + "Y") + _postorder_eq_paths(node.no, path + "N")
    if node.op is Op.EQ:
        out.append(path)
    return out


def _check_input(tree: Tree, instance: Instance) -> None:
    report = validate(tree, instance, TreeKind.NIL)
    if not report.correct:
        raise InvalidInputTree("; ".join(report.violations))
    if report.redundant_nodes:
        raise InvalidInputTree(f"redundant nodes at {report.redundant_nodes}")


def _run(tree: Tree, instance: Instance, coin_fn: Callable[[], bool], check: bool) -> Execution:
    _check_input(tree, instance)
    t = loc_to_nil(tree)
    trace = ConversionTrace()
    reports = []
    done: list[str] = []
    for path in _postorder_eq_paths(t.root):
        b = classify(t, path)
        coin = coin_fn() if b.case is Case.D else None
        new = apply_replacement(t, b, coin)
        if check:
            rep = check_step_contract(t, new, b, instance, done)
            reports.append(rep)
            if not rep.ok:
                raise ContractViolation(f"step at {path or 'root'} ({b.case.value}): {rep.violations}")
        trace.steps.append(Step(path, b.case, coin))
        done.append(path)
        t = new
    final = nil_to_loc(prune_redundant(t))
    return Execution(final, t, trace, Fraction(1), reports)


def seeded_coins(seed: int) -> Callable[[], bool]:
    rng = random.Random(seed)
    return lambda: rng.random() < 0.5


def _replay_coins(coins: Iterable[bool]) -> Callable[[], bool]:
    it = iter(coins)

    def draw():
        try:
            return next(it)
        except StopIteration:
            raise _NeedCoin from None

    return draw


def process(
    tree: Tree,
    instance: Instance,
    coin_source: Callable[[], bool] | int | None = None,
    check: bool = False,
) -> tuple[Tree, ConversionTrace]:
    """Convert a correct non-redundant nil tree into a correct loc tree.

    ``coin_source`` is a seed or a zero-argument callable returning the
    coin for each ``d`` step (True selects the first variant).  With
    ``check=True`` every step is verified by :func:`check_step_contract`.
    """
    seed = None
    if coin_source is None:
        coin_source = 0
    if isinstance(coin_source, int):
        seed = coin_source
        coin_source = seeded_coins(seed)
    ex = _run(tree, instance, coin_source, check)
    ex.trace.seed = seed
    return ex.tree, ex.trace


def replay(tree: Tree, instance: Instance, trace: ConversionTrace, check: bool = False) -> Tree:
    """Re-run a conversion with the coins recorded in ``trace``."""
    ex = _run(tree, instance, _replay_coins(trace.coins), check)
    if ex.trace.steps != trace.steps:
        raise ValueError("trace does not match this tree")
    return ex.tree


def executions(
    tree: Tree,
    instance: Instance,
    branch_limit: int = DEFAULT_BRANCH_LIMIT,
    check: bool = False,
) -> Iterator[Execution]:
    """Every run of the conversion with its probability.

    Coins are branched on as they are requested, so later shapes may depend
    on earlier coins.  ``branch_limit`` caps the number of coin draws over
    the whole execution tree.
    """
    stack: list[tuple[bool, ...]] = [()]
    branch_points = 0
    while stack:
        prefix = stack.pop()
        try:
            ex = _run(tree, instance, _replay_coins(prefix), check)
        except _NeedCoin:
            branch_points += 1
            if branch_points > branch_limit:
                raise BranchLimitError(f"more than {branch_limit} coin branch points") from None
            stack.append(prefix + (False,))
            stack.append(prefix + (True,))
            continue
        ex.probability = Fraction(1, 2 ** len(prefix))
        yield ex


@dataclass
class ExpectedCost:
    expected_cost: Fraction
    per_atom_expected_depth: list[Fraction]
    executions: int


def exact_expected_cost(
    tree: Tree, instance: Instance, branch_limit: int = DEFAULT_BRANCH_LIMIT, check: bool = False
) -> ExpectedCost:
    total = Fraction(0)
    per_atom = [Fraction(0)] * instance.size
    count = 0
    for ex in executions(tree, instance, branch_limit, check):
        count += 1
        total += ex.probability * cost(ex.tree, instance)
        for j, d in enumerate(depths(ex.tree)):
            per_atom[j] += ex.probability * d
    return ExpectedCost(total, per_atom, count)


def best_conversion(
    tree: Tree, instance: Instance, branch_limit: int = DEFAULT_BRANCH_LIMIT
) -> tuple[Tree, Fraction]:
    """Cheapest loc tree over all runs of the conversion."""
    best = None
    for ex in executions(tree, instance, branch_limit):
        c = cost(ex.tree, instance)
        if best is None or c < best[1]:
            best = (ex.tree, c)
    return best


# --------------------------------------------------------------------------
# Merge-based conversion
# --------------------------------------------------------------------------

def merge_convert(instance: Instance) -> tuple[Tree, Fraction]:
    """Loc tree from an optimal alphabetic tree over merged items.

    Item 0 is the interval ``(0,1)``; item ``k`` merges key ``k`` with the
    interval ``(k,k+1)``.  Each merged item's leaf is then split by ``=k``.
    """
    n = instance.n
    if n == 0:
        return Tree(IntervalLeaf(0), 0), Fraction(0)
    weights = [instance.alpha[0]] + [instance.beta[k - 1] + instance.alpha[k] for k in range(1, n + 1)]
    _, items = successful_only_optimal_over_items(weights, equality=False)

    def lift(node: Node) -> Node:
        if isinstance(node, Internal):
            # item-key K answers yes for items 0..K-2, i.e. atoms below key K-1
            return less(node.key - 1, lift(node.yes), lift(node.no))
        j = node.key - 1
        if j == 0:
            return IntervalLeaf(0)
        return eq(j, KeyLeaf(j), IntervalLeaf(j))

    tree = Tree(lift(items.root), n)
    return tree, cost(tree, instance)


__all__ = [
    "Case",
    "CaseBindings",
    "ConversionTrace",
    "Execution",
    "ExpectedCost",
    "Step",
    "StepReport",
    "apply_replacement",
    "best_conversion",
    "check_step_contract",
    "classify",
    "exact_expected_cost",
    "executions",
    "merge_convert",
    "process",
    "replay",
]
