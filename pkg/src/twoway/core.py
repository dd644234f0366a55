"""Instances, atoms and two-way comparison trees.

Queries are never real numbers here.  Every search outcome depends only on
which of the 2n+1 *atoms* the query falls in (a key ``k`` or an open
interval ``(i, i+1)``), so atoms are the whole query universe.  Atoms are
ordered by an integer index: ``Interval(i) -> 2i`` and ``Key(k) -> 2k-1``.

Nodes are addressed by *paths*: strings over ``"Y"``/``"N"`` read from the
root, the empty string being the root itself.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union


class TreeError(ValueError):
    """A tree or path is malformed for the requested operation."""


# --------------------------------------------------------------------------
# Instances and atoms
# --------------------------------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError(f"probabilities must be exact, got float {x!r}")
    return Fraction(x)


@dataclass(frozen=True)
class Instance:
    """Keys ``1..n`` with key probabilities ``beta`` and gap probabilities ``alpha``.

    ``beta[k-1]`` is the probability of querying key ``k`` and ``alpha[i]``
    the probability of a query in ``(i, i+1)``.  Everything is exact.
    """

    n: int
    beta: tuple[Fraction, ...]
    alpha: tuple[Fraction, ...]

    def __post_init__(self):
        beta = tuple(_frac(b) for b in self.beta)
        alpha = tuple(_frac(a) for a in self.alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if len(beta) != self.n or len(alpha) != self.n + 1:
            raise ValueError(
                f"expected {self.n} betas and {self.n + 1} alphas, "
                f"got {len(beta)} and {len(alpha)}"
            )
        if any(p < 0 for p in beta + alpha):
            raise ValueError("probabilities must be non-negative")
        if sum(beta) + sum(alpha) != 1:
            raise ValueError(f"probabilities sum to {sum(beta) + sum(alpha)}, not 1")

    @classmethod
    def from_weights(cls, beta: Sequence, alpha: Sequence) -> "Instance":
        """Normalise non-negative weights (not all zero) into an instance."""
        beta = [Fraction(b) for b in beta]
        alpha = [Fraction(a) for a in alpha]
        total = sum(beta) + sum(alpha)
        if total <= 0:
            raise ValueError("weights must have positive total")
        return cls(len(beta), tuple(b / total for b in beta), tuple(a / total for a in alpha))

    @property
    def size(self) -> int:
        """Number of atoms, ``2n + 1``."""
        return 2 * self.n + 1

    def atoms(self) -> list["Atom"]:
        return all_atoms(self.n)

    def prob(self, atom: "Atom") -> Fraction:
        if atom.is_key:
            return self.beta[atom.value - 1]
        return self.alpha[atom.value]

    def atom_probs(self) -> list[Fraction]:
        """Probabilities indexed by atom order-index."""
        out = []
        for i in range(self.n):
            out.append(self.alpha[i])
            out.append(self.beta[i])
        out.append(self.alpha[self.n])
        return out


@dataclass(frozen=True, order=True)
class Atom:
    """One query outcome; ordered by its order-index."""

    index: int

    @classmethod
    def key(cls, k: int) -> "Atom":
        return cls(2 * k - 1)

    @classmethod
    def interval(cls, i: int) -> "Atom":
        return cls(2 * i)

    @property
    def is_key(self) -> bool:
        return self.index % 2 == 1

    @property
    def value(self) -> int:
        """The key ``k`` or the interval's left end ``i``."""
        return (self.index + 1) // 2 if self.is_key else self.index // 2

    def __repr__(self):
        if self.is_key:
            return f"Key({self.value})"
        return f"Interval({self.value})"

    def __str__(self):
        if self.is_key:
            return f"{{{self.value}}}"
        return f"({self.value},{self.value + 1})"


def Key(k: int) -> Atom:
    return Atom.key(k)


def Interval(i: int) -> Atom:
    return Atom.interval(i)


def all_atoms(n: int) -> list[Atom]:
    return [Atom(j) for j in range(2 * n + 1)]


# --------------------------------------------------------------------------
# Trees
# --------------------------------------------------------------------------

class Op(enum.Enum):
    EQ = "eq"
    LESS = "less"


@dataclass(frozen=True)
class Comparison:
    op: Op
    key: int

    def __str__(self):
        return f"{'=' if self.op is Op.EQ else '<'}{self.key}"


@dataclass(frozen=True)
class KeyLeaf:
    key: int

    def __str__(self):
        return str(self.key)


@dataclass(frozen=True)
class IntervalLeaf:
    i: int

    def __str__(self):
        return f"({self.i},{self.i + 1})"


@dataclass(frozen=True)
class NilLeaf:
    def __str__(self):
        return "⊥"


Leaf = Union[KeyLeaf, IntervalLeaf, NilLeaf]


@dataclass(frozen=True)
class Internal:
    cmp: Comparison
    yes: "Node"
    no: "Node"

    @property
    def op(self) -> Op:
        return self.cmp.op

    @property
    def key(self) -> int:
        return self.cmp.key

    def __str__(self):
        return f"{self.cmp}({self.yes}, {self.no})"


Node = Union[Internal, KeyLeaf, IntervalLeaf, NilLeaf]


def eq(k: int, yes: Node, no: Node) -> Internal:
    return Internal(Comparison(Op.EQ, k), yes, no)


def less(k: int, yes: Node, no: Node) -> Internal:
    return Internal(Comparison(Op.LESS, k), yes, no)


def is_leaf(node: Node) -> bool:
    return not isinstance(node, Internal)


class TreeKind(enum.Enum):
    LOC = "loc"
    NIL = "nil"
    SUCCESSFUL_ONLY = "succ"


@dataclass(frozen=True)
class Tree:
    """An immutable comparison tree over keys ``1..n``."""

    root: Node
    n: int

    def __str__(self):
        return str(self.root)

    def node(self, path: str) -> Node:
        return node_at(self.root, path)

    def replace(self, path: str, subtree: Node) -> "Tree":
        return Tree(replace_at(self.root, path, subtree), self.n)

    def nodes(self) -> Iterator[tuple[str, Node]]:
        """All ``(path, node)`` pairs in pre-order, yes before no."""
        stack = [("", self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            if isinstance(node, Internal):
                stack.append((path + "N", node.no))
                stack.append((path + "Y", node.yes))

    def leaves(self) -> list[tuple[str, Leaf]]:
        return [(p, v) for p, v in self.nodes() if is_leaf(v)]

    def internal_count(self) -> int:
        return sum(1 for _, v in self.nodes() if isinstance(v, Internal))


def node_at(root: Node, path: str) -> Node:
    node = root
    for step in path:
        if not isinstance(node, Internal):
            raise TreeError(f"path {path!r} runs past a leaf")
        if step == "Y":
            node = node.yes
        elif step == "N":
            node = node.no
        else:
            raise TreeError(f"bad path character {step!r}")
    return node


def replace_at(root: Node, path: str, subtree: Node) -> Node:
    if not path:
        return subtree
    if not isinstance(root, Internal):
        raise TreeError(f"path {path!r} runs past a leaf")
    if path[0] == "Y":
        return Internal(root.cmp, replace_at(root.yes, path[1:], subtree), root.no)
    if path[0] == "N":
        return Internal(root.cmp, root.yes, replace_at(root.no, path[1:], subtree))
    raise TreeError(f"bad path character {path[0]!r}")


# --------------------------------------------------------------------------
# Searching
# --------------------------------------------------------------------------

def answer(atom: Atom, cmp: Comparison) -> bool:
    """Outcome of comparison ``cmp`` for any query in ``atom``."""
    pivot = 2 * cmp.key - 1
    if cmp.op is Op.EQ:
        return atom.index == pivot
    return atom.index < pivot


@dataclass(frozen=True)
class SearchResult:
    leaf: Leaf
    depth: int
    path: str
    nodes: tuple[Node, ...] = field(repr=False)


def search(tree: Tree, atom: Atom) -> SearchResult:
    node = tree.root
    path = []
    visited = [node]
    while isinstance(node, Internal):
        if answer(atom, node.cmp):
            path.append("Y")
            node = node.yes
        else:
            path.append("N")
            node = node.no
        visited.append(node)
    return SearchResult(node, len(path), "".join(path), tuple(visited))


def depths(tree: Tree) -> list[int]:
    """Query depth of every atom, by order-index."""
    return [search(tree, a).depth for a in all_atoms(tree.n)]


def cost(tree: Tree, instance: Instance) -> Fraction:
    """Expected number of comparisons for a random query."""
    if tree.n != instance.n:
        raise ValueError(f"tree has n={tree.n}, instance has n={instance.n}")
    return sum(
        (p * d for p, d in zip(instance.atom_probs(), depths(tree)) if p),
        Fraction(0),
    )


def route(tree: Tree, atoms: Iterable[Atom] | None = None) -> dict[str, frozenset[Atom]]:
    """Query set of every node, keyed by path (empty sets included)."""
    if atoms is None:
        atoms = all_atoms(tree.n)
    out: dict[str, frozenset[Atom]] = {}
    stack = [("", tree.root, frozenset(atoms))]
    while stack:
        path, node, qs = stack.pop()
        out[path] = qs
        if isinstance(node, Internal):
            yes = frozenset(a for a in qs if answer(a, node.cmp))
            stack.append((path + "Y", node.yes, yes))
            stack.append((path + "N", node.no, qs - yes))
    return out


def query_set(tree: Tree, path: str) -> frozenset[Atom]:
    """Atoms whose search passes through the node at ``path``."""
    tree.node(path)  # raises TreeError when the path is not in the tree
    qs = frozenset(all_atoms(tree.n))
    node = tree.root
    for step in path:
        yes = frozenset(a for a in qs if answer(a, node.cmp))
        if step == "Y":
            qs, node = yes, node.yes
        else:
            qs, node = qs - yes, node.no
    return qs


def leaf_weight_cost(tree: Tree, instance: Instance) -> Fraction:
    """Cost as the sum of leaf weight times leaf depth.

    Only meaningful for non-redundant trees.  A ``NilLeaf`` weighs the total
    gap probability of the intervals it absorbs.
    """
    sets = route(tree)
    total = Fraction(0)
    for path, leaf in tree.leaves():
        if isinstance(leaf, KeyLeaf):
            w = instance.beta[leaf.key - 1]
        elif isinstance(leaf, IntervalLeaf):
            w = instance.alpha[leaf.i]
        else:
            w = sum((instance.alpha[a.value] for a in sets[path] if not a.is_key), Fraction(0))
        total += w * len(path)
    return total


# --------------------------------------------------------------------------
# Validation and pruning
# --------------------------------------------------------------------------

def _compatible(atom: Atom, leaf: Leaf, kind: TreeKind) -> bool:
    if atom.is_key:
        return isinstance(leaf, KeyLeaf) and leaf.key == atom.value
    if isinstance(leaf, IntervalLeaf):
        return leaf.i == atom.value
    return kind is TreeKind.NIL and isinstance(leaf, NilLeaf)


@dataclass
class ValidationReport:
    correct: bool
    redundant_nodes: list[str]
    violations: list[str]

    def __bool__(self):
        return self.correct


def validate(tree: Tree, instance: Instance, kind: TreeKind) -> ValidationReport:
    violations = []
    if tree.n != instance.n:
        violations.append(f"tree has n={tree.n}, instance has n={instance.n}")
        return ValidationReport(False, [], violations)
    for path, node in tree.nodes():
        if isinstance(node, Internal) and not 1 <= node.key <= tree.n:
            violations.append(f"node {path or 'root'} compares to non-key {node.key}")
        elif isinstance(node, KeyLeaf) and not 1 <= node.key <= tree.n:
            violations.append(f"leaf {path or 'root'} names non-key {node.key}")
        elif isinstance(node, IntervalLeaf) and not 0 <= node.i <= tree.n:
            violations.append(f"leaf {path or 'root'} names non-interval {node.i}")
        elif kind is TreeKind.LOC and isinstance(node, NilLeaf):
            violations.append(f"nil leaf {path or 'root'} in a loc tree")
    if violations:
        return ValidationReport(False, [], violations)

    routed = [a for a in all_atoms(tree.n) if a.is_key or kind is not TreeKind.SUCCESSFUL_ONLY]
    for atom in routed:
        res = search(tree, atom)
        if not _compatible(atom, res.leaf, kind):
            violations.append(f"{atom} ends at leaf {res.leaf} ({res.path or 'root'})")

    sets = route(tree, routed)
    redundant = sorted((p for p, qs in sets.items() if not qs), key=lambda p: (len(p), p))

    if kind is TreeKind.LOC and not violations:
        labels = [leaf for _, leaf in prune_redundant(tree, routed).leaves()]
        if len(labels) != tree.n * 2 + 1 or len(set(labels)) != len(labels):
            violations.append(f"pruned loc tree has {len(labels)} leaves, expected {2 * tree.n + 1}")
    return ValidationReport(not violations, redundant, violations)


def prune_redundant(tree: Tree, atoms: Iterable[Atom] | None = None) -> Tree:
    """Splice out every node whose query set is empty.

    A redundant child is removed together with its parent, which is replaced
    by the sibling subtree.  No query gets deeper.
    """
    if atoms is None:
        atoms = all_atoms(tree.n)

    def prune(node: Node, qs: frozenset[Atom]) -> Node:
        if not isinstance(node, Internal):
            return node
        yes = frozenset(a for a in qs if answer(a, node.cmp))
        no = qs - yes
        if not yes:
            return prune(node.no, no)
        if not no:
            return prune(node.yes, yes)
        return Internal(node.cmp, prune(node.yes, yes), prune(node.no, no))

    qs = frozenset(atoms)
    if not qs:
        return tree
    return Tree(prune(tree.root, qs), tree.n)


def nil_to_loc(tree: Tree) -> Tree:
    """Relabel every ``NilLeaf`` with the single interval it receives.

    Requires a non-redundant tree whose nil leaves have no breaks.
    """
    sets = route(tree)
    out = tree
    for path, leaf in tree.leaves():
        if isinstance(leaf, NilLeaf):
            qs = sets[path]
            if len(qs) != 1 or next(iter(qs)).is_key:
                raise TreeError(f"nil leaf {path or 'root'} receives {sorted(qs)}")
            out = out.replace(path, IntervalLeaf(next(iter(qs)).value))
    return out


def loc_to_nil(tree: Tree) -> Tree:
    """Forget interval labels: every ``IntervalLeaf`` becomes a ``NilLeaf``."""

    def strip(node: Node) -> Node:
        if isinstance(node, Internal):
            return Internal(node.cmp, strip(node.yes), strip(node.no))
        if isinstance(node, IntervalLeaf):
            return NilLeaf()
        return node

    return Tree(strip(tree.root), tree.n)


# --------------------------------------------------------------------------
# Breaks
# --------------------------------------------------------------------------

def eq_paths(tree: Tree, k: int) -> list[str]:
    return [p for p, v in tree.nodes() if isinstance(v, Internal) and v.cmp == Comparison(Op.EQ, k)]


def break_leaf_path(tree: Tree, k: int, start: str | None = None) -> str:
    """Path of the leaf reached by searching for exactly ``k`` below ``=k``.

    The search starts at the no-child of the ``=k`` node at ``start`` (by
    default the unique such node) and must end at a nil leaf.
    """
    if start is None:
        found = eq_paths(tree, k)
        if not found:
            raise TreeError(f"no =={k} node in tree")
        if len(found) > 1:
            raise TreeError(f"{len(found)} equality nodes for key {k}")
        start = found[0]
    path = start + "N"
    node = tree.node(path)
    probe = Atom.key(k)
    while isinstance(node, Internal):
        if node.op is Op.EQ:
            if node.key == k:
                raise TreeError(f"second =={k} on the search path at {path}")
            path += "N"
            node = node.no
        elif answer(probe, node.cmp):
            path += "Y"
            node = node.yes
        else:
            path += "N"
            node = node.no
    if not isinstance(node, NilLeaf):
        raise TreeError(f"search for {k} below =={k} ends at non-nil leaf {node}")
    return path


def find_break_leaf(tree: Tree, k: int) -> Node:
    return tree.node(break_leaf_path(tree, k))


def _check_key(tree: Tree, k: int) -> None:
    if not 1 <= k <= tree.n:
        raise ValueError(f"{k} is not a key of a tree over 1..{tree.n}")


def separates(atoms: Iterable[Atom], k: int) -> bool:
    pivot = 2 * k - 1
    idx = [a.index for a in atoms]
    return any(i < pivot for i in idx) and any(i > pivot for i in idx)


def has_break(tree: Tree, leaf_path: str, k: int) -> bool:
    """Whether key ``k`` separates the query set of the leaf at ``leaf_path``."""
    _check_key(tree, k)
    if not is_leaf(tree.node(leaf_path)):
        raise TreeError(f"{leaf_path or 'root'} is not a leaf")
    return separates(query_set(tree, leaf_path), k)


def leaves_with_break(tree: Tree, k: int) -> list[str]:
    _check_key(tree, k)
    sets = route(tree)
    return [p for p, _ in tree.leaves() if separates(sets[p], k)]
