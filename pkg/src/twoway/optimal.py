"""Exact optimal two-way comparison trees at desk scale.

The memoised solver works on query sets reachable from the full universe by
``=`` and ``<`` tests.  Such a set is a contiguous run of atoms with some keys
punched out (see :class:`QueryState`); internally it is a bitmask over atom
indices.  The state space is exponential in ``n``, which is fine up to
``n`` around 10.

``brute_force_optimal`` is an independent oracle: it enumerates every
non-redundant correct tree, prices each one by searching it, and keeps the
cheapest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    Atom,
    Comparison,
    Instance,
    Internal,
    IntervalLeaf,
    KeyLeaf,
    NilLeaf,
    Node,
    Op,
    Tree,
    TreeKind,
    all_atoms,
    answer,
    search,
)

MAX_N = 10
BRUTE_FORCE_MAX_N = 4


class SolverLimitError(ValueError):
    """Instance is too large for an exhaustive solver."""


@dataclass(frozen=True)
class QueryState:
    """Atoms with index in ``[lo, hi]`` except the keys in ``excluded``."""

    lo: int
    hi: int
    excluded: frozenset[int] = frozenset()

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"bad range [{self.lo}, {self.hi}]")
        for k in self.excluded:
            if not self.lo <= 2 * k - 1 <= self.hi:
                raise ValueError(f"excluded key {k} outside range")

    @classmethod
    def universe(cls, n: int) -> "QueryState":
        return cls(0, 2 * n)

    @classmethod
    def from_mask(cls, mask: int) -> "QueryState":
        if mask <= 0:
            raise ValueError("empty query set")
        lo = (mask & -mask).bit_length() - 1
        hi = mask.bit_length() - 1
        missing = [j for j in range(lo, hi + 1) if not mask >> j & 1]
        if any(j % 2 == 0 for j in missing):
            raise ValueError("mask is not a range minus keys")
        return cls(lo, hi, frozenset((j + 1) // 2 for j in missing))

    @property
    def mask(self) -> int:
        m = ((1 << (self.hi + 1)) - 1) ^ ((1 << self.lo) - 1)
        for k in self.excluded:
            m &= ~(1 << (2 * k - 1))
        return m

    def atoms(self) -> list[Atom]:
        skip = {2 * k - 1 for k in self.excluded}
        return [Atom(j) for j in range(self.lo, self.hi + 1) if j not in skip]

    def split(self, cmp: Comparison) -> tuple["QueryState | None", "QueryState | None"]:
        """Yes and no parts; ``None`` for an empty side."""
        yes = sum(1 << a.index for a in self.atoms() if answer(a, cmp))
        no = self.mask ^ yes
        return (
            QueryState.from_mask(yes) if yes else None,
            QueryState.from_mask(no) if no else None,
        )


def _scale(weights: Sequence[Fraction]) -> tuple[list[int], int]:
    denom = math.lcm(*(Fraction(w).denominator for w in weights)) if weights else 1
    return [int(Fraction(w) * denom) for w in weights], denom


def _comparisons(n: int, equality: bool) -> list[tuple[Comparison, int]]:
    """Candidate tests with the mask of atoms answering yes, in tie-break order."""
    out = []
    for k in range(1, n + 1):
        if equality:
            out.append((Comparison(Op.EQ, k), 1 << (2 * k - 1)))
        out.append((Comparison(Op.LESS, k), (1 << (2 * k - 1)) - 1))
    return out


def _leaf_for(mask: int, key_mask: int, kind: TreeKind) -> Node | None:
    keys = mask & key_mask
    if kind is TreeKind.LOC:
        if mask & (mask - 1):
            return None
        j = mask.bit_length() - 1
        return KeyLeaf((j + 1) // 2) if j % 2 else IntervalLeaf(j // 2)
    if kind is TreeKind.NIL:
        if not keys:
            return NilLeaf()
        if mask == keys and not keys & (keys - 1):
            return KeyLeaf(keys.bit_length() // 2)
        return None
    if keys and not keys & (keys - 1):
        return KeyLeaf(keys.bit_length() // 2)
    return None


def _solve(weights: Sequence[Fraction], n: int, kind: TreeKind, equality: bool = True):
    """Optimal (cost, root, states) for per-atom ``weights`` of length ``2n+1``."""
    ints, denom = _scale(weights)
    key_mask = sum(1 << (2 * k - 1) for k in range(1, n + 1))
    full = (1 << (2 * n + 1)) - 1
    if kind is TreeKind.SUCCESSFUL_ONLY:
        full = key_mask
        if not full:
            return Fraction(0), NilLeaf(), {}
    tests = _comparisons(n, equality)
    memo: dict[int, tuple[int, Comparison | None, int, int]] = {}

    def value(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        if _leaf_for(mask, key_mask, kind) is not None:
            memo[mask] = (0, None, 0, 0)
            return 0
        best = None
        for cmp, yes_bits in tests:
            yes = mask & yes_bits
            no = mask ^ yes
            if not yes or not no:
                continue
            v = value(yes) + value(no)
            if best is None or v < best[0]:
                best = (v, cmp, yes, no)
        if best is None:
            raise AssertionError(f"no admissible comparison for state {mask:b}")
        mass = sum(ints[j] for j in range(2 * n + 1) if mask >> j & 1)
        memo[mask] = (best[0] + mass, best[1], best[2], best[3])
        return memo[mask][0]

    def build(mask: int) -> Node:
        _, cmp, yes, no = memo[mask]
        if cmp is None:
            return _leaf_for(mask, key_mask, kind)
        return Internal(cmp, build(yes), build(no))

    total = value(full)
    return Fraction(total, denom), build(full), memo


def _weights(instance: Instance, kind: TreeKind) -> list[Fraction]:
    w = instance.atom_probs()
    if kind is TreeKind.SUCCESSFUL_ONLY:
        w = [p if j % 2 else Fraction(0) for j, p in enumerate(w)]
    return w


def optimal(instance: Instance, kind: TreeKind, max_n: int = MAX_N) -> tuple[Fraction, Tree]:
    """Minimum-cost correct, non-redundant tree of the given kind.

    Ties go to the smallest comparison key, ``=`` before ``<``.  For
    ``SUCCESSFUL_ONLY`` only key atoms are routed and priced.
    """
    if instance.n > max_n:
        raise SolverLimitError(f"n={instance.n} exceeds solver limit {max_n}")
    value, root, _ = _solve(_weights(instance, kind), instance.n, kind)
    if instance.n == 0 and kind is TreeKind.LOC:
        root = IntervalLeaf(0)
    return value, Tree(root, instance.n)


def reachable_states(instance: Instance, kind: TreeKind) -> list[int]:
    """Atom masks visited by the memoised solver."""
    if instance.n > MAX_N:
        raise SolverLimitError(f"n={instance.n} exceeds solver limit {MAX_N}")
    return list(_solve(_weights(instance, kind), instance.n, kind)[2])


# --------------------------------------------------------------------------
# Brute force
# --------------------------------------------------------------------------

def _is_leaf_set(atoms: frozenset[Atom], kind: TreeKind) -> Node | None:
    keys = [a for a in atoms if a.is_key]
    if kind is TreeKind.LOC:
        if len(atoms) != 1:
            return None
        (a,) = atoms
        return KeyLeaf(a.value) if a.is_key else IntervalLeaf(a.value)
    if kind is TreeKind.NIL:
        if not keys:
            return NilLeaf()
        if len(atoms) == 1:
            return KeyLeaf(keys[0].value)
        return None
    if len(keys) == 1:
        return KeyLeaf(keys[0].value)
    return None


def all_trees(atoms: frozenset[Atom], n: int, kind: TreeKind, equality: bool = True) -> Iterator[Node]:
    """Every non-redundant tree that correctly resolves ``atoms``.

    A set that may be a leaf is always a leaf; otherwise every comparison that
    sends atoms both ways is tried at the root.
    """
    leaf = _is_leaf_set(atoms, kind)
    if leaf is not None:
        yield leaf
        return
    ops = (Op.EQ, Op.LESS) if equality else (Op.LESS,)
    for k in range(1, n + 1):
        for op in ops:
            cmp = Comparison(op, k)
            yes = frozenset(a for a in atoms if answer(a, cmp))
            no = atoms - yes
            if not yes or not no:
                continue
            no_trees = list(all_trees(no, n, kind, equality))
            for y in all_trees(yes, n, kind, equality):
                for t in no_trees:
                    yield Internal(cmp, y, t)


def _routed(n: int, kind: TreeKind) -> frozenset[Atom]:
    atoms = all_atoms(n)
    if kind is TreeKind.SUCCESSFUL_ONLY:
        atoms = [a for a in atoms if a.is_key]
    return frozenset(atoms)


def brute_force_optimal(instance: Instance, kind: TreeKind) -> tuple[Fraction, Tree]:
    if instance.n > BRUTE_FORCE_MAX_N:
        raise SolverLimitError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}")
    if instance.n == 0:
        leaf = IntervalLeaf(0) if kind is TreeKind.LOC else NilLeaf()
        return Fraction(0), Tree(leaf, 0)
    priced = _weights(instance, kind)
    routed = sorted(_routed(instance.n, kind))
    best = None
    for root in all_trees(frozenset(routed), instance.n, kind):
        t = Tree(root, instance.n)
        c = sum((priced[a.index] * search(t, a).depth for a in routed), Fraction(0))
        if best is None or c < best[0]:
            best = (c, t)
    return best


# --------------------------------------------------------------------------
# Item trees (successful-only trees over an arbitrary weighted sequence)
# --------------------------------------------------------------------------

def successful_only_optimal_over_items(
    weights: Sequence, equality: bool = True
) -> tuple[Fraction, Tree]:
    """Optimal successful-only tree over items ``0..m-1`` with the given weights.

    Item ``j`` is key ``j + 1`` of the returned tree.  With ``equality=False``
    only ``<`` tests are used, i.e. the result is an optimal alphabetic tree.
    """
    if not weights:
        raise ValueError("need at least one item")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    m = len(weights)
    if m > 2 * MAX_N:
        raise SolverLimitError(f"{m} items exceeds item limit {2 * MAX_N}")
    per_atom = [Fraction(0)] * (2 * m + 1)
    for j, w in enumerate(weights):
        per_atom[2 * j + 1] = w
    value, root, _ = _solve(per_atom, m, TreeKind.SUCCESSFUL_ONLY, equality)
    return value, Tree(root, m)


def brute_force_items(weights: Sequence, equality: bool = True) -> Fraction:
    """Oracle for :func:`successful_only_optimal_over_items` (cost only)."""
    weights = [Fraction(w) for w in weights]
    m = len(weights)
    if m > BRUTE_FORCE_MAX_N + 1:
        raise SolverLimitError("too many items for brute force")
    atoms = frozenset(Atom.key(k) for k in range(1, m + 1))
    best = None
    for root in all_trees(atoms, m, TreeKind.SUCCESSFUL_ONLY, equality):
        t = Tree(root, m)
        c = sum((w * search(t, Atom.key(j + 1)).depth for j, w in enumerate(weights)), Fraction(0))
        if best is None or c < best:
            best = c
    return best
