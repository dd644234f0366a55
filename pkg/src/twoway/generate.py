"""Instance and tree generators used by the CLI, tests and experiments."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import (
    Atom,
    Comparison,
    Instance,
    Internal,
    KeyLeaf,
    NilLeaf,
    Node,
    Op,
    Tree,
    all_atoms,
    answer,
    eq,
    less,
    IntervalLeaf,
)


def random_instance(n: int, seed: int) -> Instance:
    """Integer weights drawn uniformly from 1..100 per atom, normalised."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    w = [rng.randint(1, 100) for _ in range(2 * n + 1)]
    return Instance.from_weights(w[1::2], w[0::2])


def two_key_instance() -> Instance:
    """Two keys; every key and gap has probability 1/5."""
    fifth = Fraction(1, 5)
    return Instance(2, (fifth,) * 2, (fifth,) * 3)


def two_key_nil_tree() -> Tree:
    return Tree(eq(1, KeyLeaf(1), eq(2, KeyLeaf(2), NilLeaf())), 2)


def two_key_loc_tree() -> Tree:
    return Tree(
        less(
            2,
            eq(1, KeyLeaf(1), less(1, IntervalLeaf(0), IntervalLeaf(1))),
            eq(2, KeyLeaf(2), IntervalLeaf(2)),
        ),
        2,
    )


def tightness_instance(eps) -> Instance:
    """One key of probability ``eps``; gaps ``eps`` and ``1 - 2 eps``."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    return Instance(1, (eps,), (eps, 1 - 2 * eps))


def random_nil_tree(n: int, seed: int, stop: float = 0.6) -> Tree:
    """A random correct, non-redundant nil tree over keys ``1..n``.

    Every split is a comparison that sends atoms both ways.  Key-free sets
    become ``⊥`` leaves with probability ``stop`` and are split further
    otherwise, so trees with spare ``<`` tests also occur.
    """
    rng = random.Random(seed)

    def grow(atoms: frozenset[Atom]) -> Node:
        keys = [a for a in atoms if a.is_key]
        if len(atoms) == 1 and keys:
            return KeyLeaf(keys[0].value)
        if not keys and (len(atoms) == 1 or rng.random() < stop):
            return NilLeaf()
        options = []
        for k in range(1, n + 1):
            for op in (Op.EQ, Op.LESS):
                cmp = Comparison(op, k)
                yes = frozenset(a for a in atoms if answer(a, cmp))
                if yes and yes != atoms:
                    options.append((cmp, yes))
        cmp, yes = rng.choice(options)
        return Internal(cmp, grow(yes), grow(atoms - yes))

    return Tree(grow(frozenset(all_atoms(n))), n)
