"""Entropy lower bounds on expected search cost.

Logarithms are irrational, so everything here is floating point.  Compare
against exact costs with a small tolerance on the entropy side.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .core import Instance


def _check_distribution(probs: Sequence) -> None:
    if any(p < 0 for p in probs):
        raise ValueError("probabilities must be non-negative")
    if all(isinstance(p, Rational) for p in probs):
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
    elif abs(math.fsum(float(p) for p in probs) - 1.0) > 1e-9:
        raise ValueError("probabilities do not sum to 1")


def _plogp(p) -> float:
    if p == 0:
        return 0.0
    if isinstance(p, Fraction):
        # log of numerator and denominator separately keeps tiny p accurate
        return float(p) * (math.log2(p.denominator) - math.log2(p.numerator))
    return float(p) * -math.log2(p)


def shannon_entropy(probs: Sequence) -> float:
    """``sum p log2(1/p)`` in bits, with ``0 log 0 = 0``."""
    probs = list(probs)
    _check_distribution(probs)
    return math.fsum(_plogp(p) for p in probs)


def loc_entropy(instance: Instance) -> float:
    """Entropy of the distribution over all ``2n+1`` atoms."""
    return shannon_entropy(instance.atom_probs())


def nil_direct_bound(instance: Instance) -> float:
    """Entropy of the answers a nil tree gives: the keys plus a single ``⊥``."""
    return shannon_entropy([sum(instance.alpha)] + list(instance.beta))


def loc_bound_minus_one(instance: Instance) -> float:
    """Lower bound on any nil tree's cost via the loc entropy; may be negative."""
    return loc_entropy(instance) - 1.0


def bound_difference(instance: Instance) -> float:
    """``A * H(alpha / A) - 1`` where ``A`` is the total gap probability."""
    A = sum(instance.alpha)
    if A == 0:
        return -1.0
    return float(A) * shannon_entropy([a / A for a in instance.alpha]) - 1.0


def extreme_instance(n: int) -> Instance:
    """Keys at ``1/n^2`` each, the remaining mass spread evenly over the gaps."""
    if n < 2:
        raise ValueError("extreme instance needs n >= 2")
    beta = Fraction(1, n * n)
    alpha = Fraction(1, n + 1) * (1 - Fraction(1, n))
    return Instance(n, (beta,) * n, (alpha,) * (n + 1))
