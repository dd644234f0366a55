"""JSON encodings of instances and trees.

Rationals travel as strings (``"1/5"``, ``"0"``).  Dumps are canonical:
fixed field order, lowest terms, one line plus a trailing newline, so a
load/dump round trip is byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction

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
)


class FormatError(ValueError):
    pass


def rational_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"rational must be a string or integer, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False) + "\n"


def instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "beta": [rational_to_str(b) for b in inst.beta],
        "alpha": [rational_to_str(a) for a in inst.alpha],
    }


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise FormatError("instance must be a JSON object")
    try:
        n = data["n"]
        beta = [parse_rational(b) for b in data["beta"]]
        alpha = [parse_rational(a) for a in data["alpha"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"instance is missing fields: {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool):
        raise FormatError("n must be an integer")
    try:
        return Instance(n, tuple(beta), tuple(alpha))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dumps_instance(inst: Instance) -> str:
    return _dump(instance_to_dict(inst))


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(data)


def node_to_dict(node: Node) -> dict:
    if isinstance(node, Internal):
        return {
            "op": node.op.value,
            "key": node.key,
            "yes": node_to_dict(node.yes),
            "no": node_to_dict(node.no),
        }
    if isinstance(node, KeyLeaf):
        return {"leaf": "key", "key": node.key}
    if isinstance(node, IntervalLeaf):
        return {"leaf": "interval", "i": node.i}
    return {"leaf": "nil"}


def _int(data, name):
    v = data.get(name)
    if not isinstance(v, int) or isinstance(v, bool):
        raise FormatError(f"field {name!r} must be an integer, got {v!r}")
    return v


def node_from_dict(data) -> Node:
    if not isinstance(data, dict):
        raise FormatError(f"tree node must be an object, got {data!r}")
    if "leaf" in data:
        kind = data["leaf"]
        if kind == "key":
            return KeyLeaf(_int(data, "key"))
        if kind == "interval":
            return IntervalLeaf(_int(data, "i"))
        if kind == "nil":
            return NilLeaf()
        raise FormatError(f"unknown leaf kind {kind!r}")
    try:
        op = Op(data.get("op"))
    except ValueError as exc:
        raise FormatError(f"unknown comparison {data.get('op')!r}") from exc
    if "yes" not in data or "no" not in data:
        raise FormatError("internal node needs both 'yes' and 'no'")
    return Internal(
        Comparison(op, _int(data, "key")),
        node_from_dict(data["yes"]),
        node_from_dict(data["no"]),
    )


def _infer_n(node: Node) -> int:
    if isinstance(node, Internal):
        return max(node.key, _infer_n(node.yes), _infer_n(node.no))
    if isinstance(node, KeyLeaf):
        return node.key
    if isinstance(node, IntervalLeaf):
        return node.i
    return 0


def tree_from_dict(data, n: int | None = None) -> Tree:
    """Decode a tree; ``n`` defaults to the largest key or interval mentioned."""
    root = node_from_dict(data)
    return Tree(root, _infer_n(root) if n is None else n)


def dumps_tree(tree: Tree) -> str:
    return _dump(node_to_dict(tree.root))


def loads_tree(text: str, n: int | None = None) -> Tree:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return tree_from_dict(data, n)
