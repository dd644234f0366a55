"""Graphviz DOT rendering of comparison trees."""

from __future__ import annotations

from .core import Internal, IntervalLeaf, KeyLeaf, Tree


def _label(node) -> str:
    if isinstance(node, Internal):
        return str(node.cmp)
    if isinstance(node, KeyLeaf):
        return str(node.key)
    if isinstance(node, IntervalLeaf):
        return f"({node.i},{node.i + 1})"
    return "⊥"


def to_dot(tree: Tree, name: str = "tree") -> str:
    """One digraph; node ids follow pre-order, each yes-edge before its no-edge."""
    ids = {path: f"n{j}" for j, (path, _) in enumerate(tree.nodes())}
    lines = [f"digraph {name} {{", '  node [fontname="Helvetica"];']
    edges = []
    for path, node in tree.nodes():
        shape = "ellipse" if isinstance(node, Internal) else "box"
        lines.append(f'  {ids[path]} [label="{_label(node)}", shape={shape}];')
        if isinstance(node, Internal):
            edges.append(f'  {ids[path]} -> {ids[path + "Y"]} [label="yes"];')
            edges.append(f'  {ids[path]} -> {ids[path + "N"]} [label="no"];')
    return "\n".join(lines + edges + ["}"]) + "\n"
