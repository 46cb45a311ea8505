"""Nodes of the full binary tree, represented as strings over "01".

The empty string is the root.  Prefix order is the tree order; the total
enumeration order is length-lex (shorter first, then lexicographic with
0 < 1), which matches the usual bijection with the naturals via binary
notation.
"""

from __future__ import annotations


def node_meet(a: str, b: str) -> str:
    """Longest common prefix."""
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return a[:i]


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def node_at_index(i: int) -> str:
    """i-th node in length-lex order (0 -> root)."""
    if i < 0:
        raise ValueError("index must be non-negative")
    return bin(i + 1)[3:]


def index_of_node(s: str) -> int:
    return int("1" + s, 2) - 1


def level_nodes(n: int) -> list[str]:
    """All nodes of length n, lexicographic."""
    if n == 0:
        return [""]
    return [format(j, f"0{n}b") for j in range(1 << n)]


def nodes_below(depth: int) -> list[str]:
    """All nodes of length < depth, length-lex order."""
    return [node_at_index(i) for i in range((1 << depth) - 1)]


def node_children(s: str) -> tuple[str, str]:
    return s + "0", s + "1"


def flip(bit: str) -> str:
    return "1" if bit == "0" else "0"
