"""Branch coding: an injective continuous map from streams to bit sequences.

The code of a stream is the concatenation, over nodes in length-lex order,
of a prefix-free code of each value's canonical integer code.  Injectivity
and continuity are structural: prefix-free codes concatenate unambiguously
and every per-node code emits at least one bit, so bit t depends only on
values at node indices <= t.
"""

from __future__ import annotations

from .hf import ack_code
from .nodes import node_at_index


class BranchDepthError(Exception):
    """Not enough evaluable nodes to produce the requested bits."""


def prefix_code(n: int) -> str:
    """Self-delimiting code of n: L-1 zeros then the L bits of n+1."""
    if n < 0:
        raise ValueError("prefix_code is defined on naturals")
    s = bin(n + 1)[2:]
    return "0" * (len(s) - 1) + s


def branch_bits_fn(eval_fn, t: int, max_index=None, counter=None) -> str:
    """First t branch bits of the stream given by eval_fn(node).

    counter, when given, collects the node indices actually queried.
    Raises BranchDepthError if max_index nodes do not yield t bits, and
    propagates CodeBudgetError from oversized value codes.
    """
    bits = []
    total = 0
    i = 0
    while total < t:
        if max_index is not None and i >= max_index:
            raise BranchDepthError(f"{t} bits need more than {max_index} nodes")
        if counter is not None:
            counter.append(i)
        chunk = prefix_code(ack_code(eval_fn(node_at_index(i))))
        bits.append(chunk)
        total += len(chunk)
        i += 1
    return "".join(bits)[:t]


def branch_bits(f, t: int, counter=None) -> str:
    """First t bits of the branch code of stream f (cached on f)."""
    if counter is not None:
        return branch_bits_fn(f.eval, t, counter=counter)
    bits, next_index = f.branch_cache
    while len(bits) < t:
        bits += prefix_code(ack_code(f.eval(node_at_index(next_index))))
        next_index += 1
        f.branch_cache = (bits, next_index)
    return bits[:t]


def branch_node(f, n: int) -> str:
    """The length-n prefix of f's branch, read as a node."""
    return branch_bits(f, n)


def branch_split(a, b, max_bits: int = 512):
    """Length of the common prefix of two branch codes.

    Returns None when the codes agree for max_bits bits (undetermined at
    this depth).
    """
    step = 32
    probe = step
    while probe <= max_bits:
        xa = branch_bits(a, probe)
        xb = branch_bits(b, probe)
        for i in range(probe):
            if xa[i] != xb[i]:
                return i
        probe += step
    return None
