"""Canonical hereditarily finite sets.

Every value manipulated by the engine lives in the space of hereditarily
finite sets.  Sets are hash-consed: structurally equal sets are the same
Python object, so equality is identity and extensionality holds by
construction.  The canonical integer code of a set is

    code({}) = 0,   code(x) = sum(2**code(y) for y in x)

which is a bijection onto the naturals.  Children are stored in ascending
code order; the induced total order doubles as the tie-breaking order on
witnesses throughout the engine.

Codes explode quickly (the exponent tower grows with rank), so they are
only materialized on demand and the computation is guarded by a budget on
the bit length of any intermediate code.  The budget is read from the
MEDFORGE_BIGINT_BUDGET environment variable at import time and can be
changed with set_bigint_budget().
"""

from __future__ import annotations

import os
from functools import cmp_to_key


class CodeBudgetError(Exception):
    """A canonical code would exceed the configured big-integer budget."""


class NotAPairError(ValueError):
    """kunpair applied to a set that is not a Kuratowski pair."""


class NotAStringCodeError(ValueError):
    """decode_string applied to a set outside the image of encode_string."""


class HfParseError(ValueError):
    """Malformed set literal; carries 1-based line and column."""

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_DEFAULT_BUDGET = 1 << 16
_budget_bits = int(os.environ.get("MEDFORGE_BIGINT_BUDGET", _DEFAULT_BUDGET))

_POOL: dict[tuple, "HfSet"] = {}


class HfSet:
    """Interned hereditarily finite set.

    Do not call the constructor directly; build values through hf_make so
    children are deduplicated and canonically ordered.  Equality is object
    identity (sound because of interning); the comparison operators follow
    canonical code order.
    """

    __slots__ = ("children", "child_set", "_code")

    def __new__(cls, children):
        cached = _POOL.get(children)
        if cached is not None:
            return cached
        obj = super().__new__(cls)
        obj.children = children
        obj.child_set = frozenset(children)
        obj._code = None
        _POOL[children] = obj
        return obj

    def __len__(self):
        return len(self.children)

    def __iter__(self):
        return iter(self.children)

    def __contains__(self, item):
        return item in self.child_set

    def issubset(self, other):
        return self.child_set <= other.child_set

    def __lt__(self, other):
        return hf_cmp(self, other) < 0

    def __le__(self, other):
        return hf_cmp(self, other) <= 0

    def __gt__(self, other):
        return hf_cmp(self, other) > 0

    def __ge__(self, other):
        return hf_cmp(self, other) >= 0

    def __repr__(self):
        return hf_print(self)


EMPTY = HfSet(())

_CMP_CACHE: dict[tuple[int, int], int] = {}


def hf_cmp(a, b):
    """Total order on HF sets matching numeric order of canonical codes.

    Computed structurally (codes are never materialized): compare children
    from largest down; on a tie of the compared tail, the set with extra
    (smaller) children is the larger one.
    """
    if a is b:
        return 0
    key = (id(a), id(b))
    hit = _CMP_CACHE.get(key)
    if hit is not None:
        return hit
    ca, cb = a.children, b.children
    i, j = len(ca) - 1, len(cb) - 1
    result = 0
    while i >= 0 and j >= 0:
        x, y = ca[i], cb[j]
        if x is not y:
            result = hf_cmp(x, y)
            break
        i -= 1
        j -= 1
    else:
        result = 1 if i >= 0 else (-1 if j >= 0 else 0)
    _CMP_CACHE[key] = result
    _CMP_CACHE[(id(b), id(a))] = -result
    return result


_HF_SORT_KEY = cmp_to_key(hf_cmp)


def hf_make(items) -> HfSet:
    """Canonical set with the given members; duplicates collapse."""
    ordered = sorted(items, key=_HF_SORT_KEY)
    dedup = []
    for x in ordered:
        if not dedup or dedup[-1] is not x:
            dedup.append(x)
    return HfSet(tuple(dedup))


def set_bigint_budget(bits):
    """Set the maximum bit length of any materialized code."""
    global _budget_bits
    if bits < _budget_bits:
        for s in _POOL.values():
            s._code = None
    _budget_bits = bits


def get_bigint_budget():
    return _budget_bits


def ack_code(x: HfSet) -> int:
    """Canonical integer code of x; raises CodeBudgetError past the budget."""
    if x._code is not None:
        return x._code
    total = 0
    for child in x.children:
        c = ack_code(child)
        if c >= _budget_bits:
            raise CodeBudgetError(
                f"code needs more than {_budget_bits} bits (member code {c})"
            )
        total += 1 << c
    x._code = total
    return total


_DECODE_CACHE: dict[int, HfSet] = {0: EMPTY}


def ack_decode(n: int) -> HfSet:
    """Inverse of ack_code."""
    if n < 0:
        raise ValueError("codes are non-negative")
    hit = _DECODE_CACHE.get(n)
    if hit is not None:
        return hit
    members = []
    bit = 0
    m = n
    while m:
        if m & 1:
            members.append(ack_decode(bit))
        m >>= 1
        bit += 1
    result = hf_make(members)
    _DECODE_CACHE[n] = result
    return result


def kpair(a: HfSet, b: HfSet) -> HfSet:
    """Kuratowski pair {{a},{a,b}}."""
    return hf_make([hf_make([a]), hf_make([a, b])])


def kunpair(p: HfSet):
    """Inverse of kpair; raises NotAPairError on malformed encodings."""
    ch = p.children
    if len(ch) == 1:
        inner = ch[0]
        if len(inner.children) == 1:
            a = inner.children[0]
            return a, a
        raise NotAPairError(f"not a pair: {p!r}")
    if len(ch) == 2:
        singles = [c for c in ch if len(c.children) == 1]
        doubles = [c for c in ch if len(c.children) == 2]
        if len(singles) == 1 and len(doubles) == 1:
            a = singles[0].children[0]
            d = doubles[0]
            if a in d:
                b = d.children[0] if d.children[1] is a else d.children[1]
                return a, b
        raise NotAPairError(f"not a pair: {p!r}")
    raise NotAPairError(f"not a pair: {p!r}")


_VN: list[HfSet] = [EMPTY]


def vn(n: int) -> HfSet:
    """Von Neumann natural: 0 = {}, n+1 = n U {n}."""
    while len(_VN) <= n:
        prev = _VN[-1]
        _VN.append(hf_make(list(prev.children) + [prev]))
    return _VN[n]


def vn_index(x: HfSet):
    """n if x == vn(n), else None.  vn(n) has exactly n members."""
    n = len(x.children)
    return n if vn(n) is x else None


_STRING_CACHE: dict[str, HfSet] = {}


def encode_string(s: str) -> HfSet:
    """Bit string as the HF function i -> bit on the ordinal len(s)."""
    hit = _STRING_CACHE.get(s)
    if hit is not None:
        return hit
    result = hf_make([kpair(vn(i), vn(int(c))) for i, c in enumerate(s)])
    _STRING_CACHE[s] = result
    return result


def decode_string(v: HfSet) -> str:
    """Inverse of encode_string; raises NotAStringCodeError off its image."""
    bits = {}
    for member in v.children:
        try:
            key, val = kunpair(member)
        except NotAPairError:
            raise NotAStringCodeError(f"member is not a pair: {member!r}")
        i = vn_index(key)
        b = vn_index(val)
        if i is None or b not in (0, 1) or i in bits:
            raise NotAStringCodeError(f"bad graph entry: {member!r}")
        bits[i] = b
    if sorted(bits) != list(range(len(bits))):
        raise NotAStringCodeError("domain is not an initial segment")
    return "".join(str(bits[i]) for i in range(len(bits)))


def hf_print(x: HfSet) -> str:
    """Canonical literal: braces, children in code order."""
    return "{" + ",".join(hf_print(c) for c in x.children) + "}"


class _Cursor:
    __slots__ = ("text", "pos")

    def __init__(self, text):
        self.text = text
        self.pos = 0

    def line_col(self):
        head = self.text[: self.pos]
        line = head.count("\n") + 1
        col = self.pos - (head.rfind("\n") + 1) + 1
        return line, col

    def error(self, message):
        line, col = self.line_col()
        raise HfParseError(message, line, col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def take_int(self):
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected digits")
        return int(self.text[start : self.pos])


def _parse_hf(cur: _Cursor) -> HfSet:
    cur.skip_ws()
    c = cur.peek()
    if c == "#":
        cur.take("#")
        return ack_decode(cur.take_int())
    if c != "{":
        cur.error("expected '{' or '#'")
    cur.take("{")
    cur.skip_ws()
    members = []
    if cur.peek() == "}":
        cur.take("}")
        return hf_make(members)
    while True:
        members.append(_parse_hf(cur))
        cur.skip_ws()
        if cur.peek() == ",":
            cur.take(",")
            continue
        cur.take("}")
        return hf_make(members)


def hf_parse(text: str) -> HfSet:
    """Parse a set literal: {} | {lit,...,lit} | #n (code shorthand)."""
    cur = _Cursor(text)
    result = _parse_hf(cur)
    cur.skip_ws()
    if cur.pos != len(cur.text):
        cur.error("trailing input after literal")
    return result
