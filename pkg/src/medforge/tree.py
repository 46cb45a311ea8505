"""The binary tree, finite level functions, and finitely presented streams.

A *level function* is a total map from the nodes of length < n to HF sets;
it is encoded as the HF set of pairs (string code of node, value), so level
functions themselves are HF values and can appear as stream values.

A *stream* assigns an HF value to every node of the infinite tree.  Streams
are a closed combinator algebra rather than arbitrary oracles, so that the
infinitary predicates used by the construction become decidable for
supported presentations:

    table(default; exceptions)   finitely many exceptions over a default
    levelconst(e0,...,e_{p-1})   value depends on the level, periodically;
                                 an entry is a literal value or a stream
                                 reference denoting that stream's level
                                 encoding at the node's depth
    f1(g)                        node of length n maps to the encoding of
                                 g restricted to levels < n
    patch(base; w; override)     override on the node set w, base elsewhere

Node sets are either finite lists or the branch-deviation family of a
stream: for levels n = start, start+step, ..., the node obtained by
following the stream's branch code for n bits, deviating once, then
appending `tail` zeros.

The helpers at the bottom answer limit queries (is a difference set
infinite, where do non-level-function values sit, ...) by structural
induction on presentations; they return None when the presentation does
not support the query.
"""

from __future__ import annotations

from .hf import EMPTY, HfSet, NotAPairError, NotAStringCodeError, decode_string, encode_string, kpair, kunpair
from .nodes import flip, level_nodes, node_at_index, nodes_below
from .branch import branch_bits


class LevelFun:
    """Total map from nodes of length < depth to HF sets."""

    __slots__ = ("depth", "_map", "_key", "_enc", "_hashed")

    def __init__(self, depth, mapping):
        dom = nodes_below(depth)
        if set(mapping) != set(dom):
            raise ValueError(f"domain must be exactly the {len(dom)} nodes of length < {depth}")
        self.depth = depth
        self._map = dict(mapping)
        self._key = (depth, tuple(self._map[nd] for nd in dom))
        self._enc = None
        self._hashed = hash(self._key)

    def value(self, node):
        return self._map[node]

    def items(self):
        return [(nd, self._map[nd]) for nd in nodes_below(self.depth)]

    def restrict(self, m):
        if m > self.depth:
            raise ValueError("cannot deepen a level function by restriction")
        if m == self.depth:
            return self
        return LevelFun(m, {nd: self._map[nd] for nd in nodes_below(m)})

    def encode(self) -> HfSet:
        if self._enc is None:
            self._enc = hf_make_encoding(self._map)
        return self._enc

    def __eq__(self, other):
        return isinstance(other, LevelFun) and self._key == other._key

    def __hash__(self):
        return self._hashed

    def __repr__(self):
        return f"LevelFun(depth={self.depth})"


def hf_make_encoding(mapping):
    from .hf import hf_make

    return hf_make([kpair(encode_string(nd), v) for nd, v in mapping.items()])


def encode_levelfun(lf: LevelFun) -> HfSet:
    return lf.encode()


_DECODED: dict[HfSet, "LevelFun | None"] = {}


def levelfun_of(v: HfSet):
    """Decode v as a level function at its intrinsic depth, or None."""
    if v in _DECODED:
        return _DECODED[v]
    result = _decode_levelfun(v)
    _DECODED[v] = result
    return result


def _decode_levelfun(v):
    if v is EMPTY:
        return LevelFun(0, {})
    entries = {}
    for member in v.children:
        try:
            key, val = kunpair(member)
            nd = decode_string(key)
        except (NotAPairError, NotAStringCodeError):
            return None
        if nd in entries:
            return None
        entries[nd] = val
    depth = max(len(nd) for nd in entries) + 1
    if len(entries) != (1 << depth) - 1:
        return None
    return LevelFun(depth, entries)


def is_levelfun_of_depth(v: HfSet, n: int):
    """(True, decoded level function) iff v encodes a depth-n level function."""
    lf = levelfun_of(v)
    if lf is not None and lf.depth == n:
        return True, lf
    return False, None


def decode_levelfun(v: HfSet, n: int) -> LevelFun:
    ok, lf = is_levelfun_of_depth(v, n)
    if not ok:
        raise ValueError(f"not a depth-{n} level function encoding")
    return lf


class StreamFun:
    """Base of the stream presentation algebra.  Immutable after creation."""

    __slots__ = ("branch_cache", "_restricts")
    kind = "?"

    def __init__(self):
        self.branch_cache = ("", 0)
        self._restricts: dict[int, LevelFun] = {}

    def eval(self, node: str) -> HfSet:
        raise NotImplementedError

    def restrict(self, n: int) -> LevelFun:
        hit = self._restricts.get(n)
        if hit is None:
            hit = LevelFun(n, {nd: self.eval(nd) for nd in nodes_below(n)})
            self._restricts[n] = hit
        return hit

    def f1_value(self, depth: int) -> HfSet:
        return self.restrict(depth).encode()

    def _skey(self):
        raise NotImplementedError

    def __repr__(self):
        return f"<stream {self.kind}>"


class Table(StreamFun):
    __slots__ = ("default", "exceptions")
    kind = "table"

    def __init__(self, default, exceptions=None):
        super().__init__()
        self.default = default
        self.exceptions = {
            nd: v for nd, v in (exceptions or {}).items() if v is not default
        }

    def eval(self, node):
        return self.exceptions.get(node, self.default)

    def _skey(self):
        exc = tuple(sorted(self.exceptions.items(), key=lambda kv: (len(kv[0]), kv[0])))
        return ("table", self.default, exc)


VALUE = "value"
SLICE = "slice"


class LevelConst(StreamFun):
    """Level-determined values on a periodic schedule of entries."""

    __slots__ = ("entries",)
    kind = "levelconst"

    def __init__(self, entries):
        super().__init__()
        entries = tuple(entries)
        if not entries:
            raise ValueError("schedule needs at least one entry")
        self.entries = _minimal_period(entries)

    def eval(self, node):
        tag, payload = self.entries[len(node) % len(self.entries)]
        if tag == VALUE:
            return payload
        return payload.f1_value(len(node))

    def _skey(self):
        return ("levelconst", tuple(_entry_key(e) for e in self.entries))


def _entry_key(entry):
    tag, payload = entry
    return (tag, payload if tag == VALUE else payload._skey())


def _minimal_period(entries):
    p = len(entries)
    keys = [_entry_key(e) for e in entries]
    for q in range(1, p):
        if p % q == 0 and all(keys[i] == keys[i % q] for i in range(p)):
            return entries[:q]
    return entries


class F1Of(StreamFun):
    __slots__ = ("base",)
    kind = "f1"

    def __init__(self, base):
        super().__init__()
        self.base = base

    def eval(self, node):
        return self.base.f1_value(len(node))

    def _skey(self):
        return ("f1", self.base._skey())


class Patch(StreamFun):
    __slots__ = ("base", "w", "override")
    kind = "patch"

    def __init__(self, base, w, override):
        super().__init__()
        self.base = base
        self.w = w
        self.override = override

    def eval(self, node):
        if self.w.contains(node):
            return self.override.eval(node)
        return self.base.eval(node)

    def _skey(self):
        return ("patch", self.base._skey(), self.w._skey(), self.override._skey())


class FiniteNodes:
    __slots__ = ("nodes", "_set")
    kind = "finite"

    def __init__(self, nodes):
        ordered = sorted(set(nodes), key=lambda s: (len(s), s))
        self.nodes = tuple(ordered)
        self._set = frozenset(ordered)

    def contains(self, node):
        return node in self._set

    def members_below(self, depth):
        return [nd for nd in self.nodes if len(nd) < depth]

    def is_infinite(self):
        return False

    def _skey(self):
        return ("finite", self.nodes)


class BranchOff:
    """Deviation nodes off a stream's branch: one per selected level.

    The node for level n follows the branch for n bits, takes the opposite
    bit, then appends `tail` zeros; its meet with the branch is exactly the
    branch's length-n prefix.
    """

    __slots__ = ("source", "start", "step", "tail")
    kind = "branchoff"

    def __init__(self, source, start, step, tail=0):
        if step < 1 or start < 0 or tail < 0:
            raise ValueError("need start >= 0, step >= 1, tail >= 0")
        self.source = source
        self.start = start
        self.step = step
        self.tail = tail

    def member_at(self, n):
        bits = branch_bits(self.source, n + 1)
        return bits[:n] + flip(bits[n]) + "0" * self.tail

    def selected_levels(self, depth):
        """Levels n with member node length < depth."""
        out = []
        n = self.start
        while n + 1 + self.tail < depth:
            out.append(n)
            n += self.step
        return out

    def contains(self, node):
        n = len(node) - 1 - self.tail
        if n < self.start or (n - self.start) % self.step != 0:
            return False
        return node == self.member_at(n)

    def members_below(self, depth):
        return [self.member_at(n) for n in self.selected_levels(depth)]

    def is_infinite(self):
        return True

    def _skey(self):
        return ("branchoff", self.source._skey(), self.start, self.step, self.tail)


def table(default, exceptions=None) -> Table:
    return Table(default, exceptions)


def levelconst(entries) -> LevelConst:
    """Entries may be HfSet values or StreamFun references (level slices)."""
    tagged = []
    for e in entries:
        if isinstance(e, HfSet):
            tagged.append((VALUE, e))
        elif isinstance(e, StreamFun):
            tagged.append((SLICE, e))
        else:
            tagged.append(e)
    return LevelConst(tagged)


def f1_of(f) -> F1Of:
    return F1Of(f)


def patch(base, w, override) -> StreamFun:
    if isinstance(w, FiniteNodes) and not w.nodes:
        return base
    return Patch(base, w, override)


def finite_nodes(nodes) -> FiniteNodes:
    return FiniteNodes(nodes)


def branchoff(source, start, step, tail=0) -> BranchOff:
    return BranchOff(source, start, step, tail)


def stream_eval(f: StreamFun, node: str) -> HfSet:
    return f.eval(node)


def restrict(f: StreamFun, n: int) -> LevelFun:
    return f.restrict(n)


def eq_dif_nodes(f: StreamFun, g: StreamFun, depth: int):
    """Partition of the nodes of length < depth by pointwise equality."""
    eq, dif = [], []
    for nd in nodes_below(depth):
        if f.eval(nd) is g.eval(nd):
            eq.append(nd)
        else:
            dif.append(nd)
    return eq, dif


def value_range(f):
    """Finite set containing every value of f, or None."""
    if isinstance(f, Table):
        return frozenset([f.default, *f.exceptions.values()])
    if isinstance(f, LevelConst):
        vals = []
        for tag, payload in f.entries:
            if tag != VALUE:
                return None
            vals.append(payload)
        return frozenset(vals)
    if isinstance(f, Patch):
        rb = value_range(f.base)
        ro = value_range(f.override)
        if rb is not None and ro is not None:
            return rb | ro
    return None


def streams_equal_everywhere(a, b):
    """True / False / None (undecided) for pointwise equality at every node."""
    if a is b or a._skey() == b._skey():
        return True
    if _singleton_schedule(a) is not None and _singleton_schedule(a) is _singleton_schedule(b):
        return True
    for nd in nodes_below(4):
        if a.eval(nd) is not b.eval(nd):
            return False
    return None


def _singleton_schedule(f):
    """The single value of a constant stream, if syntactically constant."""
    if isinstance(f, Table) and not f.exceptions:
        return f.default
    if isinstance(f, LevelConst) and len(f.entries) == 1 and f.entries[0][0] == VALUE:
        return f.entries[0][1]
    return None


def dif_infinite(a, b):
    """Is the set of nodes where a and b differ infinite?  True/False/None."""
    ans = _dif_infinite_ex(a, b, 0)
    return ans if ans is None else ans[0]


def _dif_infinite_ex(a, b, depth):
    # returns None, (False, False) or (True, dense); dense means "all but
    # finitely many levels contribute all but finitely many of their nodes",
    # which survives removing one node per level.
    if depth > 4:
        return None
    eq = streams_equal_everywhere(a, b)
    if eq is True:
        return (False, False)
    if isinstance(b, Patch) and not isinstance(a, Patch):
        a, b = b, a
    if isinstance(a, Patch):
        return _dif_patch(a, b, depth)
    ka, kb = a.kind, b.kind
    if ka == "table" and kb == "table":
        return (True, True) if a.default is not b.default else (False, False)
    if {ka, kb} == {"table", "f1"} or {ka, kb} == {"levelconst", "f1"}:
        lc = a if ka == "levelconst" else (b if kb == "levelconst" else None)
        if lc is None:
            return (True, True)
        other = b if lc is a else a
        return _dif_levelconst_vs_f1(lc, other, depth)
    if {ka, kb} == {"table", "levelconst"}:
        t = a if ka == "table" else b
        lc = b if t is a else a
        saw_unknown = False
        for tag, payload in lc.entries:
            if tag == VALUE:
                if payload is not t.default:
                    return (True, True)
            else:
                return (True, True)  # level encodings match a fixed default at most once
        return None if saw_unknown else (False, False)
    if ka == "levelconst" and kb == "levelconst":
        return _dif_levelconst_pair(a, b, depth)
    if ka == "f1" and kb == "f1":
        eqb = streams_equal_everywhere(a.base, b.base)
        if eqb is True:
            return (False, False)
        if eqb is False:
            return (True, True)
        return None
    return None


def _dif_levelconst_vs_f1(lc, f1stream, depth):
    contributes = False
    unknown = False
    for tag, payload in lc.entries:
        if tag == VALUE:
            contributes = True  # fixed value matches level encodings at most once
        else:
            eqs = streams_equal_everywhere(payload, f1stream.base)
            if eqs is False:
                contributes = True
            elif eqs is None:
                unknown = True
    if contributes:
        return (True, True)
    return None if unknown else (False, False)


def _dif_levelconst_pair(a, b, depth):
    import math

    pa, pb = len(a.entries), len(b.entries)
    period = pa * pb // math.gcd(pa, pb)
    contributes = False
    unknown = False
    for r in range(period):
        ta, va = a.entries[r % pa]
        tb, vb = b.entries[r % pb]
        if ta == VALUE and tb == VALUE:
            if va is not vb:
                contributes = True
        elif ta == VALUE or tb == VALUE:
            contributes = True  # slice encodings escape any fixed value
        else:
            eqs = streams_equal_everywhere(va, vb)
            if eqs is False:
                contributes = True
            elif eqs is None:
                unknown = True
    if contributes:
        return (True, True)
    return None if unknown else (False, False)


def _dif_patch(p, x, depth):
    base_eq = streams_equal_everywhere(p.base, x)
    w_dis = _w_disagreement_infinite(p, x, depth)
    if base_eq is True:
        return w_dis
    db = _dif_infinite_ex(p.base, x, depth + 1)
    if w_dis is not None and w_dis[0]:
        return w_dis
    if db is None:
        return None
    if db[0]:
        if db[1]:
            return (True, True)  # dense difference survives one node per level
        if not p.w.is_infinite():
            return (True, False)
        return None
    # base difference finite: total dif is w-disagreement plus finitely many
    return w_dis


def _w_disagreement_infinite(p, x, depth):
    """Is {node in w : override(node) != x(node)} infinite?"""
    if not p.w.is_infinite():
        return (False, False)
    eq = streams_equal_everywhere(p.override, x)
    if eq is True:
        return (False, False)
    xr = _level_encoding_base(x)
    if xr is not None and value_range(p.override) is not None:
        return (True, False)  # finitely many values vs per-depth encodings
    ovb = _level_encoding_base(p.override)
    if xr is not None and ovb is not None:
        eqs = streams_equal_everywhere(ovb, xr)
        if eqs is True:
            return (False, False)
        if eqs is False:
            return (True, False)
    return None


def _level_encoding_base(x):
    """g such that x's value at every node is g's level encoding, if so."""
    if isinstance(x, F1Of):
        return x.base
    return None


def nonlevelfun_profile(f):
    """Where does f take values that are not level functions of the node depth?

    ("empty",)            nowhere
    ("finite", nodes)     exactly at the listed nodes
    ("everywhere",)       at all but finitely many levels, at all but
                          finitely many nodes of the level
    None                  unsupported presentation
    """
    if isinstance(f, Table):
        return ("everywhere",)
    if isinstance(f, LevelConst):
        if all(tag == SLICE for tag, _ in f.entries):
            return ("empty",)
        return ("everywhere",)
    if isinstance(f, F1Of):
        return ("empty",)
    if isinstance(f, Patch):
        pb = nonlevelfun_profile(f.base)
        if pb == ("everywhere",):
            return ("everywhere",)
        po = nonlevelfun_profile(f.override)
        if pb is None:
            return None
        if not f.w.is_infinite():
            if pb[0] == "empty":
                bad = tuple(
                    nd
                    for nd in f.w.nodes
                    if not is_levelfun_of_depth(f.override.eval(nd), len(nd))[0]
                )
                return ("finite", bad) if bad else ("empty",)
            if pb[0] == "finite":
                base_bad = tuple(nd for nd in pb[1] if not f.w.contains(nd))
                w_bad = tuple(
                    nd
                    for nd in f.w.nodes
                    if not is_levelfun_of_depth(f.override.eval(nd), len(nd))[0]
                )
                return _finite_or_empty(base_bad + w_bad)
        else:
            if po == ("empty",):
                if pb[0] == "empty":
                    return ("empty",)
                if pb[0] == "finite":
                    return _finite_or_empty(
                        tuple(nd for nd in pb[1] if not f.w.contains(nd))
                    )
            return None
    return None


def _finite_or_empty(nodes):
    return ("finite", nodes) if nodes else ("empty",)


def tower_sources(f):
    """Streams whose level encodings cover every value of f, or None."""
    if isinstance(f, F1Of):
        return [f.base]
    if isinstance(f, LevelConst):
        if all(tag == SLICE for tag, _ in f.entries):
            out = []
            seen = set()
            for _, s in f.entries:
                k = s._skey()
                if k not in seen:
                    seen.add(k)
                    out.append(s)
            return out
        return None
    if isinstance(f, Patch):
        tb = tower_sources(f.base)
        to = tower_sources(f.override)
        if tb is not None and to is not None:
            out = list(tb)
            keys = {s._skey() for s in tb}
            for s in to:
                if s._skey() not in keys:
                    keys.add(s._skey())
                    out.append(s)
            return out
    return None
