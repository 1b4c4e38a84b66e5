"""Reduced ordered binary decision diagrams.

Design: a fixed static variable order chosen at manager setup, no
complement edges, no reordering, no garbage collection, and an
unbounded operation cache, so runs are deterministic and a node id
identifies a boolean function for the manager's lifetime.  Terminals
are node 0 (false) and node 1 (true).

One manager per thread; handles must never cross managers.
"""

from __future__ import annotations

from typing import Iterable, Mapping

_TERMINAL_LEVEL = 1 << 30


class BddError(Exception):
    pass


class BddManager:
    def __init__(self) -> None:
        # parallel node arrays; slots 0/1 are the terminals
        self._level = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo = [0, 1]
        self._hi = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        self._var_names: list[str] = []

    # variables ---------------------------------------------------------

    def add_var(self, name: str) -> "BddRef":
        level = len(self._var_names)
        self._var_names.append(name)
        return BddRef(self, self._mk(level, 0, 1))

    @property
    def var_count(self) -> int:
        return len(self._var_names)

    def var_name(self, level: int) -> str:
        return self._var_names[level]

    def var(self, level: int) -> "BddRef":
        if not 0 <= level < len(self._var_names):
            raise BddError(f"unknown variable level {level}")
        return BddRef(self, self._mk(level, 0, 1))

    @property
    def true(self) -> "BddRef":
        return BddRef(self, 1)

    @property
    def false(self) -> "BddRef":
        return BddRef(self, 0)

    @property
    def node_count(self) -> int:
        return len(self._level)

    # core construction ---------------------------------------------------

    def _mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._level)
            self._level.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = node
        return node

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        key = (0, f, g, h)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        levels = self._level
        los = self._lo
        his = self._hi
        v = min(levels[f], levels[g], levels[h])
        if levels[f] == v:
            f0, f1 = los[f], his[f]
        else:
            f0 = f1 = f
        if levels[g] == v:
            g0, g1 = los[g], his[g]
        else:
            g0 = g1 = g
        if levels[h] == v:
            h0, h1 = los[h], his[h]
        else:
            h0 = h1 = h
        r = self._mk(v, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        self._cache[key] = r
        return r

    def _neg(self, f: int) -> int:
        if f <= 1:
            return 1 - f
        key = (1, f)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        r = self._mk(self._level[f], self._neg(self._lo[f]), self._neg(self._hi[f]))
        self._cache[key] = r
        return r

    # quantification ------------------------------------------------------

    def _quantify(self, f: int, levels: frozenset[int], exists: bool) -> int:
        if f <= 1:
            return f
        v = self._level[f]
        if v > max(levels, default=-1):
            return f
        key = (2 if exists else 3, f, levels)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        lo = self._quantify(self._lo[f], levels, exists)
        hi = self._quantify(self._hi[f], levels, exists)
        if v in levels:
            if exists:
                r = self._ite(lo, 1, hi)  # lo | hi
            else:
                r = self._ite(lo, hi, 0)  # lo & hi
        else:
            r = self._mk(v, lo, hi)
        self._cache[key] = r
        return r

    # composition ---------------------------------------------------------

    def _compose(self, f: int, sub: dict[int, int], sub_key: tuple) -> int:
        if f <= 1:
            return f
        v = self._level[f]
        key = (4, f, sub_key)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        lo = self._compose(self._lo[f], sub, sub_key)
        hi = self._compose(self._hi[f], sub, sub_key)
        g = sub.get(v)
        if g is None:
            g = self._mk(v, 0, 1)
        r = self._ite(g, hi, lo)
        self._cache[key] = r
        return r

    # inspection ------------------------------------------------------------

    def _support(self, f: int, out: set[int]) -> None:
        seen = set()
        stack = [f]
        while stack:
            n = stack.pop()
            if n <= 1 or n in seen:
                continue
            seen.add(n)
            out.add(self._level[n])
            stack.append(self._lo[n])
            stack.append(self._hi[n])

    def _eval(self, f: int, assignment) -> bool:
        while f > 1:
            f = self._hi[f] if assignment[self._level[f]] else self._lo[f]
        return f == 1


class BddRef:
    """Handle to a node; valid while its manager lives."""

    __slots__ = ("mgr", "node")

    def __init__(self, mgr: BddManager, node: int):
        self.mgr = mgr
        self.node = node

    def _lift(self, other: "BddRef") -> int:
        if other.mgr is not self.mgr:
            raise BddError("mixing BDDs from different managers")
        return other.node

    def __eq__(self, other) -> bool:
        return isinstance(other, BddRef) and other.mgr is self.mgr \
            and other.node == self.node

    def __hash__(self) -> int:
        return hash((id(self.mgr), self.node))

    def __repr__(self) -> str:
        return f"BddRef({self.node})"

    @property
    def is_true(self) -> bool:
        return self.node == 1

    @property
    def is_false(self) -> bool:
        return self.node == 0

    @property
    def is_terminal(self) -> bool:
        return self.node <= 1

    @property
    def level(self) -> int:
        if self.is_terminal:
            raise BddError("terminal node has no variable")
        return self.mgr._level[self.node]

    @property
    def low(self) -> "BddRef":
        return BddRef(self.mgr, self.mgr._lo[self.node])

    @property
    def high(self) -> "BddRef":
        return BddRef(self.mgr, self.mgr._hi[self.node])

    # operators ---------------------------------------------------------

    def __invert__(self) -> "BddRef":
        return BddRef(self.mgr, self.mgr._neg(self.node))

    def __and__(self, other: "BddRef") -> "BddRef":
        return BddRef(self.mgr, self.mgr._ite(self.node, self._lift(other), 0))

    def __or__(self, other: "BddRef") -> "BddRef":
        return BddRef(self.mgr, self.mgr._ite(self.node, 1, self._lift(other)))

    def __xor__(self, other: "BddRef") -> "BddRef":
        g = self._lift(other)
        return BddRef(self.mgr, self.mgr._ite(self.node, self.mgr._neg(g), g))

    def ite(self, g: "BddRef", h: "BddRef") -> "BddRef":
        return BddRef(self.mgr,
                      self.mgr._ite(self.node, self._lift(g), self._lift(h)))

    def implies(self, other: "BddRef") -> "BddRef":
        return BddRef(self.mgr, self.mgr._ite(self.node, self._lift(other), 1))

    def iff(self, other: "BddRef") -> "BddRef":
        g = self._lift(other)
        return BddRef(self.mgr, self.mgr._ite(self.node, g, self.mgr._neg(g)))

    # quantification -------------------------------------------------------

    def exists(self, levels: Iterable[int]) -> "BddRef":
        levels = frozenset(levels)
        if not levels:
            return self
        return BddRef(self.mgr, self.mgr._quantify(self.node, levels, True))

    def forall(self, levels: Iterable[int]) -> "BddRef":
        levels = frozenset(levels)
        if not levels:
            return self
        return BddRef(self.mgr, self.mgr._quantify(self.node, levels, False))

    def compose(self, submap: Mapping[int, "BddRef"]) -> "BddRef":
        """Simultaneous substitution of variables by functions."""
        if not submap:
            return self
        sub = {lvl: ref.node for lvl, ref in submap.items()}
        sub_key = tuple(sorted(sub.items()))
        return BddRef(self.mgr, self.mgr._compose(self.node, sub, sub_key))

    def cofactor(self, level: int, value: bool) -> "BddRef":
        target = self.mgr.true if value else self.mgr.false
        return self.compose({level: target})

    # inspection -------------------------------------------------------------

    def support(self) -> frozenset[int]:
        out: set[int] = set()
        self.mgr._support(self.node, out)
        return frozenset(out)

    def evaluate(self, assignment) -> bool:
        """``assignment`` maps variable level to bool (list or dict)."""
        return self.mgr._eval(self.node, assignment)

    def sat_one(self) -> dict[int, bool] | None:
        """One satisfying partial assignment, deterministically chosen."""
        if self.is_false:
            return None
        out: dict[int, bool] = {}
        mgr = self.mgr
        n = self.node
        while n > 1:
            if mgr._lo[n] != 0:
                out[mgr._level[n]] = False
                n = mgr._lo[n]
            else:
                out[mgr._level[n]] = True
                n = mgr._hi[n]
        return out

    def dag_size(self) -> int:
        seen: set[int] = set()
        stack = [self.node]
        while stack:
            n = stack.pop()
            if n <= 1 or n in seen:
                continue
            seen.add(n)
            stack.append(self.mgr._lo[n])
            stack.append(self.mgr._hi[n])
        return len(seen) + 2


class AigCone:
    """Translates literals of one AIGER document into BDDs.

    ``var_map`` sends each input/latch AIG variable to a BDD variable
    reference; gate cones are translated on demand and memoized.
    """

    def __init__(self, mgr: BddManager, doc, var_map: Mapping[int, BddRef]):
        self.mgr = mgr
        self.doc = doc
        self._var_map = {v: ref.node for v, ref in var_map.items()}
        self._memo: dict[int, int] = {0: 0}

    def lit(self, literal: int) -> BddRef:
        return BddRef(self.mgr, self._node(literal))

    def _node(self, literal: int) -> int:
        cached = self._memo.get(literal)
        if cached is not None:
            return cached
        var = literal >> 1
        if literal & 1:
            result = self.mgr._neg(self._node(literal ^ 1))
        elif var in self._var_map:
            result = self._var_map[var]
        elif self.doc.aig.is_and(var):
            rhs0, rhs1 = self.doc.aig.and_node(var)
            result = self.mgr._ite(self._node(rhs0), self._node(rhs1), 0)
        else:
            raise BddError(f"literal {literal} is not mapped and not a gate")
        self._memo[literal] = result
        return result
