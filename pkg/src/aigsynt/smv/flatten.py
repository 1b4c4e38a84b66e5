"""Flattening of a resolved module hierarchy into a boolean-only model.

Instances are inlined recursively; names get dotted instance-path
prefixes.  An enum over n symbols occupies ceil(log2 n) bits, codes
assigned in declaration order from 0; a range lo..hi is the enum of its
values, so value v gets code v - lo.  Encoding bit i of variable v is
named ``v.__bit<i>`` (booleans keep their plain name).  Next-state and
init expressions only ever produce valid codes, so out-of-encoding
patterns are unreachable by construction.

Flattening is a pure transformation; the produced values are immutable
and safe to share across threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .. import boolexpr as bx
from ..boolexpr import BoolExpr, BVar
from .ast import (
    Binary, BoolLit, BoolType, Case, EnumType, Expr, InstanceType, IntLit,
    Name, RangeType, SmvFlattenError, Unary, VarType,
)
from .resolve import (
    DefineBinding, IntConstType, ModuleCtx, ParamBinding, ResolvedSpec,
    SymbolBinding, SymConstType, VarBinding,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlatLatch:
    name: str
    init: int  # 0 or 1
    next: BoolExpr


@dataclass(frozen=True)
class FlatModel:
    inputs_u: tuple[str, ...]
    inputs_c: tuple[str, ...]
    latches: tuple[FlatLatch, ...]
    defines: tuple[tuple[str, BoolExpr], ...]

    def define_map(self) -> dict[str, BoolExpr]:
        return dict(self.defines)

    def signal_names(self) -> set[str]:
        names = set(self.inputs_u) | set(self.inputs_c)
        names |= {l.name for l in self.latches}
        names |= {n for n, _ in self.defines}
        return names

    def validate(self) -> None:
        if set(self.inputs_u) & set(self.inputs_c):
            raise SmvFlattenError("controllable and uncontrollable inputs overlap")
        declared = set(self.inputs_u) | set(self.inputs_c)
        declared |= {l.name for l in self.latches}
        seen_defines: set[str] = set()
        for name, expr in self.defines:
            missing = bx.free_names(expr) - declared - seen_defines
            if missing:
                raise SmvFlattenError(
                    f"define {name!r} references undeclared or later names: "
                    f"{sorted(missing)}")
            seen_defines.add(name)
        all_names = declared | seen_defines
        for latch in self.latches:
            missing = bx.free_names(latch.next) - all_names
            if missing:
                raise SmvFlattenError(
                    f"latch {latch.name!r} references undeclared names: "
                    f"{sorted(missing)}")
            if latch.init not in (0, 1):
                raise SmvFlattenError(f"latch {latch.name!r} has init {latch.init}")


def nbits(size: int) -> int:
    if size < 1:
        raise ValueError(size)
    return max(size - 1, 0).bit_length()


def type_size(t: VarType) -> int:
    if isinstance(t, RangeType):
        return t.size
    if isinstance(t, EnumType):
        return t.size
    raise AssertionError(f"not a word type: {t}")


def value_code(t: VarType, value) -> int:
    if isinstance(t, RangeType):
        if not (t.lo <= value <= t.hi):
            raise SmvFlattenError(f"value {value} outside range {t}")
        return value - t.lo
    if isinstance(t, EnumType):
        try:
            return t.symbols.index(value)
        except ValueError:
            raise SmvFlattenError(f"symbol {value!r} not in enum {t}") from None
    raise AssertionError(f"not a word type: {t}")


def code_bits(code: int, width: int) -> list[BoolExpr]:
    return [bx.TRUE if (code >> i) & 1 else bx.FALSE for i in range(width)]


class _Flattener:
    def __init__(self, resolved: ResolvedSpec):
        self.resolved = resolved
        self.inputs_u: list[str] = []
        self.inputs_c: list[str] = []
        self.latches: list[FlatLatch] = []
        self.defines: list[tuple[str, BoolExpr]] = []
        self._define_state: dict[tuple[int, str], str] = {}

    # naming ------------------------------------------------------------

    def _prefix(self, ctx: ModuleCtx) -> str:
        return ".".join(ctx.path) + "." if ctx.path else ""

    def signal(self, ctx: ModuleCtx, name: str) -> str:
        return self._prefix(ctx) + name

    def word_bit_names(self, ctx: ModuleCtx, name: str, width: int) -> list[str]:
        base = self.signal(ctx, name)
        return [f"{base}.__bit{i}" for i in range(width)]

    # main walk ----------------------------------------------------------

    def run(self) -> FlatModel:
        self._emit_defines(self.resolved.root)
        self._walk_vars(self.resolved.root)
        model = FlatModel(
            inputs_u=tuple(self.inputs_u),
            inputs_c=tuple(self.inputs_c),
            latches=tuple(self.latches),
            defines=tuple(self.defines),
        )
        model.validate()
        return model

    def _emit_defines(self, ctx: ModuleCtx) -> None:
        for d in ctx.module.defines:
            self._ensure_define(ctx, d.name)
        for v in ctx.module.vars:
            if isinstance(v.type, InstanceType):
                self._emit_defines(ctx.children[v.name])

    def _ensure_define(self, ctx: ModuleCtx, name: str) -> None:
        """Emit a define (and its dependencies) exactly once, post-order."""
        key = (id(ctx), name)
        state = self._define_state.get(key)
        if state == "done":
            return
        if state == "busy":
            raise SmvFlattenError(
                f"circular define {self.signal(ctx, name)!r}")
        self._define_state[key] = "busy"
        decl = ctx.module.define_decl(name)
        dtype = ctx.define_types[name]
        if isinstance(dtype, BoolType):
            expr = self.compile_bool(ctx, decl.expr)
            self.defines.append((self.signal(ctx, name), expr))
        elif isinstance(dtype, (RangeType, EnumType)):
            bits = self.compile_word(ctx, decl.expr, dtype)
            for bit_name, bit in zip(
                    self.word_bit_names(ctx, name, len(bits)), bits):
                self.defines.append((bit_name, bit))
        else:
            # constant-typed defines are inlined at their use sites
            pass
        self._define_state[key] = "done"

    def _walk_vars(self, ctx: ModuleCtx) -> None:
        module = ctx.module
        inits = {a.target: a for a in module.assigns if a.kind == "init"}
        nexts = {a.target: a for a in module.assigns if a.kind == "next"}
        for v in module.vars:
            if isinstance(v.type, InstanceType):
                self._walk_vars(ctx.children[v.name])
                continue
            has_next = v.name in nexts
            if not has_next:
                if ctx.path:
                    raise SmvFlattenError(
                        f"variable {self.signal(ctx, v.name)!r} has no next() "
                        f"assignment; only module 'main' may declare inputs",
                        v.line)
                if v.name in inits:
                    raise SmvFlattenError(
                        f"input variable {v.name!r} cannot have an init() "
                        f"assignment", v.line)
                self._emit_input(ctx, v)
                continue
            self._emit_latch(ctx, v, inits.get(v.name), nexts[v.name])

    def _emit_input(self, ctx: ModuleCtx, v) -> None:
        target = self.inputs_c if v.controllable else self.inputs_u
        if isinstance(v.type, BoolType):
            target.append(self.signal(ctx, v.name))
            return
        width = nbits(type_size(v.type))
        target.extend(self.word_bit_names(ctx, v.name, width))

    def _emit_latch(self, ctx: ModuleCtx, v, init_assign, next_assign) -> None:
        if isinstance(v.type, BoolType):
            init_code = self._init_code(ctx, v, init_assign)
            nxt = self.compile_bool(ctx, next_assign.expr)
            self.latches.append(FlatLatch(self.signal(ctx, v.name),
                                          init_code, nxt))
            return
        width = nbits(type_size(v.type))
        init_code = self._init_code(ctx, v, init_assign)
        next_bits = self.compile_word(ctx, next_assign.expr, v.type)
        for i, (bit_name, bit) in enumerate(zip(
                self.word_bit_names(ctx, v.name, width), next_bits)):
            self.latches.append(FlatLatch(bit_name, (init_code >> i) & 1, bit))

    def _init_code(self, ctx: ModuleCtx, v, init_assign) -> int:
        if init_assign is None:
            log.warning("no init() for %s; defaulting to the first value of %s",
                        self.signal(ctx, v.name), v.type)
            return 0
        value = self._const_eval(ctx, init_assign.expr)
        if value is None:
            raise SmvFlattenError(
                f"init({self.signal(ctx, v.name)}) is not a constant expression",
                init_assign.line)
        if isinstance(v.type, BoolType):
            if not isinstance(value, bool):
                raise SmvFlattenError(
                    f"init({self.signal(ctx, v.name)}) is not boolean",
                    init_assign.line)
            return int(value)
        if isinstance(value, bool):
            raise SmvFlattenError(
                f"init({self.signal(ctx, v.name)}) is boolean, variable is {v.type}",
                init_assign.line)
        return value_code(v.type, value)

    def _const_eval(self, ctx: ModuleCtx, expr: Expr):
        """Fold an expression to a constant (bool, int or symbol) or None."""
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, Name):
            b = ctx.bindings.get(id(expr))
            if isinstance(b, SymbolBinding):
                return b.name
            if isinstance(b, ParamBinding):
                return self._const_eval(b.parent, b.actual)
            if isinstance(b, DefineBinding):
                return self._const_eval(b.ctx,
                                        b.ctx.module.define_decl(b.name).expr)
            return None
        if isinstance(expr, Unary):
            v = self._const_eval(ctx, expr.arg)
            return None if v is None else not v
        if isinstance(expr, Binary):
            lv = self._const_eval(ctx, expr.left)
            rv = self._const_eval(ctx, expr.right)
            if lv is None or rv is None:
                return None
            op = expr.op
            if op == "&":
                return lv and rv
            if op == "|":
                return lv or rv
            if op == "xor":
                return bool(lv) != bool(rv)
            if op == "->":
                return (not lv) or rv
            if op == "<->":
                return bool(lv) == bool(rv)
            if op == "=":
                return lv == rv
            if op == "!=":
                return lv != rv
            if op in ("<", "<=", ">", ">="):
                if isinstance(lv, str) or isinstance(rv, str):
                    return None  # symbol order needs the enum type; keep init simple
                return {"<": lv < rv, "<=": lv <= rv,
                        ">": lv > rv, ">=": lv >= rv}[op]
        if isinstance(expr, Case):
            for cond, value in expr.branches:
                cv = self._const_eval(ctx, cond)
                if cv is None:
                    return None
                if cv:
                    return self._const_eval(ctx, value)
            return None
        return None

    # expression compilation ---------------------------------------------

    def compile_bool(self, ctx: ModuleCtx, expr: Expr) -> BoolExpr:
        if isinstance(expr, BoolLit):
            return bx.TRUE if expr.value else bx.FALSE
        if isinstance(expr, Name):
            b = ctx.bindings[id(expr)]
            if isinstance(b, VarBinding):
                assert isinstance(b.type, BoolType), expr
                return BVar(self.signal(b.ctx, b.name))
            if isinstance(b, DefineBinding):
                assert isinstance(b.ctx.define_types[b.name], BoolType), expr
                self._ensure_define(b.ctx, b.name)
                return BVar(self.signal(b.ctx, b.name))
            if isinstance(b, ParamBinding):
                return self.compile_bool(b.parent, b.actual)
            raise AssertionError(f"non-boolean name {expr} reached flatten")
        if isinstance(expr, Unary):
            return bx.bnot(self.compile_bool(ctx, expr.arg))
        if isinstance(expr, Binary):
            op = expr.op
            if op in ("&", "|", "xor", "->", "<->"):
                l = self.compile_bool(ctx, expr.left)
                r = self.compile_bool(ctx, expr.right)
                if op == "&":
                    return bx.band(l, r)
                if op == "|":
                    return bx.bor(l, r)
                if op == "xor":
                    return bx.bxor(l, r)
                if op == "->":
                    return bx.bor(bx.bnot(l), r)
                return bx.biff(l, r)
            return self._compile_comparison(ctx, expr)
        if isinstance(expr, Case):
            self._check_case_default(expr)
            result = self.compile_bool(ctx, expr.branches[-1][1])
            for cond, value in reversed(expr.branches[:-1]):
                c = self.compile_bool(ctx, cond)
                v = self.compile_bool(ctx, value)
                result = bx.bite(c, v, result)
            return result
        raise AssertionError(f"unexpected expression {expr!r}")

    def _check_case_default(self, expr: Case) -> None:
        last_cond = expr.branches[-1][0]
        if not (isinstance(last_cond, BoolLit) and last_cond.value):
            raise SmvFlattenError(
                "unsupported construct: case without a final TRUE branch",
                expr.line)

    def _compile_comparison(self, ctx: ModuleCtx, expr: Binary) -> BoolExpr:
        op = expr.op
        t = ctx.cmp_types[id(expr)]
        if isinstance(t, BoolType):
            l = self.compile_bool(ctx, expr.left)
            r = self.compile_bool(ctx, expr.right)
            return bx.biff(l, r) if op == "=" else bx.bxor(l, r)
        if isinstance(t, IntConstType):
            # both sides constant; fold through the integer values
            lv = self._const_eval(ctx, expr.left)
            rv = self._const_eval(ctx, expr.right)
            result = {"=": lv == rv, "!=": lv != rv, "<": lv < rv,
                      "<=": lv <= rv, ">": lv > rv, ">=": lv >= rv}[op]
            return bx.TRUE if result else bx.FALSE
        lbits = self.compile_word(ctx, expr.left, t)
        rbits = self.compile_word(ctx, expr.right, t)
        if op == "=":
            return bx.band(*[bx.biff(a, b) for a, b in zip(lbits, rbits)])
        if op == "!=":
            return bx.bnot(bx.band(*[bx.biff(a, b) for a, b in zip(lbits, rbits)]))
        lt = self._unsigned_less(lbits, rbits)
        if op == "<":
            return lt
        if op == ">":
            return self._unsigned_less(rbits, lbits)
        if op == "<=":
            return bx.bnot(self._unsigned_less(rbits, lbits))
        return bx.bnot(lt)  # >=

    @staticmethod
    def _unsigned_less(a: list[BoolExpr], b: list[BoolExpr]) -> BoolExpr:
        result = bx.FALSE  # equal so far means not less
        for ai, bi in zip(a, b):  # LSB to MSB
            result = bx.bite(bx.biff(ai, bi), result, bx.band(bx.bnot(ai), bi))
        return result

    def compile_word(self, ctx: ModuleCtx, expr: Expr, t: VarType) -> list[BoolExpr]:
        width = nbits(type_size(t))
        if isinstance(expr, IntLit):
            return code_bits(value_code(t, expr.value), width)
        if isinstance(expr, Name):
            b = ctx.bindings[id(expr)]
            if isinstance(b, SymbolBinding):
                return code_bits(value_code(t, b.name), width)
            if isinstance(b, VarBinding):
                if b.type != t:
                    raise SmvFlattenError(
                        f"{self.signal(b.ctx, b.name)!r} has type {b.type}, "
                        f"context requires {t}", expr.line)
                return [BVar(n) for n in
                        self.word_bit_names(b.ctx, b.name, width)]
            if isinstance(b, DefineBinding):
                dtype = b.ctx.define_types[b.name]
                if isinstance(dtype, (IntConstType, SymConstType)):
                    decl = b.ctx.module.define_decl(b.name)
                    return self.compile_word(b.ctx, decl.expr, t)
                if dtype != t:
                    raise SmvFlattenError(
                        f"define {self.signal(b.ctx, b.name)!r} has type {dtype}, "
                        f"context requires {t}", expr.line)
                self._ensure_define(b.ctx, b.name)
                return [BVar(n) for n in
                        self.word_bit_names(b.ctx, b.name, width)]
            if isinstance(b, ParamBinding):
                return self.compile_word(b.parent, b.actual, t)
            raise AssertionError(b)
        if isinstance(expr, Case):
            self._check_case_default(expr)
            result = self.compile_word(ctx, expr.branches[-1][1], t)
            for cond, value in reversed(expr.branches[:-1]):
                c = self.compile_bool(ctx, cond)
                vbits = self.compile_word(ctx, value, t)
                result = [bx.bite(c, v, r) for v, r in zip(vbits, result)]
            return result
        raise SmvFlattenError(
            f"unsupported construct in a {t}-typed position: {expr}",
            getattr(expr, "line", None))


def flatten(resolved: ResolvedSpec) -> FlatModel:
    """Flatten a resolved specification to a boolean-only model."""
    return _Flattener(resolved).run()
