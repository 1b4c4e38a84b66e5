"""Compilation of a flat model plus property monitors into a game circuit.

The produced document is in the new (extended) format: per-guarantee
bad literals, one invariant-constraint literal per assumption (its
monitor staying out of the trap), and at most one justice group.  When
several guarantees carry a live fair signal they are combined by a
round-robin counter that emits the shared justice literal on
wraparound.  The justice literal's meaning is reversed relative to
plain AIGER justice: a violating trace keeps constraints true and hits
the justice literal only finitely often.

Latches initialize to 0 in AIGER, so a latch whose model init bit is 1
is stored inverted; its symbol name carries the suffix ``.__neg``.
"""

from __future__ import annotations

from . import boolexpr as bx
from .aiger import AigerDoc, CONTROLLABLE_PREFIX, FALSE_LIT
from .automata import Label, Monitor
from .smv.flatten import FlatModel


class CircuitError(Exception):
    pass


class _LatchPlan:
    __slots__ = ("name", "flip", "lit")

    def __init__(self, name: str, flip: bool, lit: int):
        self.name = name
        self.flip = flip
        self.lit = lit

    @property
    def signal_lit(self) -> int:
        return self.lit ^ 1 if self.flip else self.lit


def _bexpr_to_lit(aig, expr: bx.BoolExpr, signals: dict[str, int],
                  memo: dict[bx.BoolExpr, int]) -> int:
    cached = memo.get(expr)
    if cached is not None:
        return cached
    if isinstance(expr, bx.BConst):
        lit = 1 if expr.value else 0
    elif isinstance(expr, bx.BVar):
        try:
            lit = signals[expr.name]
        except KeyError:
            raise CircuitError(f"unresolved signal {expr.name!r}") from None
    elif isinstance(expr, bx.BNot):
        lit = _bexpr_to_lit(aig, expr.arg, signals, memo) ^ 1
    elif isinstance(expr, bx.BAnd):
        lit = aig.and_many(_bexpr_to_lit(aig, a, signals, memo)
                           for a in expr.args)
    elif isinstance(expr, bx.BOr):
        lit = aig.or_many(_bexpr_to_lit(aig, a, signals, memo)
                          for a in expr.args)
    else:
        raise TypeError(expr)
    memo[expr] = lit
    return lit


def _label_lit(aig, label: Label, prop_lits: dict[str, int]) -> int:
    lits = [prop_lits[p] for p in sorted(label.pos)]
    lits += [prop_lits[p] ^ 1 for p in sorted(label.neg)]
    return aig.and_many(lits)


class _MonitorPlan:
    def __init__(self, monitor: Monitor, name: str):
        self.monitor = monitor
        self.name = name
        self.latches: list[_LatchPlan] = []

    def state_eq(self, aig, index: int) -> int:
        lits = []
        for i, plan in enumerate(self.latches):
            bit = plan.signal_lit
            lits.append(bit if (index >> i) & 1 else bit ^ 1)
        return aig.and_many(lits)

    def states_pred(self, aig, states) -> int:
        return aig.or_many(self.state_eq(aig, s) for s in sorted(states))


def compile_model(model: FlatModel, sys_monitors: list[Monitor],
                  env_monitors: list[Monitor]) -> AigerDoc:
    """Build the extended-format game circuit for a model and its monitors."""
    doc = AigerDoc(fmt="new")
    aig = doc.aig
    signals: dict[str, int] = {}

    for name in model.inputs_u:
        signals[name] = doc.add_input(name)
    for name in model.inputs_c:
        signals[name] = doc.add_input(CONTROLLABLE_PREFIX + name)

    latch_plans: list[tuple[_LatchPlan, bx.BoolExpr]] = []
    for latch in model.latches:
        flip = latch.init == 1
        plan = _LatchPlan(latch.name, flip,
                          doc.add_latch(latch.name + (".__neg" if flip else "")))
        signals[latch.name] = plan.signal_lit
        latch_plans.append((plan, latch.next))

    monitor_plans: list[_MonitorPlan] = []
    for role, monitors in (("sys", sys_monitors), ("env", env_monitors)):
        for k, monitor in enumerate(monitors):
            mp = _MonitorPlan(monitor, f"{role}_prop{k}")
            init = monitor.init_code
            for i in range(monitor.state_bits):
                flip = init[i] == 1
                name = f"{mp.name}.state.__bit{i}"
                plan = _LatchPlan(name, flip,
                                  doc.add_latch(name + (".__neg" if flip else "")))
                mp.latches.append(plan)
            monitor_plans.append(mp)

    memo: dict[bx.BoolExpr, int] = {}
    for name, expr in model.defines:
        signals[name] = _bexpr_to_lit(aig, expr, signals, memo)

    for plan, next_expr in latch_plans:
        next_lit = _bexpr_to_lit(aig, next_expr, signals, memo)
        doc.set_latch_next(plan.lit, next_lit ^ 1 if plan.flip else next_lit)

    for mp in monitor_plans:
        monitor = mp.monitor
        prop_lits = {}
        for p in monitor.props:
            if p not in signals:
                raise CircuitError(
                    f"automaton proposition {p!r} is not a signal of the model")
            prop_lits[p] = signals[p]
        for i, plan in enumerate(mp.latches):
            next_lit = FALSE_LIT
            for src in range(monitor.n_states):
                src_eq = mp.state_eq(aig, src)
                for label, dst in monitor.table[src]:
                    if (dst >> i) & 1:
                        step = aig.and_(src_eq, _label_lit(aig, label, prop_lits))
                        next_lit = aig.or_(next_lit, step)
            doc.set_latch_next(plan.lit, next_lit ^ 1 if plan.flip else next_lit)

    n_sys = len(sys_monitors)
    for mp in monitor_plans[:n_sys]:
        bad_lit = mp.states_pred(aig, mp.monitor.bad_states)
        doc.bad.append((bad_lit, f"{mp.name}_bad"))
    for mp in monitor_plans[n_sys:]:
        bad_lit = mp.states_pred(aig, mp.monitor.bad_states)
        doc.constraints.append((bad_lit ^ 1, f"{mp.name}_ok"))

    fair_lits = [mp.states_pred(aig, mp.monitor.fair_states)
                 for mp in monitor_plans[:n_sys]
                 if mp.monitor.fair_nontrivial]
    if len(fair_lits) == 1:
        doc.justice.append(([fair_lits[0]], "just"))
    elif len(fair_lits) > 1:
        just = _round_robin(doc, fair_lits)
        doc.justice.append(([just], "just"))

    doc.validate()
    return doc


def _round_robin(doc: AigerDoc, fair_lits: list[int]) -> int:
    """Counter awaiting each fair signal in turn; emits just on wraparound."""
    aig = doc.aig
    n = len(fair_lits)
    width = (n - 1).bit_length()
    bits: list[int] = []
    for i in range(width):
        bits.append(doc.add_latch(f"counting_justice.__bit{i}"))

    def value_eq(v: int) -> int:
        return aig.and_many(bits[i] if (v >> i) & 1 else bits[i] ^ 1
                            for i in range(width))

    for i in range(width):
        next_i = FALSE_LIT
        for v in range(n):
            stay_bit = (v >> i) & 1
            advance_bit = (((v + 1) % n) >> i) & 1
            bit_next = aig.ite_(fair_lits[v], advance_bit, stay_bit)
            next_i = aig.or_(next_i, aig.and_(value_eq(v), bit_next))
        doc.set_latch_next(bits[i], next_i)
    return aig.and_(value_eq(n - 1), fair_lits[n - 1])
