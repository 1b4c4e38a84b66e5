"""Symbolic Mealy games over AIGER documents and strategy extraction.

The objective is the conjunction of a weak-until safety part and an
invariant-relativized recurrence part: the system loses a play iff bad
is raised while the constraints have held at every step up to and
including that one, or the constraints hold forever while the justice
literal is raised only finitely often.  The environment moves first
(Mealy), so the controllable predecessor quantifies controllables
existentially inside a universal over uncontrollables; a step where the
constraints fail is immediately winning for the system even if bad is
raised at the same step.

A game owns one decision-diagram manager and solves single-threaded;
independent games may run in parallel on their own managers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aiger import AigerDoc, CONTROLLABLE_PREFIX, lit_var
from .bdd import AigCone, BddManager, BddRef


class GameError(Exception):
    pass


DELAY_LATCH_NAME = "__just_delay"


def justice_depends_on_inputs(doc: AigerDoc) -> bool:
    jlit = doc.justice_literal()
    if jlit is None:
        return False
    input_vars = {lit_var(lit) for lit, _ in doc.inputs}
    seen: set[int] = set()
    stack = [lit_var(jlit)]
    while stack:
        var = stack.pop()
        if var in seen:
            continue
        seen.add(var)
        if var in input_vars:
            return True
        if doc.aig.is_and(var):
            rhs0, rhs1 = doc.aig.and_node(var)
            stack.extend((lit_var(rhs0), lit_var(rhs1)))
    return False


def delay_justice(doc: AigerDoc) -> AigerDoc:
    """Route the justice literal through a fresh latch so it is state-based.

    Recurring infinitely often is insensitive to a one-step delay.
    """
    jlit = doc.justice_literal()
    if jlit is None:
        raise GameError("document has no justice literal to delay")
    new = AigerDoc(aig=doc.aig.copy(), inputs=list(doc.inputs),
                   latches=list(doc.latches), outputs=list(doc.outputs),
                   bad=list(doc.bad), constraints=list(doc.constraints),
                   justice=[], fmt=doc.fmt, comments=list(doc.comments))
    lit = new.add_latch(DELAY_LATCH_NAME, next_lit=jlit)
    new.justice.append(([lit], doc.justice[0][1]))
    new.validate()
    return new


@dataclass
class Game:
    mgr: BddManager
    doc: AigerDoc
    latch_names: list[str]
    u_names: list[str]
    c_names: list[str]
    latch_levels: list[int]
    u_levels: list[int]
    c_levels: list[int]
    delta: dict[int, BddRef]  # latch level -> next-state function over (L,U,C)
    bad: BddRef
    inv: BddRef
    just: BddRef
    init: BddRef


def build_game(doc: AigerDoc) -> Game:
    """Interpret a document as a game; inputs partition by name prefix.

    Old-format documents play the pure safety game over the disjunction
    of their outputs.  If the justice cone touches input variables the
    document is first rewritten with a delay latch, so ``just`` is a
    state predicate; the game carries the rewritten document.
    """
    if len(doc.justice) > 1:
        raise GameError("multiple justice groups are not supported")
    if doc.justice and len(doc.justice[0][0]) != 1:
        raise GameError("justice groups must hold exactly one literal")
    if justice_depends_on_inputs(doc):
        doc = delay_justice(doc)

    mgr = BddManager()
    var_map: dict[int, BddRef] = {}
    latch_names, latch_levels = [], []
    u_names, u_levels = [], []
    c_names, c_levels = [], []
    for lit, next_lit, name in doc.latches:
        ref = mgr.add_var(name or f"latch{len(latch_names)}")
        var_map[lit_var(lit)] = ref
        latch_names.append(name or f"latch{len(latch_names)}")
        latch_levels.append(ref.level)
    for i, (lit, name) in enumerate(doc.inputs):
        controllable = name is not None and name.startswith(CONTROLLABLE_PREFIX)
        if controllable:
            continue
        ref = mgr.add_var(name or f"input{i}")
        var_map[lit_var(lit)] = ref
        u_names.append(name or f"input{i}")
        u_levels.append(ref.level)
    for i, (lit, name) in enumerate(doc.inputs):
        controllable = name is not None and name.startswith(CONTROLLABLE_PREFIX)
        if not controllable:
            continue
        ref = mgr.add_var(name)
        var_map[lit_var(lit)] = ref
        c_names.append(name)
        c_levels.append(ref.level)

    cone = AigCone(mgr, doc, var_map)
    delta = {}
    for (lit, next_lit, _), lvl in zip(doc.latches, latch_levels):
        delta[lvl] = cone.lit(next_lit)
    if doc.fmt == "old":
        bad = mgr.false
        for lit, _ in doc.outputs:
            bad = bad | cone.lit(lit)
        inv = mgr.true
        just = mgr.true
    else:
        bad = mgr.false
        for lit, _ in doc.bad:
            bad = bad | cone.lit(lit)
        inv = mgr.true
        for lit, _ in doc.constraints:
            inv = inv & cone.lit(lit)
        jlit = doc.justice_literal()
        just = cone.lit(jlit) if jlit is not None else mgr.true

    init = mgr.true
    for lvl in latch_levels:
        init = init & ~mgr.var(lvl)

    return Game(mgr=mgr, doc=doc, latch_names=latch_names, u_names=u_names,
                c_names=c_names, latch_levels=latch_levels, u_levels=u_levels,
                c_levels=c_levels, delta=delta, bad=bad, inv=inv, just=just,
                init=init)


def cpre(game: Game, target: BddRef) -> BddRef:
    """States from which, for every environment move, some system move
    either discharges the constraints now or avoids bad and enters the
    target."""
    moved = target.compose(game.delta)
    good = ~game.inv | (~game.bad & moved)
    return good.exists(game.c_levels).forall(game.u_levels)


def solve(game: Game) -> BddRef:
    """Winning region of the recurrence objective.

    Greatest fixpoint over Z of the least fixpoint over Y of
    cpre((just and Z) or Y); with a trivial justice literal this
    degenerates to the pure safety fixpoint.
    """
    z = game.mgr.true
    while True:
        core = game.just & z
        y = game.mgr.false
        while True:
            y_next = cpre(game, core | y)
            if y_next == y:
                break
            y = y_next
        if y == z:
            return z
        z = y


def mu_levels(game: Game, winning: BddRef) -> list[BddRef]:
    """Iterates of the final least fixpoint, from empty up to the region."""
    levels = [game.mgr.false]
    core = game.just & winning
    y = game.mgr.false
    while True:
        y_next = cpre(game, core | y)
        if y_next == y:
            break
        y = y_next
        levels.append(y)
    if y != winning:
        raise GameError("attractor iteration did not reproduce the region")
    return levels


def is_realizable(game: Game, winning: BddRef) -> bool:
    return winning.evaluate({lvl: False for lvl in range(game.mgr.var_count)})


@dataclass
class Strategy:
    winning: BddRef
    funcs: dict[str, BddRef]  # controllable input name -> function over (L, U)


def move_relation(game: Game, winning: BddRef) -> BddRef:
    """Nondeterministic winning moves, rank-respecting toward the justice core.

    From states in the i+1st attractor level difference the system
    moves into (just and W) or the ith level; discharged steps (inv
    false now) are always allowed.
    """
    levels = mu_levels(game, winning)
    core = game.just & winning
    rank_ok = game.mgr.false
    for i in range(len(levels) - 1):
        diff = levels[i + 1] & ~levels[i]
        target = core | levels[i]
        rank_ok = rank_ok | (diff & target.compose(game.delta))
    return ~game.inv | (~game.bad & rank_ok)


def extract_strategy(game: Game, winning: BddRef) -> Strategy:
    """Determinize the move relation controllable by controllable.

    Each bit resolves by cofactor comparison: pick 1 only where the
    positive cofactor is the single way to keep the relation
    satisfiable, otherwise 0; the resolved function substitutes into
    the relation before the next bit.
    """
    if not is_realizable(game, winning):
        raise GameError("cannot extract a strategy: initial state is losing")
    relation = move_relation(game, winning)
    funcs: dict[str, BddRef] = {}
    for idx, (name, lvl) in enumerate(zip(game.c_names, game.c_levels)):
        later = game.c_levels[idx + 1:]
        arena = relation.exists(later)
        can_true = arena.cofactor(lvl, True)
        can_false = arena.cofactor(lvl, False)
        func = can_true & ~can_false
        assert not (func.support() & set(game.c_levels))
        funcs[name] = func
        relation = relation.compose({lvl: func})
    return Strategy(winning=winning, funcs=funcs)


def strategy_to_circuit(doc: AigerDoc, game: Game, strategy: Strategy) -> AigerDoc:
    """Replace each controllable input by an AND-gate cone of its function.

    The cone is the Shannon expansion along the function's BDD, one
    hash-consed multiplexer per node; latch count is unchanged and the
    controllable inputs disappear from the input list.  Synthesized
    signals are additionally exposed as named outputs.
    """
    from .aiger import AigerDoc as Doc

    if len(doc.latches) != len(game.latch_levels) or \
            len(doc.uncontrollable_inputs()) != len(game.u_levels):
        raise GameError("document does not match the game it was solved as")
    new = Doc(fmt=doc.fmt, comments=list(doc.comments))
    aig = new.aig
    level_to_lit: dict[int, int] = {}
    var_sub: dict[int, int] = {0: 0}  # constants map to themselves

    c_by_name = {}
    for lit, name in doc.inputs:
        if name is not None and name.startswith(CONTROLLABLE_PREFIX):
            c_by_name[name] = lit

    for (lit, name), lvl in zip(
            [(l, n) for l, n in doc.inputs
             if n is None or not n.startswith(CONTROLLABLE_PREFIX)],
            game.u_levels):
        new_lit = new.add_input(name)
        var_sub[lit_var(lit)] = new_lit
        level_to_lit[lvl] = new_lit
    for (lit, next_lit, name), lvl in zip(doc.latches, game.latch_levels):
        new_lit = new.add_latch(name)
        var_sub[lit_var(lit)] = new_lit
        level_to_lit[lvl] = new_lit

    bdd_memo: dict[int, int] = {}

    def bdd_to_lit(ref: BddRef) -> int:
        if ref.is_false:
            return 0
        if ref.is_true:
            return 1
        cached = bdd_memo.get(ref.node)
        if cached is not None:
            return cached
        var_lit = level_to_lit[ref.level]
        result = aig.ite_(var_lit, bdd_to_lit(ref.high), bdd_to_lit(ref.low))
        bdd_memo[ref.node] = result
        return result

    for name, func in strategy.funcs.items():
        cone_lit = bdd_to_lit(func)
        var_sub[lit_var(c_by_name[name])] = cone_lit

    def map_lit(lit: int) -> int:
        return var_sub[lit_var(lit)] ^ (lit & 1)

    for var, rhs0, rhs1 in doc.aig.nodes():
        var_sub[var] = aig.and_(map_lit(rhs0), map_lit(rhs1))

    for i, (lit, next_lit, name) in enumerate(doc.latches):
        new.set_latch_next(var_sub[lit_var(lit)], map_lit(next_lit))
    new.outputs = [(map_lit(lit), name) for lit, name in doc.outputs]
    if doc.fmt == "new":
        # old-format outputs are all read as error signals, so the
        # synthesized functions are exposed only in the new format
        for name, func in strategy.funcs.items():
            plain = name[len(CONTROLLABLE_PREFIX):]
            new.outputs.append((var_sub[lit_var(c_by_name[name])], plain))
    new.bad = [(map_lit(lit), name) for lit, name in doc.bad]
    new.constraints = [(map_lit(lit), name) for lit, name in doc.constraints]
    new.justice = [([map_lit(lit) for lit in group], name)
                   for group, name in doc.justice]
    new.validate()
    return new


def synthesize(doc: AigerDoc) -> tuple[bool, AigerDoc | None, Game]:
    """Full solve-and-extract; returns (realizable, model, game)."""
    game = build_game(doc)
    winning = solve(game)
    if not is_realizable(game, winning):
        return False, None, game
    strategy = extract_strategy(game, winning)
    model = strategy_to_circuit(game.doc, game, strategy)
    return True, model, game
