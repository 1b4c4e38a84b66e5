"""Büchi automata in the GFF file format, validation, and monitor compilation.

The GFF subset honored here: ``stateSet/state`` (document order fixes
the state encoding), ``initialStateSet``, ``transitionSet/transition``
with ``from``/``to``/``label`` children, an ``alphabet`` of
propositions, and ``acc type="buchi"``.  Labels are either ``True`` or
a space-separated conjunction of literals with ``~`` for negation.
Unknown elements are ignored with a warning.

Validation completes an automaton with a rejecting trap state, checks
determinism, optionally complements by swapping the acceptance set, and
enforces the per-role restrictions: guarantees must be deterministic,
assumptions must describe safety properties.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from itertools import combinations, product

log = logging.getLogger(__name__)

KNOWN_ELEMENTS = {
    "structure", "alphabet", "prop", "stateSet", "state",
    "initialStateSet", "stateID", "transitionSet", "transition",
    "from", "to", "label", "acc", "name", "description", "formula",
    "properties",
}

TRAP_ID = "__trap"


class AutomatonError(Exception):
    pass


@dataclass(frozen=True)
class Label:
    """Conjunction of literals; both sets empty means True."""

    pos: frozenset[str] = frozenset()
    neg: frozenset[str] = frozenset()

    def __post_init__(self):
        clash = self.pos & self.neg
        if clash:
            raise AutomatonError(
                f"label uses {sorted(clash)} both positively and negatively")

    @property
    def is_true(self) -> bool:
        return not self.pos and not self.neg

    def props(self) -> frozenset[str]:
        return self.pos | self.neg

    def overlaps(self, other: "Label") -> bool:
        """True when some assignment satisfies both conjunctions."""
        return not (self.pos & other.neg) and not (self.neg & other.pos)

    def matches(self, assignment: dict[str, bool]) -> bool:
        return all(assignment[p] for p in self.pos) and \
            not any(assignment[p] for p in self.neg)

    def __str__(self) -> str:
        if self.is_true:
            return "True"
        lits = sorted(self.pos) + ["~" + p for p in sorted(self.neg)]
        return " ".join(lits)


def parse_label(text: str | None) -> Label:
    text = (text or "").strip()
    if text in ("True", "true", ""):
        return Label()
    pos: set[str] = set()
    neg: set[str] = set()
    for tok in text.split():
        if tok in ("True", "true"):
            raise AutomatonError(f"cannot mix True with literals: {text!r}")
        if tok.startswith("~"):
            name = tok[1:]
            target = neg
        else:
            name = tok
            target = pos
        if not name or not all(c.isalnum() or c in "_." for c in name):
            raise AutomatonError(f"unparsable label literal {tok!r}")
        target.add(name)
    return Label(pos=frozenset(pos), neg=frozenset(neg))


@dataclass(frozen=True)
class BuchiAutomaton:
    states: tuple[str, ...]  # document order
    initial: str
    alphabet_props: frozenset[str]
    transitions: tuple[tuple[str, Label, str], ...]
    accepting: frozenset[str]

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise AutomatonError("duplicate state ids")
        if self.initial not in self.states:
            raise AutomatonError(f"initial state {self.initial!r} undeclared")
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise AutomatonError(f"transition {src}->{dst} uses unknown state")
            extra = label.props() - self.alphabet_props
            if extra:
                raise AutomatonError(
                    f"transition {src}->{dst} uses propositions outside the "
                    f"alphabet: {sorted(extra)}")

    def outgoing(self, state: str) -> list[tuple[Label, str]]:
        return [(label, dst) for src, label, dst in self.transitions
                if src == state]

    def run(self, word: list[dict[str, bool]]) -> list[str]:
        """The unique run on a word; requires determinism and completeness."""
        state = self.initial
        visited = [state]
        for letter in word:
            enabled = [dst for label, dst in self.outgoing(state)
                       if label.matches(letter)]
            if len(enabled) != 1:
                raise AutomatonError(
                    f"state {state!r} has {len(enabled)} enabled transitions "
                    f"for {letter}")
            state = enabled[0]
            visited.append(state)
        return visited


def parse_gff(text: str) -> BuchiAutomaton:
    """Parse a GFF (XML) automaton description."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise AutomatonError(f"malformed XML: {exc}") from None
    for elem in root.iter():
        if elem.tag not in KNOWN_ELEMENTS:
            log.warning("ignoring unknown GFF element <%s>", elem.tag)

    states: list[str] = []
    for st in root.iter("state"):
        sid = st.get("sid")
        if sid is None:
            raise AutomatonError("<state> without sid attribute")
        states.append(sid)

    initial_ids = [sid.text.strip()
                   for iss in root.iter("initialStateSet")
                   for sid in iss.iter("stateID") if sid.text]
    if len(initial_ids) != 1:
        raise AutomatonError(
            f"expected exactly one initial state, found {len(initial_ids)}")

    props: set[str] = set()
    for p in root.iter("prop"):
        if p.text and p.text.strip():
            props.add(p.text.strip())

    transitions: list[tuple[str, Label, str]] = []
    for tr in root.iter("transition"):
        src = tr.findtext("from")
        dst = tr.findtext("to")
        if src is None or dst is None:
            raise AutomatonError("<transition> without <from>/<to>")
        label = parse_label(tr.findtext("label"))
        transitions.append((src.strip(), label, dst.strip()))
        props |= label.props()

    acc = root.find("acc")
    if acc is None:
        raise AutomatonError("missing <acc> element")
    acc_type = acc.get("type", "")
    if acc_type.lower() != "buchi":
        raise AutomatonError(f"unsupported acceptance type {acc_type!r}")
    accepting = frozenset(e.text.strip() for e in acc.iter("stateID") if e.text)

    return BuchiAutomaton(
        states=tuple(states),
        initial=initial_ids[0],
        alphabet_props=frozenset(props),
        transitions=tuple(transitions),
        accepting=accepting,
    )


# validation ----------------------------------------------------------


def _missing_cubes(labels: list[Label], props: list[str]) -> list[Label]:
    """Disjoint cubes over ``props`` matched by none of ``labels``."""

    def go(remaining: list[str], pos: frozenset[str], neg: frozenset[str],
           active: list[Label]) -> list[Label]:
        if not active:
            return [Label(pos=pos, neg=neg)]
        if any(l.pos <= pos and l.neg <= neg for l in active):
            return []
        for p in remaining:
            if any(p in l.props() for l in active):
                rest = [q for q in remaining if q != p]
                out = []
                sub = [l for l in active if p not in l.neg]
                out += go(rest, pos | {p}, neg, sub)
                sub = [l for l in active if p not in l.pos]
                out += go(rest, pos, neg | {p}, sub)
                return out
        # no active label constrains the remaining props, none satisfied fully
        raise AssertionError("unreachable: undecided labels without free props")

    return go(list(props), frozenset(), frozenset(), list(labels))


def complete(aut: BuchiAutomaton) -> BuchiAutomaton:
    """Add a rejecting trap with a True self-loop for all missing letters.

    The trap is always materialized first and pruned again when no
    other state can reach it.
    """
    trap = TRAP_ID
    k = 0
    while trap in aut.states:
        k += 1
        trap = f"{TRAP_ID}{k}"
    props = sorted(aut.alphabet_props)
    transitions = list(aut.transitions)
    trap_used = False
    for state in aut.states:
        labels = [label for label, _ in aut.outgoing(state)]
        for cube in _missing_cubes(labels, props):
            transitions.append((state, cube, trap))
            trap_used = True
    if not trap_used:
        return aut
    transitions.append((trap, Label(), trap))
    return BuchiAutomaton(
        states=aut.states + (trap,),
        initial=aut.initial,
        alphabet_props=aut.alphabet_props,
        transitions=tuple(transitions),
        accepting=aut.accepting,
    )


def check_deterministic(aut: BuchiAutomaton) -> None:
    for state in aut.states:
        out = aut.outgoing(state)
        for (l1, d1), (l2, d2) in combinations(out, 2):
            if l1.overlaps(l2):
                raise AutomatonError(
                    f"nondeterministic: state {state!r} enables both "
                    f"[{l1}] -> {d1} and [{l2}] -> {d2}; determinize the "
                    f"automaton offline and retry")


def _find_trap(aut: BuchiAutomaton) -> str | None:
    for state in aut.states:
        if state in aut.accepting:
            continue
        out = aut.outgoing(state)
        if len(out) == 1 and out[0][0].is_true and out[0][1] == state:
            return state
    return None


def _mixed_cycle(aut: BuchiAutomaton) -> list[str] | None:
    """A cycle containing both accepting and rejecting states, if any."""
    sccs = _strongly_connected(aut)
    for scc in sccs:
        if len(scc) == 1:
            s = next(iter(scc))
            if not any(dst == s for _, dst in aut.outgoing(s)):
                continue
        kinds = {s in aut.accepting for s in scc}
        if len(kinds) == 2:
            return sorted(scc)
    return None


def _strongly_connected(aut: BuchiAutomaton) -> list[set[str]]:
    # iterative Tarjan
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[set[str]] = []
    counter = 0
    succ = {s: [dst for _, dst in aut.outgoing(s)] for s in aut.states}

    for root in aut.states:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            for i in range(pi, len(succ[node])):
                w = succ[node][i]
                if w not in index:
                    work[-1] = (node, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                scc: set[str] = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.add(w)
                    if w == node:
                        break
                sccs.append(scc)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return sccs


def _reachable(aut: BuchiAutomaton, frontier: set[str]) -> set[str]:
    seen = set(frontier)
    todo = list(frontier)
    while todo:
        s = todo.pop()
        for _, dst in aut.outgoing(s):
            if dst not in seen:
                seen.add(dst)
                todo.append(dst)
    return seen


def _prune_unreachable_trap(aut: BuchiAutomaton) -> BuchiAutomaton:
    trap = _find_trap(aut)
    if trap is None:
        return aut
    reachable = _reachable(aut, {aut.initial})
    if trap in reachable:
        return aut
    return BuchiAutomaton(
        states=tuple(s for s in aut.states if s != trap),
        initial=aut.initial,
        alphabet_props=aut.alphabet_props,
        transitions=tuple((s, l, d) for s, l, d in aut.transitions
                          if s != trap and d != trap),
        accepting=aut.accepting,
    )


def check_safety(aut: BuchiAutomaton, what: str) -> None:
    """Safety shape: acceptance only ever stops by falling into the trap.

    Every state reachable from an accepting state must be accepting or
    the unique trap, and the only cycle through rejecting states is the
    trap self-loop.
    """
    trap = _find_trap(aut)
    for src, _, dst in aut.transitions:
        if src in aut.accepting and dst not in aut.accepting and dst != trap:
            raise AutomatonError(
                f"{what}: accepting state {src!r} steps to rejecting "
                f"non-trap state {dst!r}, so this is not a safety property")
    for scc in _strongly_connected(aut):
        rejecting = {s for s in scc if s not in aut.accepting and s != trap}
        if not rejecting:
            continue
        has_cycle = len(scc) > 1 or any(
            dst in scc for s in scc for _, dst in aut.outgoing(s))
        if has_cycle:
            raise AutomatonError(
                f"{what}: cycle through rejecting state(s) "
                f"{sorted(rejecting)}, so this is not a safety property")


def validate_for_role(aut: BuchiAutomaton, role: str,
                      negated: bool = False) -> BuchiAutomaton:
    """Complete, determinism-check, optionally complement, enforce role.

    ``role`` is "guarantee" or "assumption".  Negation swaps the
    acceptance set, which complements the language only for
    deterministic, complete automata without a cycle mixing accepting
    and rejecting states; anything else is rejected.
    """
    if role not in ("guarantee", "assumption"):
        raise ValueError(f"unknown role {role!r}")
    aut = complete(aut)
    check_deterministic(aut)
    if negated:
        mixed = _mixed_cycle(aut)
        if mixed is not None:
            raise AutomatonError(
                f"cannot negate by acceptance swap: the cycle through "
                f"{mixed} mixes accepting and rejecting states, so the "
                f"swapped automaton would not recognize the complement")
        aut = BuchiAutomaton(
            states=aut.states,
            initial=aut.initial,
            alphabet_props=aut.alphabet_props,
            transitions=aut.transitions,
            accepting=frozenset(aut.states) - aut.accepting,
        )
        # the swap may have created a fresh trap or removed the old one
    aut = _prune_unreachable_trap(aut)
    if role == "assumption":
        check_safety(aut, "assumption")
    return aut


# monitors ------------------------------------------------------------


@dataclass(frozen=True)
class Monitor:
    """Binary-encoded deterministic automaton with bad/fair state sets.

    ``fair`` holds in accepting states; ``bad`` holds in rejecting
    states whose only behavior is a True self-loop (the completion
    trap).  ``bad`` states are sinks, so the flag is absorbing.
    """

    state_ids: tuple[str, ...]
    init_index: int
    props: tuple[str, ...]
    table: tuple[tuple[tuple[Label, int], ...], ...]
    bad_states: frozenset[int]
    fair_states: frozenset[int]

    @property
    def n_states(self) -> int:
        return len(self.state_ids)

    @property
    def state_bits(self) -> int:
        return max(self.n_states - 1, 0).bit_length()

    @property
    def init_code(self) -> tuple[int, ...]:
        return tuple((self.init_index >> i) & 1 for i in range(self.state_bits))

    def step(self, state: int, assignment: dict[str, bool]) -> int:
        enabled = [dst for label, dst in self.table[state]
                   if label.matches(assignment)]
        if len(enabled) != 1:
            raise AutomatonError(
                f"monitor state {state} has {len(enabled)} enabled moves")
        return enabled[0]

    def is_bad(self, state: int) -> bool:
        return state in self.bad_states

    def is_fair(self, state: int) -> bool:
        return state in self.fair_states

    @property
    def fair_nontrivial(self) -> bool:
        """True when some live (non-bad) state is not accepting."""
        return any(i not in self.fair_states and i not in self.bad_states
                   for i in range(self.n_states))


def to_monitor(aut: BuchiAutomaton) -> Monitor:
    """Encode a validated, deterministic, complete automaton.

    States are numbered in document order from 0 and packed into
    ceil(log2 n) bits.
    """
    props = sorted(aut.alphabet_props)
    index = {s: i for i, s in enumerate(aut.states)}
    for state in aut.states:
        labels = [l for l, _ in aut.outgoing(state)]
        if _missing_cubes(labels, props):
            raise AutomatonError(
                f"state {state!r} is not complete; validate the automaton first")
    check_deterministic(aut)
    table = tuple(
        tuple((label, index[dst]) for label, dst in aut.outgoing(state))
        for state in aut.states)
    bad = set()
    for state in aut.states:
        if state in aut.accepting:
            continue
        out = aut.outgoing(state)
        if len(out) == 1 and out[0][0].is_true and out[0][1] == state:
            bad.add(index[state])
    fair = frozenset(index[s] for s in aut.accepting)
    monitor = Monitor(
        state_ids=aut.states,
        init_index=index[aut.initial],
        props=tuple(props),
        table=table,
        bad_states=frozenset(bad),
        fair_states=fair,
    )
    assert not (monitor.bad_states & monitor.fair_states)
    return monitor


def enumerate_assignments(props) -> list[dict[str, bool]]:
    props = list(props)
    return [dict(zip(props, bits))
            for bits in product([False, True], repeat=len(props))]
