"""Format-level rewrites: bounded liveness-to-safety and justice reversal.

``justice_to_safety`` turns an extended document (bad / constraint /
justice sections) into an old-format single-output safety game: the
recurrence obligation on the justice literal is replaced by a window of
length k, enforced by a saturating counter of steps since the literal
last held.  ``reverse_justice`` rewrites a synthesized model so that a
standard existential fair-trace search witnesses the reversed-polarity
justice violations.
"""

from __future__ import annotations

from .aiger import AigerDoc, FALSE_LIT, TRUE_LIT


class TransformError(Exception):
    pass


def _single_justice_literal(doc: AigerDoc) -> int:
    if len(doc.justice) != 1 or len(doc.justice[0][0]) != 1:
        raise TransformError(
            f"expected exactly one one-literal justice group, found "
            f"{[len(g) for g, _ in doc.justice]}")
    return doc.justice[0][0][0]


def _copy_without_properties(doc: AigerDoc, fmt: str) -> AigerDoc:
    return AigerDoc(aig=doc.aig.copy(), inputs=list(doc.inputs),
                    latches=list(doc.latches), outputs=[],
                    bad=[], constraints=[], justice=[], fmt=fmt,
                    comments=list(doc.comments))


def _fresh_name(doc: AigerDoc, base: str) -> str:
    taken = {n for _, n in doc.inputs if n is not None}
    taken |= {n for _, _, n in doc.latches if n is not None}
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def fold_constraints_into_bad(doc: AigerDoc) -> AigerDoc:
    """Old-format view of a justice-free extended document.

    The single output raises when some bad literal holds while the
    constraints have held at every step up to and including this one.
    """
    if doc.justice:
        raise TransformError("document still has a justice section")
    new = _copy_without_properties(doc, "old")
    aig = new.aig
    inv_now = aig.and_many(lit for lit, _ in doc.constraints)
    bad_now = aig.or_many(lit for lit, _ in doc.bad)
    env_ok = _env_ok_latch(new, inv_now)
    out = aig.and_many([env_ok, inv_now, bad_now])
    new.outputs.append((out, "bad"))
    new.validate()
    return new


def _env_ok_latch(doc: AigerDoc, inv_now: int) -> int:
    """Latch tracking that the constraints held at every earlier step.

    AIGER latches start at 0, so the stored bit is the negation
    ("constraints already broken").
    """
    broken = doc.add_latch("env_broken")
    doc.set_latch_next(broken, doc.aig.or_(broken, inv_now ^ 1))
    return broken ^ 1


def justice_to_safety(doc: AigerDoc, k: int) -> AigerDoc:
    """Replace the recurrence objective by a k-step window.

    A saturating counter counts steps since the justice literal last
    held; the single output raises when the constraints have held so
    far (including the current step) and either an original bad literal
    holds or the counter exceeds k.  The counter saturates at k+1
    rather than wrapping.
    """
    if k < 0:
        raise TransformError(f"window length must be nonnegative, got {k}")
    if doc.outputs:
        raise TransformError("document already has outputs")
    just = _single_justice_literal(doc)

    new = _copy_without_properties(doc, "old")
    aig = new.aig

    width = (k + 1).bit_length()  # ceil(log2(k + 2)) bits for values 0 .. k+1
    bits = [new.add_latch(f"justice_wait.__bit{i}") for i in range(width)]

    def counter_eq(value: int) -> int:
        return aig.and_many(bits[i] if (value >> i) & 1 else bits[i] ^ 1
                            for i in range(width))

    at_top = counter_eq(k + 1)
    # incremented value, ripple carry
    inc_bits = []
    carry = TRUE_LIT
    for i in range(width):
        inc_bits.append(aig.xor_(bits[i], carry))
        carry = aig.and_(bits[i], carry)
    for i in range(width):
        held = aig.ite_(at_top, bits[i], inc_bits[i])
        new.set_latch_next(bits[i], aig.and_(just ^ 1, held))

    inv_now = aig.and_many(lit for lit, _ in doc.constraints)
    bad_now = aig.or_many(lit for lit, _ in doc.bad)
    env_ok = _env_ok_latch(new, inv_now)
    over_window = at_top
    out = aig.and_many([env_ok, inv_now, aig.or_(bad_now, over_window)])
    new.outputs.append((out, "bad"))
    new.validate()
    return new


def reverse_justice(doc: AigerDoc, just: int | None = None,
                    constraints: list[int] | None = None) -> AigerDoc:
    """Swap the justice polarity of a closed model for fair-trace search.

    Adds an uncontrollable input ``aux`` and a three-state watcher:
    waiting until aux first holds, then checking, then dead once the
    original justice literal holds during checking.  The new justice
    literal marks checking steps where the original literal is low, so
    an (inputs-existential) fair trace of the result projects onto a
    trace of the model whose original literal eventually stays low, and
    vice versa for traces keeping the constraints true.
    """
    if just is None:
        just = _single_justice_literal(doc)
    if constraints is None:
        constraints = [lit for lit, _ in doc.constraints]

    new = AigerDoc(aig=doc.aig.copy(), inputs=list(doc.inputs),
                   latches=list(doc.latches), outputs=list(doc.outputs),
                   bad=list(doc.bad),
                   constraints=[(lit, name) for lit, name in doc.constraints],
                   justice=[], fmt="new", comments=list(doc.comments))
    aig = new.aig
    aux = new.add_input(_fresh_name(new, "aux"))
    armed = new.add_latch(_fresh_name(new, "aux_seen"))
    dead = new.add_latch(_fresh_name(new, "just_seen_after_aux"))
    new.set_latch_next(armed, aig.or_(armed, aux))
    new.set_latch_next(dead, aig.or_(dead, aig.and_(armed, just)))
    checking = aig.and_(armed, dead ^ 1)
    new_just = aig.and_(checking, just ^ 1)
    new.justice.append(([new_just], "just_reversed"))
    new.validate()
    return new
