"""Independent oracles the production code is tested against.

Everything here is written from the model's definition alone, favouring
obviousness over speed: no pruning, no early stopping, no shared helpers
with the package internals beyond the plain machine dataclasses.
"""

from __future__ import annotations

from collections import defaultdict


def ref_run_qpag(machine, word, max_steps):
    """Brute-force state-vector evolution.

    Returns (p_acc, p_rej, p_non, truncation) where truncation counts only
    mass lost to undefined columns (the reference never prunes amplitudes).
    Configurations are (state, head, stack tuple, garbage tuple).
    """
    alpha = machine.input_alphabet
    tape = (alpha.left_end,) + tuple(word) + (alpha.right_end,)
    n = len(tape)
    table = defaultdict(list)
    for t in machine.transitions:
        table[(t.source, t.read, t.top)].append(t)

    psi = {(machine.initial, 0, (machine.stack_alphabet.bottom,), ()): 1 + 0j}
    p_acc = 0.0
    p_rej = 0.0
    parked = 0.0
    lost = 0.0
    for _ in range(max_steps):
        nxt = defaultdict(complex)
        for (state, head, stack, garbage), amp in sorted(psi.items()):
            if head >= n:
                parked += abs(amp) ** 2
                continue
            rows = table.get((state, tape[head], stack[-1]))
            if not rows:
                lost += abs(amp) ** 2
                continue
            for t in rows:
                if t.op.kind == "push":
                    s2, g2 = stack + t.op.payload, garbage
                elif t.op.kind == "pop":
                    s2, g2 = stack[:-1], garbage + (stack[-1],)
                else:
                    s2, g2 = stack, garbage
                nxt[(t.target, head + t.move, s2, g2)] += amp * t.amp
        psi = {}
        for key in sorted(nxt):
            amp = nxt[key]
            state = key[0]
            if state in machine.accepting:
                p_acc += abs(amp) ** 2
            elif state in machine.rejecting:
                p_rej += abs(amp) ** 2
            else:
                psi[key] = amp
        if not psi:
            break
    live = sum(abs(a) ** 2 for _, a in sorted(psi.items()))
    return p_acc, p_rej, parked + live, lost


def ref_wcwr_member(word) -> bool:
    """Membership in { u c reverse(u) : u over {a,b} } by direct splitting."""
    w = "".join(word)
    if w.count("c") != 1:
        return False
    u, v = w.split("c")
    return set(u) <= {"a", "b"} and v == u[::-1]


def ref_parity_outcome(w1: str, w2: str, w3: str):
    """(p_acc, p_rej) for the three-segment parity machine, from the sign
    rule: accept iff the two reversed-comparison difference parities differ."""
    d1 = sum(1 for x, y in zip(w1, w2[::-1]) if x != y)
    d2 = sum(1 for x, y in zip(w1, w3[::-1]) if x != y)
    acc = ((-1) ** d1 - (-1) ** d2) / 2
    rej = ((-1) ** d1 + (-1) ** d2) / 2
    return acc * acc, rej * rej


def ref_classify(w1: str, w2: str, w3: str) -> str:
    d1 = sum(1 for x, y in zip(w1, w2[::-1]) if x != y)
    d2 = sum(1 for x, y in zip(w1, w3[::-1]) if x != y)
    return "yes" if (d1 % 2) != (d2 % 2) else "no"


def ref_step_matrix(machine, word, depth):
    """The one-step evolution matrix over configurations reachable within
    ``depth`` steps, as (configs, successor_configs, numpy matrix M) with
    M[i, j] = amplitude from configs[j] to row config i. Used to test step
    unitarity with plain linear algebra."""
    import numpy as np

    alpha = machine.input_alphabet
    tape = (alpha.left_end,) + tuple(word) + (alpha.right_end,)
    n = len(tape)
    table = defaultdict(list)
    for t in machine.transitions:
        table[(t.source, t.read, t.top)].append(t)

    def successors(conf):
        state, head, stack, garbage = conf
        if head >= n:
            return None  # parked
        rows = table.get((state, tape[head], stack[-1]))
        if not rows:
            return []  # undefined column
        out = []
        for t in rows:
            if t.op.kind == "push":
                s2, g2 = stack + t.op.payload, garbage
            elif t.op.kind == "pop":
                s2, g2 = stack[:-1], garbage + (stack[-1],)
            else:
                s2, g2 = stack, garbage
            out.append(((t.target, head + t.move, s2, g2), t.amp))
        return out

    start = (machine.initial, 0, (machine.stack_alphabet.bottom,), ())
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for conf in sorted(frontier):
            succs = successors(conf)
            if not succs:
                continue
            for succ, _ in succs:
                if succ not in seen:
                    seen.add(succ)
                    nxt.append(succ)
        frontier = nxt
        if not frontier:
            break

    sources = []
    images = []
    for conf in sorted(seen):
        succs = successors(conf)
        if succs is None or succs == []:
            continue  # parked or undefined: not part of the checked block
        sources.append(conf)
        images.append(succs)
    targets = sorted({succ for img in images for succ, _ in img})
    index = {c: i for i, c in enumerate(targets)}
    mat = np.zeros((len(targets), len(sources)), dtype=complex)
    for j, img in enumerate(images):
        for succ, amp in img:
            mat[index[succ], j] += amp
    return sources, targets, mat
