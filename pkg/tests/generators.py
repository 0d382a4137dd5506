"""Seeded random machine generators.

The scheduled-stack generator builds machines that are unitary for every
word by construction: each (read, top) block is a random complex isometry
from the non-halting states into a target set, and each target state owns a
fixed head move, so amplitudes never cross between head displacements.
States scheduled to pop are excluded as targets while the bottom symbol is
exposed, and the number of popping states never exceeds the number of
halting states so the isometries always fit.
"""

from __future__ import annotations

import random

from qpag.model import (
    EPSILON,
    POP,
    InputAlphabet,
    MachineQCPDA,
    StackAlphabet,
    StackOp,
    TransitionQCPDA,
    push,
)

ALPHA = InputAlphabet(symbols=("<", "0", "1", ">"), left_end="<", right_end=">")


def gram_schmidt_columns(rng: random.Random, rows: int, cols: int):
    """cols orthonormal vectors in C^rows (requires cols <= rows)."""
    assert cols <= rows
    basis: list[list[complex]] = []
    while len(basis) < cols:
        v = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(rows)]
        for u in basis:
            ip = sum(x.conjugate() * y for x, y in zip(u, v))
            v = [y - ip * x for x, y in zip(u, v)]
        norm = sum(abs(x) ** 2 for x in v) ** 0.5
        if norm < 1e-6:
            continue  # degenerate draw, try again
        basis.append([x / norm for x in v])
    return basis


# stack-op pools; each machine uses one pool so a branch frontier at budget
# t stays within 2**t
_OP_POOLS = (
    (EPSILON,),
    (EPSILON, push("x")),
    (EPSILON, POP),
    (push("x"), POP),
    (push("x", "x"), POP),
)


def random_qcpda(seed: int) -> MachineQCPDA:
    rng = random.Random(f"qcpda|{seed}")
    n_states = rng.choice((2, 3, 4))
    names = tuple(f"t{i}" for i in range(n_states))
    n_halting = rng.choice((0, 1, 2))
    n_halting = min(n_halting, n_states - 1)
    halting = list(names[n_states - n_halting :]) if n_halting else []
    accepting = frozenset(halting[: (len(halting) + 1) // 2])
    rejecting = frozenset(halting[(len(halting) + 1) // 2 :])
    live = [q for q in names if q not in accepting and q not in rejecting]

    pool = _OP_POOLS[rng.randrange(len(_OP_POOLS))]
    uses_stack = any(op.kind != "epsilon" for op in pool)
    gamma = StackAlphabet(symbols=("Z", "x") if uses_stack else ("Z",), bottom="Z")

    # schedule ops; pops may not outnumber halting states so that non-pop
    # targets still cover every source on the bottom symbol
    sigma = {}
    pop_budget = len(halting)
    for q in live:
        op = pool[rng.randrange(len(pool))]
        if op.kind == "pop" and pop_budget == 0:
            op = next(o for o in pool if o.kind != "pop")
        if op.kind == "pop":
            pop_budget -= 1
        sigma[q] = op

    move_of = {q: rng.randrange(2) for q in names}

    trans = []
    for read in ALPHA.symbols:
        for top in gamma.symbols:
            targets = [
                q
                for q in names
                if not (top == "Z" and sigma.get(q, EPSILON).kind == "pop")
            ]
            cols = gram_schmidt_columns(rng, len(targets), len(live))
            for j, src in enumerate(live):
                for i, tgt in enumerate(targets):
                    amp = cols[j][i]
                    trans.append(
                        TransitionQCPDA(src, read, top, tgt, move_of[tgt], amp)
                    )
    return MachineQCPDA(
        states=names,
        input_alphabet=ALPHA,
        stack_alphabet=gamma,
        transitions=tuple(trans),
        sigma=tuple(sorted(sigma.items())),
        initial=names[0],
        accepting=accepting,
        rejecting=rejecting,
    )


def words_up_to(length: int, symbols=("0", "1")):
    """Every word over ``symbols`` of length 0..length, shortest first."""
    out = [()]
    frontier = [()]
    for _ in range(length):
        frontier = [w + (s,) for w in frontier for s in symbols]
        out.extend(frontier)
    return out


def random_word(rng: random.Random, symbols, max_len: int):
    return tuple(rng.choice(symbols) for _ in range(rng.randrange(max_len + 1)))
