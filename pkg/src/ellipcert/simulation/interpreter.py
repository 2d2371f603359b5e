"""
Concrete interpreter for unrolled loop programs.

Instructions run by their assignment definitions, never through their
matrices, so that the interpreter is an independent witness of the
matrix semantics. States are joint (y, x) rows; many initial states run
side by side as the rows of one array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ellipcert.program.ir import CopyToY, Mac, Program, ResetX, x_slot, y_slot
from ellipcert.shared.exceptions import InvalidInputError

States = NDArray[np.float64]


@dataclass(frozen=True)
class Trace:
    """
    Joint states of one execution.

    ``states[0]`` is the initial state; ``states[1 + c * m + k]`` is the
    state after instruction k of cycle c, m the body length.
    """

    states: States
    body_length: int

    @property
    def cycles(self) -> int:
        if self.body_length == 0:
            return 0
        return (len(self.states) - 1) // self.body_length

    def after(self, cycle: int, k: int) -> NDArray[np.float64]:
        return self.states[1 + cycle * self.body_length + k]

    def loop_heads(self) -> States:
        """State at the loop head before each cycle, plus the final state."""
        if self.body_length == 0:
            return self.states[:1]
        return self.states[:: self.body_length]


def execute(instr: CopyToY | ResetX | Mac, states: States, n: int) -> None:
    """Run one instruction in place on every row of ``states``."""
    match instr:
        case CopyToY(i=i):
            states[:, y_slot(i, n)] = states[:, x_slot(i, n)]
        case ResetX(i=i):
            states[:, x_slot(i, n)] = 0.0
        case Mac(i=i, j=j, a=coef):
            states[:, x_slot(i, n)] += coef * states[:, y_slot(j, n)]


def initial_states(p: Program, x0: ArrayLike) -> States:
    """
    Joint states (y = 0, x = x0) for one or many x0 rows.

    Raises:
        InvalidInputError: wrong width, or some |x0_i| exceeds init_box_i
    """
    xs = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    if xs.ndim != 2 or xs.shape[1] != p.n:
        raise InvalidInputError(f"initial x must have {p.n} entries, got {xs.shape}")
    if not np.all(np.isfinite(xs)):
        raise InvalidInputError("initial x has non-finite entries")
    outside = np.abs(xs) > p.box
    if np.any(outside):
        row, col = np.argwhere(outside)[0]
        raise InvalidInputError(
            f"initial x{col + 1} = {xs[row, col]:.6g} is outside the box "
            f"|x{col + 1}| <= {p.box[col]:.6g}",
            field="x0",
        )
    states = np.zeros((xs.shape[0], p.dim))
    states[:, p.n :] = xs
    return states


def run(p: Program, x0: ArrayLike, cycles: int) -> Trace:
    """
    Execute ``cycles`` loop iterations from (y = 0, x = x0).

    Raises:
        InvalidInputError: x0 outside the initial box or negative cycles
    """
    if cycles < 0:
        raise InvalidInputError("cycles must be non-negative")
    state = initial_states(p, x0)
    if state.shape[0] != 1:
        raise InvalidInputError("run takes a single initial state")
    recorded = [state[0].copy()]
    for _ in range(cycles):
        for instr in p.body:
            execute(instr, state, p.n)
            recorded.append(state[0].copy())
    return Trace(states=np.array(recorded), body_length=len(p.body))
