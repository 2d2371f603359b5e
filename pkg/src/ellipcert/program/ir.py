"""
Program representation for linear control loops.

A program is one fully unrolled iteration of the outer loop of
``x_{k+1} = A x_k``. Its state is the joint vector (y_1..y_n, x_1..x_n);
each instruction is a linear map on that vector. Loop guards carry no
state transformation once the loop is unrolled, so they are not
represented; loop indices survive only as program-point labels.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Annotated, Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ellipcert.linalg.matrixkit import Matrix, as_matrix
from ellipcert.shared.exceptions import InvalidInputError


_INSTRUCTION_CONFIG = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class CopyToY(BaseModel):
    """``y[i] := x[i]``"""

    model_config = _INSTRUCTION_CONFIG

    op: Literal["copy"] = "copy"
    i: int = Field(..., ge=1, description="1-based state index")

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.i,)

    def describe(self) -> str:
        return f"y[{self.i}] := x[{self.i}]"


class ResetX(BaseModel):
    """``x[i] := 0``"""

    model_config = _INSTRUCTION_CONFIG

    op: Literal["reset"] = "reset"
    i: int = Field(..., ge=1, description="1-based state index")

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.i,)

    def describe(self) -> str:
        return f"x[{self.i}] := 0"


class Mac(BaseModel):
    """``x[i] := x[i] + a * y[j]``"""

    model_config = _INSTRUCTION_CONFIG

    op: Literal["mac"] = "mac"
    i: int = Field(..., ge=1, description="1-based row index")
    j: int = Field(..., ge=1, description="1-based column index")
    a: float = Field(..., description="coefficient A[i, j]")

    @property
    def indices(self) -> tuple[int, ...]:
        return (self.i, self.j)

    def describe(self) -> str:
        return f"x[{self.i}] := x[{self.i}] + ({self.a:.6g}) * y[{self.j}]"


Instruction = Annotated[CopyToY | ResetX | Mac, Field(discriminator="op")]


class Program(BaseModel):
    """
    State dimension, state matrix, initial box, and the unrolled loop body.

    ``init_box[i]`` bounds |x_{i+1}| at program start; y starts at 0.
    """

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        allow_inf_nan=False,
        populate_by_name=True,
    )

    n: int = Field(..., ge=1, description="State dimension")
    a: list[list[float]] = Field(..., alias="A", description="Row-major n x n matrix")
    init_box: list[Annotated[float, Field(ge=0.0)]] = Field(
        ..., description="Bounds on |x_i| at program start"
    )
    body: list[Instruction] = Field(
        default_factory=list, description="One outer-loop iteration, unrolled"
    )

    @model_validator(mode="before")
    @classmethod
    def _default_init_box(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("init_box") is None and "n" in data:
            return {**data, "init_box": [1.0] * int(data["n"])}
        return data

    @model_validator(mode="after")
    def _check_shapes(self) -> Program:
        if len(self.a) != self.n or any(len(row) != self.n for row in self.a):
            raise ValueError(f"A must be {self.n}x{self.n}")
        if len(self.init_box) != self.n:
            raise ValueError(
                f"init_box must have {self.n} entries, got {len(self.init_box)}"
            )
        for k, instr in enumerate(self.body):
            bad = [idx for idx in instr.indices if idx > self.n]
            if bad:
                raise ValueError(
                    f"body[{k}] ({instr.op} {','.join(map(str, instr.indices))}) "
                    f"references index {bad[0]} but n = {self.n}"
                )
        return self

    @property
    def state_matrix(self) -> Matrix:
        return np.array(self.a, dtype=np.float64)

    @property
    def box(self) -> NDArray[np.float64]:
        return np.array(self.init_box, dtype=np.float64)

    @property
    def dim(self) -> int:
        """Dimension of the joint (y, x) state."""
        return 2 * self.n


# ============================================
# State Layout
# ============================================


def y_slot(i: int, n: int) -> int:
    """0-based position of y_i in the joint (y, x) vector."""
    _check_index(i, n)
    return i - 1


def x_slot(i: int, n: int) -> int:
    """0-based position of x_i in the joint (y, x) vector."""
    _check_index(i, n)
    return n + i - 1


def state_labels(n: int) -> list[str]:
    """Coordinate names in layout order: y1..yn, x1..xn."""
    return [f"y{i}" for i in range(1, n + 1)] + [f"x{i}" for i in range(1, n + 1)]


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise InvalidInputError(f"state index {i} out of range [1, {n}]")


# ============================================
# Operations
# ============================================


def canonical_program(a: ArrayLike, init_box: Sequence[float] | None = None) -> Program:
    """
    The flow-chart program for ``x_{k+1} = A x_k``.

    For each i: copy x_i to y_i and reset x_i; then for each (i, j) in
    row-major order accumulate A[i, j] * y_j into x_i.

    Raises:
        InvalidInputError: A is not square or has non-finite entries
    """
    mat = as_matrix(a, "A")
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise InvalidInputError(f"A must be square, got {mat.shape}", field="A")

    body: list[CopyToY | ResetX | Mac] = []
    for i in range(1, n + 1):
        body.extend([CopyToY(i=i), ResetX(i=i)])
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            body.append(Mac(i=i, j=j, a=float(mat[i - 1, j - 1])))

    box = [1.0] * n if init_box is None else [float(b) for b in init_box]
    try:
        return Program(n=n, a=mat.tolist(), init_box=box, body=body)
    except ValueError as exc:
        raise InvalidInputError(str(exc), field="init_box") from exc


def instruction_matrix(instr: CopyToY | ResetX | Mac, n: int) -> Matrix:
    """
    The 2n x 2n matrix of an instruction in the (y, x) layout.

    copy i:   [[I - e_ii, e_ii], [0, I]]
    reset i:  [[I, 0], [0, I - e_ii]]
    mac i,j:  [[I, 0], [a e_ij, I]]
    """
    t = np.eye(2 * n)
    match instr:
        case CopyToY(i=i):
            t[y_slot(i, n), y_slot(i, n)] = 0.0
            t[y_slot(i, n), x_slot(i, n)] = 1.0
        case ResetX(i=i):
            t[x_slot(i, n), x_slot(i, n)] = 0.0
        case Mac(i=i, j=j, a=coef):
            t[x_slot(i, n), y_slot(j, n)] = coef
    return t


def loop_matrix(p: Program) -> Matrix:
    """
    Net map of one loop iteration: the product of instruction matrices,
    last instruction leftmost. Equals [[0, I], [0, A]] for canonical programs.
    """
    total = np.eye(p.dim)
    for instr in p.body:
        total = instruction_matrix(instr, p.n) @ total
    return total


def net_loop_map(a: ArrayLike) -> Matrix:
    """[[0, I], [0, A]] built directly from A."""
    mat = as_matrix(a, "A")
    n = mat.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[:n, n:] = np.eye(n)
    out[n:, n:] = mat
    return out
