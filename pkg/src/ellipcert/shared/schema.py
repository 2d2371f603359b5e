"""
Pydantic V2 data contracts for ellipcert.

These models define every document the tools exchange:
- annotator options and certificates
- checker verdicts
- Monte Carlo soundness reports and variable-bound reports

Matrices travel as row-major lists of floats so that JSON keeps full
precision; the accessors hand numpy arrays to the numerical code.
"""

from __future__ import annotations

from enum import StrEnum
from typing import Annotated

import numpy as np
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator

from ellipcert.geometry.ellipsoid import Ellipsoid, make_ellipsoid
from ellipcert.linalg.matrixkit import Matrix

CERTIFICATE_VERSION = 1


def _rectangular(rows: list[list[float]]) -> list[list[float]]:
    if not rows or not rows[0]:
        raise ValueError("matrix must have at least one row and one column")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError("matrix rows must all have the same length")
    return rows


MatrixRows = Annotated[list[list[float]], AfterValidator(_rectangular)]


def to_rows(m: Matrix) -> list[list[float]]:
    """numpy matrix to row-major float lists."""
    return [[float(v) for v in row] for row in np.asarray(m)]


def to_array(rows: list[list[float]]) -> Matrix:
    """Row-major float lists to a numpy matrix."""
    return np.array(rows, dtype=np.float64)


# ============================================
# Annotator Options
# ============================================


class AnnotatorOptions(BaseModel):
    """Tuning knobs of the annotator."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    q: MatrixRows | None = Field(
        default=None, description="Lyapunov right-hand side Q (default identity 2n)"
    )
    safety_factor: float = Field(
        default=2.0,
        ge=1.0,
        description="alpha = safety_factor * max(n, n') * sigma_max",
    )
    tol: float = Field(default=1e-9, gt=0.0, description="Relative PSD tolerance")

    def q_matrix(self, size: int) -> Matrix:
        if self.q is None:
            return np.eye(size)
        return to_array(self.q)


# ============================================
# Certificate
# ============================================


class InvariantPoint(BaseModel):
    """Post-instruction invariant at one program point."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    index: int = Field(..., ge=0, description="Index of the instruction in the body")
    label: str = Field(..., min_length=1, description="Stable program-point label")
    matrix: MatrixRows = Field(..., description="Ellipsoid matrix R (row-major)")

    @property
    def array(self) -> Matrix:
        return to_array(self.matrix)


class Certificate(BaseModel):
    """
    Loop-head invariant plus one invariant per instruction.

    ``points[k]`` holds the state after ``body[k]``; the last point is
    the end-of-loop invariant V_nn that closure compares with ``r_init``.
    """

    model_config = ConfigDict(
        frozen=True, extra="forbid", allow_inf_nan=False, populate_by_name=True
    )

    version: int = Field(default=CERTIFICATE_VERSION, ge=1)
    n: int = Field(..., ge=1, description="State dimension of the program")
    a: MatrixRows = Field(..., alias="A", description="State matrix A")
    options: AnnotatorOptions = Field(default_factory=AnnotatorOptions)
    alpha: float = Field(
        ..., gt=0.0, description="Scaling of the inverse Lyapunov matrix"
    )
    sigma_max: float = Field(..., gt=0.0, description="Largest eigenvalue of P")
    r_init: MatrixRows = Field(..., description="Loop-head invariant R_init")
    points: list[InvariantPoint] = Field(default_factory=list)
    closure_ok: bool = Field(..., description="V_nn contained in R_init")
    closure_margin: float = Field(..., description="min eigenvalue of R_init - V_nn")
    init_box_ok: bool = Field(..., description="Initial box ball inside R_init")
    init_box_margin: float = Field(
        ..., description="min eigenvalue of R_init - n' I"
    )

    @model_validator(mode="after")
    def _check_dimensions(self) -> Certificate:
        size = 2 * self.n
        if len(self.r_init) != size or len(self.r_init[0]) != size:
            raise ValueError(f"r_init must be {size}x{size}")
        for point in self.points:
            if len(point.matrix) != size or len(point.matrix[0]) != size:
                raise ValueError(f"point {point.label} must be {size}x{size}")
        return self

    @property
    def certified(self) -> bool:
        return self.closure_ok and self.init_box_ok

    @property
    def r_init_array(self) -> Matrix:
        return to_array(self.r_init)

    @property
    def final_array(self) -> Matrix:
        """V_nn: the last point, or R_init for an empty body."""
        return self.points[-1].array if self.points else self.r_init_array

    def r_init_ellipsoid(self) -> Ellipsoid:
        return make_ellipsoid(self.r_init_array, self.options.tol)

    def point_ellipsoids(self) -> list[Ellipsoid]:
        """Every post-instruction invariant as a validated ellipsoid."""
        return [make_ellipsoid(p.array, self.options.tol) for p in self.points]


# ============================================
# Checker Verdict
# ============================================


class FailureKind(StrEnum):
    """Which proof obligation failed."""

    STEP = "step-containment"
    CLOSURE = "closure"
    INIT_BOX = "init-box"


class Failure(BaseModel):
    """One failed obligation with its witness eigenvalue."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    label: str = Field(..., description="Program point of the failed obligation")
    index: int = Field(..., ge=-1, description="Point index; -1 is the loop head")
    kind: FailureKind
    witness: float = Field(..., description="Offending minimum eigenvalue")


class Verdict(BaseModel):
    """Outcome of an independent certificate check."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    certified: bool
    failures: list[Failure] = Field(default_factory=list)
    obligations: int = Field(default=0, ge=0, description="Obligations checked")

    @model_validator(mode="after")
    def _certified_iff_clean(self) -> Verdict:
        if self.certified == bool(self.failures):
            raise ValueError("certified must hold exactly when there are no failures")
        return self


# ============================================
# Simulation Reports
# ============================================


class Violation(BaseModel):
    """A concrete state found outside its annotated invariant."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    sample: int = Field(..., ge=0, description="Index of the initial state")
    cycle: int = Field(..., ge=0, description="Loop iteration (0-based)")
    index: int = Field(..., ge=-1, description="Point index; -1 is the loop head")
    label: str
    state: list[float] = Field(..., description="Joint (y, x) state")


class SoundnessReport(BaseModel):
    """Monte Carlo comparison of executions against a certificate."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    trials: int = Field(..., ge=0)
    cycles: int = Field(..., ge=0)
    seed: int
    samples: int = Field(default=0, ge=0, description="Initial states actually run")
    checks: int = Field(default=0, ge=0, description="Membership tests performed")
    violations: int = Field(default=0, ge=0)
    first_violation: Violation | None = None
    witnesses: list[Violation] = Field(
        default_factory=list, description="First violation at each failing point"
    )
    max_abs: list[float] = Field(
        default_factory=list, description="Largest |value| seen per coordinate"
    )

    @property
    def sound(self) -> bool:
        return self.violations == 0


class VariableBound(BaseModel):
    """Certified bound on one program variable."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    variable: str
    bound: float = Field(..., ge=0.0)
    attained_at: str = Field(..., description="Point whose invariant gives the bound")


class BoundsReport(BaseModel):
    """Per-variable bounds and the global bounding ball of a certificate."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    variables: list[VariableBound]
    ball_radius: float = Field(..., ge=0.0)
