"""
Independent line-by-line certificate checker.

Each obligation is a single PSD test on data printed in the certificate:

- init-box:  R_init - n' I                 (the initial box's ball is inside)
- step k:    R_k - T_k R_{k-1} T_k^T        (post-invariant encloses the image)
- closure:   R_init - R_last                (the loop-head invariant is inductive)

The checker never re-derives R_init and never solves a Lyapunov equation;
it reads A only through the coefficients of the program's MAC
instructions. A matrix that is not PSD describes the empty set, which
fails the step that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from ellipcert.geometry.ellipsoid import Ellipsoid
from ellipcert.linalg.matrixkit import (
    DEFAULT_TOL,
    Matrix,
    psd_floor,
    require_symmetric,
    sym_eigen,
)
from ellipcert.program.ir import CopyToY, Mac, Program, ResetX, instruction_matrix
from ellipcert.shared.documents import require_matching
from ellipcert.shared.exceptions import InvalidInputError
from ellipcert.shared.logger import get_logger
from ellipcert.shared.schema import Certificate, Failure, FailureKind, Verdict

logger = get_logger("ellipcert.verification")

HEAD_LABEL = "head"


@dataclass(frozen=True)
class Obligation:
    """Result of one PSD obligation: holds, with the minimum eigenvalue seen."""

    holds: bool
    witness: float


def psd_obligation(m: ArrayLike, tol: float) -> Obligation:
    """Is the symmetric matrix ``m`` PSD within ``tol * (1 + ||m||_F)``?"""
    mat = require_symmetric(m, "obligation")
    lowest = sym_eigen(mat).min
    return Obligation(holds=lowest >= psd_floor(mat, tol), witness=lowest)


def step_obligation(
    pre: Matrix, instr: CopyToY | ResetX | Mac, post: Matrix, n: int, tol: float
) -> Obligation:
    """post - T pre T^T must be PSD, T the instruction's matrix."""
    size = 2 * n
    if pre.shape != (size, size) or post.shape != (size, size):
        raise InvalidInputError(
            f"step matrices must be {size}x{size}, got {pre.shape} and {post.shape}"
        )
    t = instruction_matrix(instr, n)
    return psd_obligation(post - t @ pre @ t.T, tol)


def check_step(
    pre: Ellipsoid,
    instr: CopyToY | ResetX | Mac,
    post: Ellipsoid,
    n: int,
    tol: float = DEFAULT_TOL,
) -> bool:
    """
    True iff ``post`` encloses the image of ``pre`` under the instruction.

    Containment rather than equality: a conservative post-invariant is a
    valid proof step.

    Raises:
        InvalidInputError: dimensions are not 2n
    """
    return step_obligation(pre.matrix, instr, post.matrix, n, tol).holds


def check_certificate(
    p: Program, cert: Certificate, tol: float = DEFAULT_TOL
) -> Verdict:
    """
    Verify a certificate against a program, collecting every failure.

    Raises:
        InvalidInputError: point count or dimension does not match the program
    """
    require_matching(p, cert)
    size = p.dim
    r_init = cert.r_init_array
    failures: list[Failure] = []

    box = psd_obligation(r_init - float(np.sum(p.box**2)) * np.eye(size), tol)
    if not box.holds:
        failures.append(
            Failure(
                label=HEAD_LABEL,
                index=-1,
                kind=FailureKind.INIT_BOX,
                witness=box.witness,
            )
        )

    pre = r_init
    for k, (instr, point) in enumerate(zip(p.body, cert.points, strict=True)):
        post = point.array
        step = step_obligation(pre, instr, post, p.n, tol)
        if not step.holds:
            failures.append(
                Failure(
                    label=point.label,
                    index=k,
                    kind=FailureKind.STEP,
                    witness=step.witness,
                )
            )
        pre = post

    closure = psd_obligation(r_init - pre, tol)
    if not closure.holds:
        last = cert.points[-1] if cert.points else None
        failures.append(
            Failure(
                label=last.label if last else HEAD_LABEL,
                index=last.index if last else -1,
                kind=FailureKind.CLOSURE,
                witness=closure.witness,
            )
        )

    verdict = Verdict(
        certified=not failures, failures=failures, obligations=len(p.body) + 2
    )
    if verdict.certified:
        logger.info("certificate_verified", obligations=verdict.obligations)
    else:
        logger.warning(
            "certificate_rejected",
            failures=len(failures),
            first=failures[0].label,
            kind=str(failures[0].kind),
        )
    return verdict
