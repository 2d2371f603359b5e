"""
Certificate construction for linear control loops.

The loop-head invariant comes from a Lyapunov function of the net loop
map A1: with A1^T P A1 - P = -Q and P positive definite, E_{alpha P^-1}
is mapped strictly into itself by one loop iteration, for every alpha.
alpha is then chosen large enough to cover the initial box. Every
instruction's post-invariant is the image of its pre-invariant.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ellipcert.geometry.ellipsoid import (
    Ellipsoid,
    containment_margin,
    contains,
    image,
    make_ellipsoid,
)
from ellipcert.linalg.matrixkit import (
    Matrix,
    as_matrix,
    solve_discrete_lyapunov,
    sym_inverse,
)
from ellipcert.program.ir import (
    CopyToY,
    Mac,
    Program,
    ResetX,
    instruction_matrix,
    loop_matrix,
)
from ellipcert.shared.exceptions import InvalidInputError
from ellipcert.shared.logger import get_logger
from ellipcert.shared.schema import (
    AnnotatorOptions,
    Certificate,
    InvariantPoint,
    to_rows,
)

logger = get_logger("ellipcert.annotation")


@dataclass(frozen=True)
class LoopHead:
    """The loop-head invariant together with its scaling data."""

    ellipsoid: Ellipsoid
    alpha: float
    sigma_max: float


# ============================================
# Labels
# ============================================


def point_label(k: int, instr: CopyToY | ResetX | Mac) -> str:
    """Stable label of the point after ``body[k]``, e.g. ``4:mac(1,2)``."""
    return f"{k}:{instr.op}({','.join(str(i) for i in instr.indices)})"


def point_alias(instr: CopyToY | ResetX | Mac) -> str:
    """Flow-chart name of the invariant after an instruction: T_i, R_i or V_ij."""
    match instr:
        case CopyToY(i=i):
            return f"T{i}"
        case ResetX(i=i):
            return f"R{i}"
        case Mac(i=i, j=j):
            return f"V{i}{j}" if max(i, j) < 10 else f"V{i},{j}"
    raise InvalidInputError(f"unknown instruction {instr!r}")


def point_labels(body: Sequence[CopyToY | ResetX | Mac]) -> list[str]:
    return [point_label(k, instr) for k, instr in enumerate(body)]


# ============================================
# Loop-Head Invariant
# ============================================


def init_box_radius_sq(p: Program) -> float:
    """
    Squared radius n' = sum of init_box_i^2 of the ball around the initial box.

    y starts at zero, so the box is inside the ball of squared radius n'.
    """
    return float(np.sum(p.box**2))


def alpha_scale(p: Program) -> float:
    """
    Squared-radius factor used for alpha: max(n, n').

    For the unit box this is n; larger boxes scale alpha with n'.
    """
    return max(float(p.n), init_box_radius_sq(p))


def compute_rinit(
    a1: Matrix, n: int, opts: AnnotatorOptions, radius_sq: float | None = None
) -> LoopHead:
    """
    R_init = alpha P^-1 with alpha = safety_factor * max(n, n') * sigma_max.

    P solves A1^T P A1 - P = -Q, so alpha P^-1 >= (alpha / sigma_max) I
    covers the ball of squared radius max(n, n') whenever safety_factor >= 1.

    Raises:
        InvalidInputError: a1 is not 2n x 2n or Q has the wrong size
        UnstableSystemError: no positive definite Lyapunov solution
    """
    a1 = as_matrix(a1, "A1")
    size = 2 * n
    if a1.shape != (size, size):
        raise InvalidInputError(
            f"net loop map must be {size}x{size}, got {a1.shape}", field="A1"
        )
    q = opts.q_matrix(size)
    solution = solve_discrete_lyapunov(a1, q, opts.tol)

    scale = float(n) if radius_sq is None else max(float(n), radius_sq)
    alpha = opts.safety_factor * scale * solution.sigma_max
    r_init = make_ellipsoid(alpha * sym_inverse(solution.p), opts.tol)
    logger.info(
        "loop_head_invariant_computed",
        n=n,
        sigma_max=solution.sigma_max,
        alpha=alpha,
        lyapunov_residual=solution.residual,
    )
    return LoopHead(ellipsoid=r_init, alpha=alpha, sigma_max=solution.sigma_max)


# ============================================
# Propagation
# ============================================


def propagate(p: Program, r_init: Ellipsoid) -> list[tuple[str, Ellipsoid]]:
    """
    Post-invariant of every instruction: E_k = T_k E_{k-1}, E_0 = R_init.

    Raises:
        InvalidInputError: r_init does not have dimension 2n
    """
    if r_init.dim != p.dim:
        raise InvalidInputError(
            f"loop-head invariant has dimension {r_init.dim}, program needs {p.dim}"
        )
    chain: list[tuple[str, Ellipsoid]] = []
    current = r_init
    for k, instr in enumerate(p.body):
        current = image(current, instruction_matrix(instr, p.n))
        chain.append((point_label(k, instr), current))
    return chain


# ============================================
# Annotation
# ============================================


def annotate(p: Program, opts: AnnotatorOptions | None = None) -> Certificate:
    """
    Annotate every program point of ``p`` with an ellipsoidal invariant.

    A failed closure or box-coverage obligation yields a refuted
    certificate (``closure_ok`` / ``init_box_ok`` false), not an error.

    Raises:
        UnstableSystemError: the loop map has no positive definite Lyapunov solution
    """
    opts = opts or AnnotatorOptions()
    a1 = loop_matrix(p)
    radius_sq = init_box_radius_sq(p)
    head = compute_rinit(a1, p.n, opts, radius_sq=alpha_scale(p))
    chain = propagate(p, head.ellipsoid)
    v_nn = chain[-1][1] if chain else head.ellipsoid

    closure_ok = contains(head.ellipsoid, v_nn, opts.tol)
    closure_margin = containment_margin(head.ellipsoid, v_nn)
    box_ball = make_ellipsoid(radius_sq * np.eye(p.dim), opts.tol)
    box_ok = contains(head.ellipsoid, box_ball, opts.tol)
    box_margin = containment_margin(head.ellipsoid, box_ball)

    certificate = Certificate(
        n=p.n,
        a=p.a,
        options=opts,
        alpha=head.alpha,
        sigma_max=head.sigma_max,
        r_init=to_rows(head.ellipsoid.matrix),
        points=[
            InvariantPoint(index=k, label=label, matrix=to_rows(e.matrix))
            for k, (label, e) in enumerate(chain)
        ],
        closure_ok=closure_ok,
        closure_margin=closure_margin,
        init_box_ok=box_ok,
        init_box_margin=box_margin,
    )
    log = logger.bind(n=p.n, points=len(chain), alpha=head.alpha)
    if certificate.certified:
        log.info("certificate_built", closure_margin=closure_margin)
    else:
        log.warning(
            "certificate_refuted",
            closure_ok=closure_ok,
            closure_margin=closure_margin,
            init_box_ok=box_ok,
            init_box_margin=box_margin,
        )
    return certificate
