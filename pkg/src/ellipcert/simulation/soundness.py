"""
Monte Carlo soundness oracle.

Runs many executions of a program and checks every reached state against
the invariant annotated at its program point. The initial states are all
box corners and axis boundary points (worst cases for the ball argument)
plus ``trials`` uniform samples from a seeded generator, so identical
seeds give identical reports.

The certificate's matrices are used as printed, without PSD validation:
an indefinite matrix describes the empty set and every state at that
point is reported.
"""

from __future__ import annotations

import itertools

import numpy as np
from numpy.typing import NDArray

from ellipcert.geometry.ellipsoid import Ellipsoid, member_batch
from ellipcert.linalg.matrixkit import symmetrize
from ellipcert.program.ir import Program
from ellipcert.shared.documents import require_matching
from ellipcert.shared.logger import get_logger
from ellipcert.shared.schema import Certificate, SoundnessReport, Violation
from ellipcert.simulation.interpreter import States, execute, initial_states

logger = get_logger("ellipcert.simulation")

MEMBERSHIP_TOL = 1e-7
MAX_CORNER_DIM = 12


def sample_initial_x(
    p: Program, trials: int, seed: int, max_corner_dim: int = MAX_CORNER_DIM
) -> NDArray[np.float64]:
    """
    Corners, axis boundary points, then ``trials`` uniform points of the box.

    Corners are enumerated only when n <= max_corner_dim. Zero trials
    yields no samples at all.
    """
    if trials <= 0:
        return np.zeros((0, p.n))
    box = p.box
    blocks: list[NDArray[np.float64]] = []
    if p.n <= max_corner_dim:
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=p.n)))
        blocks.append(signs * box)
    axis = np.concatenate([np.diag(box), -np.diag(box)])
    blocks.append(axis)
    rng = np.random.default_rng(seed)
    blocks.append(rng.uniform(-box, box, size=(trials, p.n)))
    return np.concatenate(blocks)


def monte_carlo_soundness(
    p: Program,
    cert: Certificate,
    trials: int,
    cycles: int,
    seed: int,
    tol: float = MEMBERSHIP_TOL,
    max_corner_dim: int = MAX_CORNER_DIM,
) -> SoundnessReport:
    """
    Check reached states against the certificate at every program point.

    Raises:
        InvalidInputError: certificate does not match the program's shape
    """
    require_matching(p, cert)
    xs = sample_initial_x(p, trials, seed, max_corner_dim)
    if xs.shape[0] == 0:
        return SoundnessReport(trials=trials, cycles=cycles, seed=seed)

    head = Ellipsoid(symmetrize(cert.r_init_array))
    invariants = [Ellipsoid(symmetrize(point.array)) for point in cert.points]
    labels = [point.label for point in cert.points]

    states = initial_states(p, xs)
    max_abs = np.abs(states).max(axis=0)
    violations = 0
    checks = 0
    witnesses: dict[int, Violation] = {}
    first: Violation | None = None

    def record(index: int, label: str, cycle: int, e: Ellipsoid, batch: States) -> None:
        nonlocal violations, checks, first
        inside = member_batch(e, batch, tol)
        checks += batch.shape[0]
        outside = np.flatnonzero(~inside)
        if outside.size == 0:
            return
        violations += int(outside.size)
        sample = int(outside[0])
        found = Violation(
            sample=sample,
            cycle=cycle,
            index=index,
            label=label,
            state=[float(v) for v in batch[sample]],
        )
        witnesses.setdefault(index, found)
        if first is None:
            first = found

    for cycle in range(cycles):
        record(-1, "head", cycle, head, states)
        for k, instr in enumerate(p.body):
            execute(instr, states, p.n)
            record(k, labels[k], cycle, invariants[k], states)
            np.maximum(max_abs, np.abs(states).max(axis=0), out=max_abs)
    if cycles > 0:
        record(-1, "head", cycles, head, states)

    report = SoundnessReport(
        trials=trials,
        cycles=cycles,
        seed=seed,
        samples=int(xs.shape[0]),
        checks=checks,
        violations=violations,
        first_violation=first,
        witnesses=[witnesses[k] for k in sorted(witnesses)],
        max_abs=[float(v) for v in max_abs],
    )
    log = logger.bind(samples=report.samples, cycles=cycles, checks=checks)
    if report.sound:
        log.info("soundness_oracle_clean")
    else:
        first_seen = report.first_violation
        log.warning(
            "soundness_violations_found",
            violations=violations,
            first_label=first_seen.label if first_seen else None,
        )
    return report
