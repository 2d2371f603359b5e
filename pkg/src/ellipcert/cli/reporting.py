"""
Human-readable reports for the CLI.

Numbers print with a fixed count of significant digits (6 by default);
the JSON format elsewhere keeps full precision.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ellipcert.annotation.annotator import point_alias
from ellipcert.geometry.ellipsoid import Ellipsoid, semi_axes
from ellipcert.linalg.matrixkit import Matrix, symmetrize
from ellipcert.program.ir import Program
from ellipcert.shared.schema import (
    BoundsReport,
    Certificate,
    SoundnessReport,
    Verdict,
)


def fmt(value: float, digits: int = 6) -> str:
    return f"{value:.{digits}g}"


def fmt_vector(values: Iterable[float], digits: int = 6) -> str:
    return "(" + ", ".join(fmt(v, digits) for v in values) + ")"


def fmt_matrix(m: Matrix, digits: int = 6, indent: str = "    ") -> str:
    rows = [[fmt(v, digits) for v in row] for row in np.asarray(m)]
    width = max(len(cell) for row in rows for cell in row)
    return "\n".join(
        indent + "[" + "  ".join(c.rjust(width) for c in row) + "]" for row in rows
    )


def _summary(m: Matrix, digits: int) -> str:
    axes = semi_axes(Ellipsoid(symmetrize(m)))
    rank = int(np.sum(axes > 1e-9 * (1.0 + axes[0])))
    return f"semi-axes {fmt_vector(axes, digits)}  rank {rank}/{len(axes)}"


def render_listing(p: Program, cert: Certificate, digits: int = 6) -> str:
    """
    The program annotated with its invariants, one instruction per line.

    The loop head carries R_init; every instruction is followed by the
    invariant that holds right after it; the listing ends with the
    closure obligation back to the loop head.
    """
    lines = [f"loop head        R_init  {_summary(cert.r_init_array, digits)}"]
    for instr, point in zip(p.body, cert.points, strict=True):
        summary = _summary(point.array, digits)
        lines.append(f"  [{point.index:>3}] {instr.describe()}")
        lines.append(f"        {point_alias(instr):<8} {point.label:<14} {summary}")
    status = "holds" if cert.closure_ok else "FAILS"
    margin = fmt(cert.closure_margin, digits)
    lines.append(f"loop end         R_init - V_nn >= 0 {status} (margin {margin})")
    return "\n".join(lines)


def render_annotation(
    p: Program, cert: Certificate, digits: int = 6, show_matrices: bool = False
) -> str:
    verdict = "CERTIFIED" if cert.certified else "REFUTED"
    safety = fmt(cert.options.safety_factor, digits)
    lines = [
        f"certificate: {verdict}",
        f"  n = {cert.n}, instructions = {len(cert.points)}",
        f"  sigma_max = {fmt(cert.sigma_max, digits)}",
        f"  alpha = {fmt(cert.alpha, digits)} (safety factor {safety})",
        f"  closure margin = {fmt(cert.closure_margin, digits)}"
        f" ({'ok' if cert.closure_ok else 'violated'})",
        f"  init-box margin = {fmt(cert.init_box_margin, digits)}"
        f" ({'ok' if cert.init_box_ok else 'violated'})",
        "",
        render_listing(p, cert, digits),
    ]
    if show_matrices:
        lines.extend(["", "R_init:", fmt_matrix(cert.r_init_array, digits)])
        for point in cert.points:
            lines.extend([f"{point.label}:", fmt_matrix(point.array, digits)])
    return "\n".join(lines)


def render_verdict(verdict: Verdict, digits: int = 6) -> str:
    if verdict.certified:
        return f"CERTIFIED: all {verdict.obligations} obligations hold"
    failing = len(verdict.failures)
    lines = [f"REFUTED: {failing} of {verdict.obligations} obligations fail"]
    for failure in verdict.failures:
        lines.append(
            f"  {failure.kind:<16} at {failure.label:<14}"
            f" min eigenvalue {fmt(failure.witness, digits)}"
        )
    return "\n".join(lines)


def render_bounds(report: BoundsReport, digits: int = 6) -> str:
    lines = ["variable  bound         attained at"]
    for item in report.variables:
        bound = fmt(item.bound, digits)
        lines.append(f"  {item.variable:<7} {bound:<13} {item.attained_at}")
    lines.append(f"bounding ball radius: {fmt(report.ball_radius, digits)}")
    return "\n".join(lines)


def render_soundness(report: SoundnessReport, digits: int = 6) -> str:
    status = "SOUND" if report.sound else "VIOLATED"
    lines = [
        f"soundness oracle: {status}",
        f"  samples = {report.samples} (trials {report.trials}, seed {report.seed}),"
        f" cycles = {report.cycles}",
        f"  membership checks = {report.checks}, violations = {report.violations}",
    ]
    if report.max_abs:
        largest = fmt_vector(report.max_abs, digits)
        lines.append(f"  largest |value| per coordinate: {largest}")
    for witness in report.witnesses:
        lines.append(
            f"  at {witness.label:<14} cycle {witness.cycle}, sample {witness.sample}:"
            f" state {fmt_vector(witness.state, digits)}"
        )
    return "\n".join(lines)
