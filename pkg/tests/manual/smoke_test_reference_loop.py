#!/usr/bin/env python3
"""
Smoke Test for the Reference Loop

Run by hand; not collected by pytest. This script verifies:
1. The full pipeline on x_{k+1} = A x_k with A = [[0, 1], [-0.1, -0.2]]
2. JSON log output on stderr (structlog producing valid JSON)
3. Context binding (run_id and command in every log line)
"""

import os
import sys

# Force JSON output for testing
os.environ["ELLIPCERT_ENV"] = "production"
os.environ["LOG_LEVEL"] = "DEBUG"

# ellipcert.shared.logger reads these at import time; JSON logs go to stderr
import structlog

from ellipcert.annotation.annotator import annotate
from ellipcert.program.ir import canonical_program
from ellipcert.shared.logger import bind_run_context, clear_run_context
from ellipcert.simulation.soundness import monte_carlo_soundness
from ellipcert.verification.bounds import certificate_bounds
from ellipcert.verification.checker import check_certificate


def main() -> int:
    """Run the reference loop through annotate, check, bounds and simulate."""
    logger = structlog.get_logger("smoke_test")
    bind_run_context("smoke", command="smoke_test")
    try:
        program = canonical_program([[0.0, 1.0], [-0.1, -0.2]])
        logger.info("program_generated", instructions=len(program.body))

        cert = annotate(program)
        verdict = check_certificate(program, cert)
        bounds = certificate_bounds(cert)
        report = monte_carlo_soundness(program, cert, trials=2000, cycles=50, seed=0)

        logger.info(
            "smoke_test_completed",
            certified=verdict.certified,
            obligations=verdict.obligations,
            ball_radius=bounds.ball_radius,
            sound=report.sound,
            samples=report.samples,
        )
        return 0 if verdict.certified and report.sound else 1
    finally:
        clear_run_context()


if __name__ == "__main__":
    sys.exit(main())
