"""Shared fixtures: the two-variable reference loop and random stable systems."""

from __future__ import annotations

import numpy as np
import pytest

from ellipcert.annotation.annotator import annotate
from ellipcert.program.ir import Program, canonical_program
from ellipcert.shared.schema import Certificate

REFERENCE_A = [[0.0, 1.0], [-0.1, -0.2]]


def random_stable(rng: np.random.Generator, n: int, radius: float = 0.9) -> np.ndarray:
    """Random n x n matrix rescaled to spectral norm ``radius``.

    The norm is estimated by power iteration on A^T A.
    """
    a = rng.standard_normal((n, n))
    v = rng.standard_normal(n)
    for _ in range(200):
        v = a.T @ (a @ v)
        v /= np.linalg.norm(v)
    norm = float(np.sqrt(v @ (a.T @ (a @ v))))
    return a * (radius / norm)


@pytest.fixture
def reference_a() -> np.ndarray:
    return np.array(REFERENCE_A)


@pytest.fixture
def reference_program(reference_a: np.ndarray) -> Program:
    return canonical_program(reference_a)


@pytest.fixture
def reference_certificate(reference_program: Program) -> Certificate:
    return annotate(reference_program)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def stable_systems() -> list[np.ndarray]:
    """Ten random stable systems, n = 1..5 twice over."""
    gen = np.random.default_rng(7)
    return [random_stable(gen, n) for n in (1, 2, 3, 4, 5) * 2]
