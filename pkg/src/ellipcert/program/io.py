"""
JSON documents for programs and state matrices.

Program document::

    {
      "n": 2,
      "A": [[0.0, 1.0], [-0.1, -0.2]],
      "init_box": [1.0, 1.0],
      "body": [
        {"op": "copy", "i": 1},
        {"op": "reset", "i": 1},
        {"op": "mac", "i": 1, "j": 2, "a": 1.0}
      ]
    }

``init_box`` is optional (defaults to all ones). Indices are 1-based.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ellipcert.linalg.matrixkit import Matrix, as_matrix
from ellipcert.program.ir import Program
from ellipcert.shared.exceptions import InvalidInputError, ProgramParseError
from ellipcert.shared.logger import get_logger

logger = get_logger("ellipcert.program")


def _location(error: dict[str, Any]) -> str:
    parts: list[str] = []
    for item in error.get("loc", ()):
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(f".{item}" if parts else str(item))
    return "".join(parts) or "document"


def validation_location(exc: ValidationError) -> tuple[str, str]:
    """First error of a pydantic ValidationError as (location, message)."""
    first = exc.errors()[0]
    return _location(dict(first)), str(first.get("msg", "invalid value"))


def parse_program(text: str) -> Program:
    """
    Parse and validate a program document.

    Raises:
        ProgramParseError: malformed JSON, missing fields, non-finite
            numbers, or out-of-range instruction indices
    """
    try:
        program = Program.model_validate_json(text)
    except ValidationError as exc:
        location, message = validation_location(exc)
        raise ProgramParseError(message, location=location) from exc
    logger.debug("program_parsed", n=program.n, instructions=len(program.body))
    return program


def serialize_program(p: Program) -> str:
    """Program document text; parse_program inverts it exactly."""
    return p.model_dump_json(by_alias=True, indent=2)


def load_program(path: Path) -> Program:
    """Read and parse a program file."""
    return parse_program(path.read_text(encoding="utf-8"))


def save_program(path: Path, p: Program) -> None:
    """Write a program file."""
    path.write_text(serialize_program(p) + "\n", encoding="utf-8")
    logger.info("program_written", path=str(path), instructions=len(p.body))


def parse_matrix(text: str) -> Matrix:
    """
    Parse a state matrix document: a JSON array of rows, or an object
    whose ``A`` key holds one.

    Raises:
        InvalidInputError: malformed JSON, ragged rows, or non-finite entries
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"matrix document is not valid JSON: line {exc.lineno}: {exc.msg}",
            field="A",
        ) from exc
    if isinstance(data, dict):
        if "A" not in data:
            raise InvalidInputError("matrix document has no 'A' key", field="A")
        data = data["A"]
    if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
        raise InvalidInputError("A must be an array of rows", field="A")
    if len({len(row) for row in data}) > 1:
        raise InvalidInputError("A has rows of different lengths", field="A")
    return as_matrix(data, "A")


def load_matrix(path: Path) -> Matrix:
    """Read and parse a state matrix file."""
    return parse_matrix(path.read_text(encoding="utf-8"))
