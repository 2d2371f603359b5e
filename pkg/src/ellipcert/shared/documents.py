"""
Certificate documents on disk.

A certificate is the JSON dump of :class:`ellipcert.shared.schema.Certificate`
(matrices row-major, full float precision). It is read by the checker,
the bounds report and the Monte Carlo oracle, none of which import the
annotator.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import ValidationError

from ellipcert.program.io import validation_location
from ellipcert.program.ir import Program
from ellipcert.shared.exceptions import CertificateParseError
from ellipcert.shared.logger import get_logger
from ellipcert.shared.schema import Certificate

logger = get_logger("ellipcert.documents")


def parse_certificate(text: str) -> Certificate:
    """
    Parse and validate a certificate document.

    Raises:
        CertificateParseError: malformed JSON, missing fields, non-finite
            numbers, or matrices of the wrong size
    """
    try:
        certificate = Certificate.model_validate_json(text)
    except ValidationError as exc:
        location, message = validation_location(exc)
        raise CertificateParseError(message, location=location) from exc
    logger.debug("certificate_parsed", n=certificate.n, points=len(certificate.points))
    return certificate


def serialize_certificate(cert: Certificate) -> str:
    return cert.model_dump_json(by_alias=True, indent=2)


def load_certificate(path: Path) -> Certificate:
    return parse_certificate(path.read_text(encoding="utf-8"))


def save_certificate(path: Path, cert: Certificate) -> None:
    path.write_text(serialize_certificate(cert) + "\n", encoding="utf-8")
    logger.info("certificate_written", path=str(path), points=len(cert.points))


def require_matching(program: Program, cert: Certificate) -> None:
    """
    Check that a certificate was written for a program of this shape.

    Raises:
        CertificateParseError: dimension or point-count mismatch
    """
    if cert.n != program.n:
        raise CertificateParseError(
            f"certificate is for n = {cert.n}, program has n = {program.n}",
            location="n",
        )
    if len(cert.points) != len(program.body):
        raise CertificateParseError(
            f"certificate has {len(cert.points)} points, program has "
            f"{len(program.body)} instructions",
            location="points",
        )
