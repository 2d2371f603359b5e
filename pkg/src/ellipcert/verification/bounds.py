"""
Variable ranges read off a certificate.

Every program variable is bounded at each point by sqrt(R_ii) of that
point's invariant; the certified range of a variable is the largest of
these over the loop head and all post-instruction points. The global
summary is the smallest centered ball containing every invariant.
"""

from __future__ import annotations

from ellipcert.geometry.ellipsoid import bounding_ball, variable_bound
from ellipcert.program.ir import state_labels
from ellipcert.shared.schema import BoundsReport, Certificate, VariableBound

HEAD_LABEL = "head"


def certificate_bounds(cert: Certificate) -> BoundsReport:
    """
    Per-variable bounds and bounding-ball radius of a certificate.

    Raises:
        InvalidInputError: some invariant matrix is not PSD
    """
    labelled = [(HEAD_LABEL, cert.r_init_ellipsoid())]
    labelled.extend(
        (point.label, e)
        for point, e in zip(cert.points, cert.point_ellipsoids(), strict=True)
    )

    variables: list[VariableBound] = []
    for coord, name in enumerate(state_labels(cert.n)):
        best_label, best = HEAD_LABEL, -1.0
        for label, e in labelled:
            value = variable_bound(e, coord)
            if value > best:
                best_label, best = label, value
        variables.append(
            VariableBound(variable=name, bound=best, attained_at=best_label)
        )

    return BoundsReport(
        variables=variables, ball_radius=bounding_ball([e for _, e in labelled])
    )
