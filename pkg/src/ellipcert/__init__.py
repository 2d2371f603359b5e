"""
ellipcert: ellipsoidal invariant certificates for linear control loops.

A discrete-time system x_{k+1} = A x_k is unrolled into a loop of
elementary instructions, each annotated with an ellipsoid; an independent
checker verifies the annotation with semidefinite tests only.
"""

__version__ = "0.1.0"
