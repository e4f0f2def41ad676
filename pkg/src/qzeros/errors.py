"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class QZerosError(Exception):
    """Base class for all failures raised by this package."""


class DegenerateDenominator(QZerosError):
    """A q-Pochhammer factor in a denominator vanished.

    Signals a parameter choice outside the admissible set (e.g. one of the
    lower 4phi3 parameters equals a negative power of q).
    """


class ZeroArgument(QZerosError):
    """z = 0 passed where the x <-> z change of variables divides by z."""


class DegenerateConfiguration(QZerosError):
    """Two polished zeros (nearly) coincide.

    The spectral matrices divide by pairwise zero differences, so
    near-collisions are rejected rather than regularized.
    """


class SingularConfiguration(QZerosError):
    """A structure-function guard was violated.

    Carries the name of the violated guard and the offending magnitude.
    """

    def __init__(self, guard: str, magnitude: float | None = None):
        self.guard = guard
        self.magnitude = magnitude
        detail = f"guard violated: {guard}"
        if magnitude is not None:
            detail += f" (|.| = {magnitude:.3e})"
        super().__init__(detail)


class BranchDegenerate(QZerosError):
    """The square-root discriminant z^2 - 4*gamma*delta*q is (numerically) zero.

    The two q-shifted images z^(+) and z^(-) collide and the shift
    derivatives blow up.
    """


class NoConvergence(QZerosError):
    """An iterative numerical kernel failed to reach its target accuracy."""


class LengthMismatch(QZerosError):
    """Spectrum lists of different lengths cannot be matched."""


class SingularTrajectory(QZerosError):
    """Flow integration hit a guard (position collision or step underflow).

    The samples accepted before the failure are attached as ``trajectory``.
    """

    def __init__(self, message: str, trajectory=None):
        self.trajectory = trajectory if trajectory is not None else []
        super().__init__(message)
