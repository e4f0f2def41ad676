"""Numerical kernels: zero finding, eigenvalues, determinants, matching.

Zero finding seeds from companion-matrix eigenvalues of the monomial form
and polishes each seed with Newton steps. Two polished candidates are
produced per seed, one driven by the structured (sum form) evaluator and
one by extended-precision Horner on the monomial coefficients, and the one
with the smaller accurately-measured residual wins. The q-series sum forms
suffer enormous internal cancellation at small q and larger N (term
magnitudes many orders above the polynomial values), so the Horner route
is what reliably reaches the residual certificate; the structured route is
kept as an independent candidate and is exercised throughout the identity
checks. Zeros are returned sorted ascending by (real, imaginary) so
repeated runs produce identical sequences.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateConfiguration, LengthMismatch, NoConvergence
from .polyform import (
    AWParams,
    ComplexScalar,
    MonomialPoly,
    RacahParams,
    aw_eval,
    monomial_coefficients,
    racah_eval,
    x_to_z,
)

#: Polished zeros must satisfy |p(zero)| / scale <= this bound.
RESIDUAL_BOUND = 1e-10
#: Pairwise zero separations below this fraction of the spread are rejected.
DEGENERACY_THRESHOLD = 1e-8
#: Newton iteration cap per seed.
MAX_NEWTON_STEPS = 50

Evaluator = Callable[[ComplexScalar], tuple[ComplexScalar, ComplexScalar]]


@dataclass
class ZeroSet:
    """Computed zeros of one family instance, with residual bookkeeping.

    For the Askey-Wilson family ``xbar`` holds the zeros of the degree-N
    polynomial in x and ``zbar`` their images z = x + sqrt(x^2-1) under the
    principal branch; for q-Racah ``zbar`` holds the polynomial zeros
    directly and ``xbar`` is None. ``min_separation`` is the smallest
    pairwise distance within ``zbar`` (infinity when N = 1).

    ``zeros_hp``, when present, holds the same zeros (x-plane for
    Askey-Wilson, z-plane for q-Racah) before the rounding to double; the
    identity-residual checks use it where the double representation alone
    cannot resolve the identity, after verifying per zero that it still
    matches the stored doubles.
    """

    family: str
    params: Union[AWParams, RacahParams]
    zbar: np.ndarray
    xbar: Optional[np.ndarray]
    residuals: np.ndarray
    min_separation: float
    zeros_hp: Optional[list] = None


@dataclass
class SpectralMatrix:
    """A dense complex matrix together with its predicted closed-form spectrum."""

    entries: np.ndarray
    predicted: np.ndarray
    label: str  # "M" or "L"

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass
class SpectrumMatch:
    """Optimal assignment between a computed and a predicted spectrum."""

    pairing: np.ndarray  # pairing[i] = predicted index matched to computed[i]
    max_abs_gap: float
    max_rel_gap: float


def _companion_eigenvalues(coeffs: np.ndarray) -> np.ndarray:
    monic = coeffs / coeffs[-1]
    n = len(coeffs) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic[:-1]
    return np.linalg.eigvals(comp)


def _sorted_by_re_im(values: np.ndarray) -> np.ndarray:
    order = np.lexsort((values.imag, values.real))
    return values[order]


def horner_pair(coeffs: np.ndarray, x: complex) -> tuple[complex, complex]:
    """(value, derivative) of the monomial polynomial at x, in extended precision.

    Runs the Horner recurrence in numpy's clongdouble (80-bit significand on
    x86), which drops the evaluation noise floor well below the residual
    certificate even when the coefficients nearly cancel.
    """
    v = np.clongdouble(0.0)
    d = np.clongdouble(0.0)
    xl = np.clongdouble(x)
    for c in coeffs[::-1]:
        d = d * xl + v
        v = v * xl + np.clongdouble(c)
    return v, d


def scaled_residual(coeffs: np.ndarray, x: complex) -> float:
    """|p(x)| / (max|coeff| * max(1,|x|)^degree), measured in extended precision."""
    v, _ = horner_pair(coeffs, x)
    scale = float(np.max(np.abs(coeffs))) * max(1.0, abs(x)) ** (len(coeffs) - 1)
    return float(abs(complex(v))) / scale


def horner_hp(coeffs_hp: list, x: complex) -> complex:
    """Polynomial value at x from the pre-rounding (mpmath) coefficients."""
    import mpmath

    from .polyform import COEFF_WORKING_DPS

    with mpmath.workdps(COEFF_WORKING_DPS):
        xl = mpmath.mpc(complex(x).real, complex(x).imag)
        v = mpmath.mpc(0)
        for c in reversed(coeffs_hp):
            v = v * xl + c
        return complex(v)


def _newton(fn, x0: complex, tol_factor: float = 1e-15) -> complex:
    x = complex(x0)
    for _ in range(MAX_NEWTON_STEPS):
        v, d = fn(x)
        if v == 0 or d == 0:
            break
        step = complex(v / d)
        x -= step
        if abs(step) <= tol_factor * max(1.0, abs(x)):
            break
    return x


def refine_hp(coeffs_hp: list, x0: complex):
    """Newton-refine a zero against the pre-rounding coefficients.

    Returns the high-precision zero (mpmath mpc at the extraction working
    precision). Rounding it gives the double nearest the true zero, which
    matters when the defining series cancels so strongly that the
    double-rounded coefficients already cost several digits.
    """
    import mpmath

    from .polyform import COEFF_WORKING_DPS

    with mpmath.workdps(COEFF_WORKING_DPS):
        x = mpmath.mpc(complex(x0).real, complex(x0).imag)
        for _ in range(8):
            v = mpmath.mpc(0)
            d = mpmath.mpc(0)
            for c in reversed(coeffs_hp):
                d = d * x + v
                v = v * x + c
            if v == 0 or d == 0:
                break
            step = v / d
            x -= step
            if abs(step) <= mpmath.mpf(10) ** -30 * max(1, abs(x)):
                break
        return x


def find_polynomial_zeros(poly: MonomialPoly, evaluator: Evaluator) -> np.ndarray:
    """All zeros of a degree >= 1 polynomial, companion-seeded and Newton-polished.

    Each companion eigenvalue is polished twice, once with the structured
    ``evaluator`` and once with extended-precision Horner on the monomial
    coefficients; the candidate with the smaller Horner-measured residual
    is kept. Raises DegenerateConfiguration when two polished zeros come
    closer than 1e-8 times the zero spread, and NoConvergence when the
    scaled residual bound cannot be met.
    """
    coeffs = np.asarray(poly.coeffs, dtype=complex)
    degree = len(coeffs) - 1
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if coeffs[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    seeds = _companion_eigenvalues(coeffs)

    zeros = np.empty(degree, dtype=complex)
    for i, seed in enumerate(seeds):
        candidates = [
            _newton(lambda x: horner_pair(coeffs, x), seed),
            _newton(evaluator, seed),
        ]
        best = min(candidates, key=lambda x: scaled_residual(coeffs, x))
        if poly.coeffs_hp is not None:
            best = complex(refine_hp(poly.coeffs_hp, best))
        residual = scaled_residual(coeffs, best)
        if residual > RESIDUAL_BOUND:
            raise NoConvergence(
                f"zero polishing stalled at residual {residual:.3e} "
                f"(bound {RESIDUAL_BOUND:.0e}) near {best}"
            )
        zeros[i] = best

    if degree > 1:
        diffs = np.abs(zeros[:, None] - zeros[None, :])
        spread = float(diffs.max())
        off = diffs + np.diag(np.full(degree, np.inf))
        closest = float(off.min())
        if closest < DEGENERACY_THRESHOLD * spread:
            raise DegenerateConfiguration(
                f"two zeros separated by {closest:.3e} (spread {spread:.3e}); "
                "downstream matrices divide by pairwise differences"
            )
    return _sorted_by_re_im(zeros)


def eigenvalues(mat: np.ndarray) -> np.ndarray:
    """Eigenvalue multiset of a dense complex matrix (balanced Hessenberg QR)."""
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological input
        raise NoConvergence(f"eigenvalue iteration did not converge: {exc}") from exc


def determinant(mat: np.ndarray) -> ComplexScalar:
    """Determinant via LU with partial pivoting (signed product of pivots)."""
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return complex(np.linalg.det(m))


def match_spectra(
    computed: Sequence[ComplexScalar], predicted: Sequence[ComplexScalar]
) -> SpectrumMatch:
    """Optimal pairing (Hungarian method) minimizing total |computed - predicted|.

    Relative gaps are normalized by max(1, |predicted|) per matched pair.
    """
    comp = np.asarray(computed, dtype=complex)
    pred = np.asarray(predicted, dtype=complex)
    if comp.shape != pred.shape or comp.ndim != 1:
        raise LengthMismatch(f"cannot match {comp.shape} against {pred.shape}")
    cost = np.abs(comp[:, None] - pred[None, :])
    rows, cols = linear_sum_assignment(cost)
    pairing = np.empty_like(rows)
    pairing[rows] = cols
    gaps = np.abs(comp - pred[pairing])
    rel = gaps / np.maximum(1.0, np.abs(pred[pairing]))
    return SpectrumMatch(
        pairing=pairing,
        max_abs_gap=float(gaps.max()) if len(gaps) else 0.0,
        max_rel_gap=float(rel.max()) if len(rel) else 0.0,
    )


def compute_zero_set(params: Union[AWParams, RacahParams]) -> ZeroSet:
    """Find all N zeros of the family instance and package them as a ZeroSet.

    Degree 0 is rejected: a constant polynomial has no zeros.
    """
    if params.N < 1:
        raise ValueError("zero sets require degree N >= 1")
    poly = monomial_coefficients(params)
    if isinstance(params, AWParams):
        family = "aw"
        evaluator: Evaluator = lambda x: aw_eval(params, x)
    else:
        family = "racah"
        evaluator = lambda z: racah_eval(params, z)
    zeros = find_polynomial_zeros(poly, evaluator)
    residuals = np.array([scaled_residual(poly.coeffs, x) for x in zeros])
    zeros_hp = None
    if poly.coeffs_hp is not None:
        zeros_hp = [refine_hp(poly.coeffs_hp, x) for x in zeros]
    if family == "aw":
        xbar = zeros
        zbar = np.array([x_to_z(x) for x in zeros])
    else:
        xbar = None
        zbar = zeros
    if params.N > 1:
        diffs = np.abs(zbar[:, None] - zbar[None, :])
        min_sep = float((diffs + np.diag(np.full(params.N, np.inf))).min())
    else:
        min_sep = math.inf
    return ZeroSet(
        family=family,
        params=params,
        zbar=zbar,
        xbar=xbar,
        residuals=residuals,
        min_separation=min_sep,
        zeros_hp=zeros_hp,
    )
