"""Askey-Wilson and q-Racah polynomials: parameters, evaluation, coefficients.

The Askey-Wilson polynomial of degree N in x is evaluated from its explicit
sum over modified q-Pochhammer symbols,

    p_N(x) = (ab,ac,ad;q)_N a^(-N) *
             sum_m q^m (q^(-N);q)_m (abcd q^(N-1);q)_m
                   / [(q;q)_m (ab;q)_m (ac;q)_m (ad;q)_m] * {a;q;x}_m,

and the q-Racah polynomial of degree N in z from

    R_N(z) = sum_m q^m (q^(-N);q)_m (alpha*beta*q^(N+1);q)_m
                   / [(q;q)_m (alpha*q;q)_m (beta*delta*q;q)_m (gamma*q;q)_m]
             * prod_{s<m} (1 - z q^s + gamma*delta*q^(2s+1)).

Both evaluators return the exact derivative alongside the value. The
related rational form P_N(z) = p_N((z^2+1)/(2z)) and the change of
variables z = x + sqrt(x^2-1) (principal branch) live here too.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DegenerateDenominator, ZeroArgument
from .qkernel import ComplexScalar, qpochhammer, qpochhammer_multi


def _check_q(q: complex) -> None:
    if q == 0 or q == 1:
        raise ValueError(f"q must differ from 0 and 1, got {q}")


def _check_poch_column(label: str, c: complex, q: complex, upto: int) -> None:
    # (c;q)_m must be nonzero for every m <= upto; equivalently no single
    # factor 1 - c q^k vanishes for k < upto.
    cqk = complex(c)
    for k in range(upto):
        if 1.0 - cqk == 0:
            raise DegenerateDenominator(f"({label};q)_m vanishes at factor k={k}")
        cqk *= q


@dataclass(frozen=True)
class AWParams:
    """The four Askey-Wilson parameters, the base q, and the degree N."""

    a: ComplexScalar
    b: ComplexScalar
    c: ComplexScalar
    d: ComplexScalar
    q: ComplexScalar
    N: int

    def __post_init__(self):
        _check_q(self.q)
        if self.N < 0:
            raise ValueError(f"degree must be nonnegative, got {self.N}")
        if self.a == 0:
            raise ValueError("parameter a must be nonzero (the sum divides by a^N)")
        a, b, c, d, q = self.a, self.b, self.c, self.d, self.q
        _check_poch_column("ab", a * b, q, self.N)
        _check_poch_column("ac", a * c, q, self.N)
        _check_poch_column("ad", a * d, q, self.N)
        # Degree is exactly N only if the m = N coefficient survives.
        if qpochhammer(q ** -self.N, q, self.N) == 0:
            raise DegenerateDenominator("(q^-N;q)_N = 0: q is a low-order root of unity")
        if qpochhammer(self.abcd * q ** (self.N - 1), q, self.N) == 0:
            raise DegenerateDenominator("(abcd q^(N-1);q)_N = 0: leading coefficient vanishes")

    @property
    def abcd(self) -> ComplexScalar:
        return self.a * self.b * self.c * self.d


@dataclass(frozen=True)
class RacahParams:
    """The four q-Racah parameters, the base q, and the degree N.

    No Diophantine restriction is placed on alpha*q, beta*delta*q or
    gamma*q; only the non-vanishing of their q-Pochhammer columns up to
    order N is required.
    """

    alpha: ComplexScalar
    beta: ComplexScalar
    gamma: ComplexScalar
    delta: ComplexScalar
    q: ComplexScalar
    N: int

    def __post_init__(self):
        _check_q(self.q)
        if self.N < 0:
            raise ValueError(f"degree must be nonnegative, got {self.N}")
        al, be, ga, de, q = self.alpha, self.beta, self.gamma, self.delta, self.q
        _check_poch_column("alpha*q", al * q, q, self.N)
        _check_poch_column("beta*delta*q", be * de * q, q, self.N)
        _check_poch_column("gamma*q", ga * q, q, self.N)
        if qpochhammer(q ** -self.N, q, self.N) == 0:
            raise DegenerateDenominator("(q^-N;q)_N = 0: q is a low-order root of unity")
        if qpochhammer(self.alphabeta * q ** (self.N + 1), q, self.N) == 0:
            raise DegenerateDenominator(
                "(alpha*beta q^(N+1);q)_N = 0: leading coefficient vanishes"
            )

    @property
    def alphabeta(self) -> ComplexScalar:
        return self.alpha * self.beta

    @property
    def gammadelta(self) -> ComplexScalar:
        return self.gamma * self.delta


@dataclass
class MonomialPoly:
    """Coefficients in the monomial basis; coeffs[k] multiplies x^k.

    ``coeffs_hp``, when present, carries the same coefficients before the
    rounding to double (mpmath values at the extraction working precision);
    the zero finder uses them for its final polishing steps.
    """

    coeffs: np.ndarray
    coeffs_hp: list | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def x_to_z(x: ComplexScalar) -> ComplexScalar:
    """z = x + sqrt(x^2 - 1), principal square root."""
    return x + cmath.sqrt(x * x - 1.0)


def z_to_x(z: ComplexScalar) -> ComplexScalar:
    """x = (z^2 + 1) / (2z); inverse of x_to_z on either branch."""
    if z == 0:
        raise ZeroArgument("z = 0 has no preimage under z = x + sqrt(x^2-1)")
    return (z * z + 1.0) / (2.0 * z)


def _aw_coefficient_ratios(p: AWParams):
    """Yield the m -> m+1 ratio of the Askey-Wilson sum coefficients."""
    a, b, c, d, q = p.a, p.b, p.c, p.d, p.q
    qm = 1.0 + 0.0j  # q^m
    f_top1 = q ** -p.N  # q^(-N) q^m
    f_top2 = p.abcd * q ** (p.N - 1)
    for m in range(p.N):
        top = q * (1.0 - f_top1 * qm) * (1.0 - f_top2 * qm)
        bot = (1.0 - q * qm) * (1.0 - a * b * qm) * (1.0 - a * c * qm) * (1.0 - a * d * qm)
        if bot == 0:
            raise DegenerateDenominator(f"Askey-Wilson coefficient denominator vanished at m={m + 1}")
        yield top / bot
        qm *= q


def aw_eval(p: AWParams, x: ComplexScalar) -> tuple[ComplexScalar, ComplexScalar]:
    """Askey-Wilson polynomial value and x-derivative at x."""
    prefactor = qpochhammer_multi((p.a * p.b, p.a * p.c, p.a * p.d), p.q, p.N) / p.a**p.N
    coeff = 1.0 + 0.0j
    total_v = 1.0 + 0.0j  # m = 0 term: coefficient 1, {a;q;x}_0 = 1
    total_d = 0.0 + 0.0j
    # Running modified q-Pochhammer pair, one linear factor added per term.
    pv = 1.0 + 0.0j
    pd = 0.0 + 0.0j
    w = complex(p.a)  # a q^s
    for ratio in _aw_coefficient_ratios(p):
        coeff *= ratio
        f = 1.0 + w * w - 2.0 * w * x
        fp = -2.0 * w
        pv, pd = pv * f, pd * f + pv * fp
        total_v += coeff * pv
        total_d += coeff * pd
        w *= p.q
    return prefactor * total_v, prefactor * total_d


def aw_rational_eval(p: AWParams, z: ComplexScalar) -> ComplexScalar:
    """The rational form P_N(z) = p_N((z^2+1)/(2z)); symmetric under z -> 1/z."""
    return aw_eval(p, z_to_x(z))[0]


def _racah_coefficient_ratios(p: RacahParams):
    """Yield the m -> m+1 ratio of the q-Racah sum coefficients."""
    q = p.q
    qm = 1.0 + 0.0j
    f_top1 = q ** -p.N
    f_top2 = p.alphabeta * q ** (p.N + 1)
    aq, bdq, gq = p.alpha * q, p.beta * p.delta * q, p.gamma * q
    for m in range(p.N):
        top = q * (1.0 - f_top1 * qm) * (1.0 - f_top2 * qm)
        bot = (1.0 - q * qm) * (1.0 - aq * qm) * (1.0 - bdq * qm) * (1.0 - gq * qm)
        if bot == 0:
            raise DegenerateDenominator(f"q-Racah coefficient denominator vanished at m={m + 1}")
        yield top / bot
        qm *= q


def racah_eval(p: RacahParams, z: ComplexScalar) -> tuple[ComplexScalar, ComplexScalar]:
    """q-Racah polynomial value and z-derivative at z."""
    q = p.q
    gdq = p.gammadelta * q
    coeff = 1.0 + 0.0j
    total_v = 1.0 + 0.0j
    total_d = 0.0 + 0.0j
    # Running product prod_{s<m} (1 - z q^s + gamma*delta*q^(2s+1)) and its
    # z-derivative, extended by one factor per term.
    pv = 1.0 + 0.0j
    pd = 0.0 + 0.0j
    qs = 1.0 + 0.0j  # q^s
    w = gdq  # gamma*delta*q^(2s+1)
    for ratio in _racah_coefficient_ratios(p):
        coeff *= ratio
        f = 1.0 - z * qs + w
        fp = -qs
        pv, pd = pv * f, pd * f + pv * fp
        total_v += coeff * pv
        total_d += coeff * pd
        qs *= q
        w *= q * q
    return total_v, total_d


#: Working precision (decimal digits) for monomial-coefficient extraction.
#: The q-series terms cancel by up to ~12 orders at desk scale (small q,
#: N ~ 10), so the expansion is carried out in high precision and only the
#: final coefficients are rounded to doubles.
COEFF_WORKING_DPS = 50


def _mpc(value: ComplexScalar) -> "mpmath.mpc":
    value = complex(value)
    return mpmath.mpc(value.real, value.imag)


def monomial_coefficients(p: AWParams | RacahParams) -> MonomialPoly:
    """Expand the family polynomial into the monomial basis.

    The degree-m basis product is grown one linear factor at a time and the
    series terms accumulated in high-precision arithmetic before the single
    rounding to double precision, so the returned coefficients represent
    the exact polynomial of the (double) parameters to working accuracy
    even where the defining sum cancels catastrophically.
    """
    if not isinstance(p, (AWParams, RacahParams)):
        raise TypeError(f"unsupported parameter type {type(p).__name__}")
    n = p.N
    with mpmath.workdps(COEFF_WORKING_DPS):
        q = _mpc(p.q)
        one = mpmath.mpf(1)
        if isinstance(p, AWParams):
            a, b, c, d = (_mpc(v) for v in (p.a, p.b, p.c, p.d))
            f_top = (q**-n, a * b * c * d * q ** (n - 1))
            f_bot = (a * b, a * c, a * d)
            prefactor = a**-n
            for v in f_bot:
                w = v
                for _ in range(n):
                    prefactor *= one - w
                    w *= q

            def linear_factors():
                w = a  # a q^s
                while True:
                    yield one + w * w, -2 * w
                    w *= q

        else:
            al, be, ga, de = (_mpc(v) for v in (p.alpha, p.beta, p.gamma, p.delta))
            f_top = (q**-n, al * be * q ** (n + 1))
            f_bot = (al * q, be * de * q, ga * q)
            prefactor = mpmath.mpc(1)

            def linear_factors():
                qs = mpmath.mpc(1)  # q^s
                w = ga * de * q  # gamma*delta*q^(2s+1)
                while True:
                    yield one + w, -qs
                    qs *= q
                    w *= q * q

        acc = [mpmath.mpc(0)] * (n + 1)
        acc[0] = mpmath.mpc(1)  # m = 0 term
        basis = [mpmath.mpc(0)] * (n + 1)
        basis[0] = mpmath.mpc(1)
        coeff = mpmath.mpc(1)
        qm = mpmath.mpc(1)  # q^m
        factors = linear_factors()
        for m in range(1, n + 1):
            top = q * (one - f_top[0] * qm) * (one - f_top[1] * qm)
            bot = one - q * qm
            for v in f_bot:
                bot *= one - v * qm
            if bot == 0:
                raise DegenerateDenominator(f"coefficient denominator vanished at m={m}")
            coeff *= top / bot
            qm *= q
            const, slope = next(factors)
            new_basis = [const * basis[k] for k in range(n + 1)]
            for k in range(1, m + 1):
                new_basis[k] += slope * basis[k - 1]
            basis = new_basis
            for k in range(m + 1):
                acc[k] += coeff * basis[k]
        coeffs_hp = [prefactor * v for v in acc]
        coeffs = np.array([complex(v) for v in coeffs_hp])
    if coeffs[-1] == 0:
        raise DegenerateDenominator("leading monomial coefficient vanished")
    return MonomialPoly(coeffs=coeffs, coeffs_hp=coeffs_hp)
