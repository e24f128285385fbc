"""Analytic error performance: SNR-like terms, PEP quadrature, bounds and floors.

The pairwise error probability is evaluated for the optimum-weight receiver:
a finite quadrature over theta of the closed-form inner integral I1(theta),
whose eta-integral (eta = |h_rd|^2, exponential density) collapses to an
expression in the exponential integral E1.  The closed form embodies the
high-SNR form of the relayed-branch SNR term (the 2/rho correction drops out
of the inner integral); the exposed `gamma_rd` keeps the full expression.
"""

from dataclasses import dataclass

import numpy as np

from .link import Constellation
from .specials import exp_e1_scaled

__all__ = [
    "PepParams",
    "PepPoint",
    "QuadratureError",
    "gamma_sd",
    "gamma_rd",
    "gamma_rd_high_snr",
    "i1_closed_form",
    "pep",
    "pep_upper_bound",
    "error_floor",
    "ser_ber_from_pep",
    "pep_point",
]


class QuadratureError(RuntimeError):
    """Raised when the theta-quadrature fails its refinement check."""


@dataclass(frozen=True)
class PepParams:
    """Inputs of the error analysis for one power level and fading state."""

    P0: float
    A: float
    alpha_sd: float
    alpha: float
    d_min_sq: float
    M: int

    def __post_init__(self):
        if self.P0 <= 0 or self.A <= 0 or self.d_min_sq <= 0:
            raise ValueError("P0, A and d_min_sq must be positive")
        if not (0.0 < self.alpha_sd <= 1.0 and 0.0 < self.alpha <= 1.0):
            raise ValueError("autocorrelations must be in (0, 1]")

    @classmethod
    def for_link(cls, alpha_sd: float, alpha: float, p_db: float, M: int) -> "PepParams":
        """Equal power allocation at total power p_db (dB)."""
        from .link import PowerAllocation

        pa = PowerAllocation.equal_from_total_db(p_db)
        d2 = Constellation.of(M).d_min_sq
        return cls(pa.P0, pa.A, alpha_sd, alpha, d2, M)


@dataclass
class PepPoint:
    P_dB: float
    pep: float
    ser: float
    ber: float
    floor: float


def gamma_sd(params: PepParams) -> float:
    """Effective SNR term of the direct branch."""
    a2 = params.alpha_sd**2
    p0 = params.P0
    return a2 * p0 / (2.0 * p0 * (1.0 - a2) + 4.0 + 2.0 / p0)


def gamma_rd(alpha: float, rho: float) -> float:
    """Effective SNR term of the relayed branch at conditional SNR rho."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    a2 = alpha**2
    return a2 * rho / (2.0 * rho * (1.0 - a2) + 4.0 + 2.0 / rho)


def gamma_rd_high_snr(alpha: float, rho):
    """Relayed-branch SNR term without the 2/rho correction.

    This is the form whose average over the exponential gain density yields
    the E1-based closed form of the inner integral; the correction only
    matters at very low conditional SNR.
    """
    a2 = alpha**2
    rho = np.asarray(rho, dtype=float)
    return (a2 * rho / (2.0 * rho * (1.0 - a2) + 4.0))[()]


def i1_closed_form(theta, params: PepParams):
    """Inner integral over the relay-destination gain, in closed form.

    I1(theta) = eps1 * (1 + (beta1 - beta2) * exp(beta2) * E1(beta2)), where the
    coefficients collect the quadratic denominator terms of the averaged
    relayed-branch SNR.  Vectorized over theta.
    """
    theta = np.asarray(theta, dtype=float)
    a2 = params.alpha**2
    aa = params.A**2
    p0 = params.P0
    d2 = params.d_min_sq
    s2 = np.sin(theta) ** 2
    denom = a2 * aa * p0 * d2 / s2 + 4.0 * (1.0 - a2) * aa * p0 + 8.0 * aa
    eps1 = (4.0 * (1.0 - a2) * aa * p0 + 8.0 * aa) / denom
    beta1 = 4.0 / (2.0 * (1.0 - a2) * aa * p0 + 4.0 * aa)
    beta2 = 8.0 / denom
    return (eps1 * (1.0 + (beta1 - beta2) * exp_e1_scaled(beta2)))[()]


def _pep_quadrature(params: PepParams, order: int) -> float:
    x, w = np.polynomial.legendre.leggauss(order)
    theta = (x + 1.0) * (np.pi / 4.0)
    wt = w * (np.pi / 4.0)
    gsd = gamma_sd(params)
    integrand = i1_closed_form(theta, params) / (
        1.0 + gsd * params.d_min_sq / (2.0 * np.sin(theta) ** 2)
    )
    return float(np.sum(wt * integrand) / np.pi)


_QUAD_ORDER = 64
_QUAD_CHECK_ORDER = 128
_QUAD_RTOL = 1e-9


def pep(params: PepParams) -> float:
    """Unconditioned pairwise error probability of the nearest-neighbour event.

    Gauss-Legendre quadrature over theta in (0, pi/2), with an order-doubling
    refinement check at relative tolerance 1e-9.
    """
    v = _pep_quadrature(params, _QUAD_ORDER)
    v_ref = _pep_quadrature(params, _QUAD_CHECK_ORDER)
    if abs(v - v_ref) > _QUAD_RTOL * max(abs(v_ref), 1e-300):
        raise QuadratureError(
            f"theta-quadrature did not converge: {v!r} vs {v_ref!r} at refinement"
        )
    return v_ref


def pep_upper_bound(params: PepParams) -> float:
    """High-angle bound: I1(pi/2) / (2 + gamma_sd * d_min_sq)."""
    i1 = float(i1_closed_form(np.pi / 2.0, params))
    return i1 / (2.0 + gamma_sd(params) * params.d_min_sq)


_FLOOR_BRANCH_TOL = 1e-9


def error_floor(params: PepParams) -> float:
    """Limit of the PEP as the total power grows without bound.

    Zero when both links are quasi-static.  The equal-autocorrelation branch
    handles the removable singularity of the general expression.
    """
    asd2 = params.alpha_sd**2
    a2 = params.alpha**2
    d2 = params.d_min_sq
    if params.alpha_sd >= 1.0 and params.alpha >= 1.0:
        return 0.0
    if abs(params.alpha_sd - params.alpha) < _FLOOR_BRANCH_TOL:
        # removable singularity of the general branch: with u = alpha^2 and
        # g(x) = sqrt(x d^2 / (x d^2 + 4(1-x))), the limit is
        # 1/2 - [g(u) + u(1-u) g'(u)] / 2
        u = a2
        den = u * d2 + 4.0 * (1.0 - u)
        g = np.sqrt(u * d2 / den)
        gp = 4.0 * d2 / den**2 / (2.0 * g)
        return float(0.5 - 0.5 * (g + u * (1.0 - u) * gp))
    t_sd = np.sqrt(asd2 * d2 / (asd2 * d2 + 4.0 * (1.0 - asd2)))
    t_rd = np.sqrt(a2 * d2 / (a2 * d2 + 4.0 * (1.0 - a2)))
    diff = 2.0 * (asd2 - a2)
    return float(
        0.5 - asd2 * (1.0 - a2) / diff * t_sd + a2 * (1.0 - asd2) / diff * t_rd
    )


def ser_ber_from_pep(pep_value: float, M: int) -> tuple[float, float]:
    """Nearest-neighbour mapping from PEP to (SER, BER); exact for DBPSK."""
    if M < 2:
        raise ValueError("M must be >= 2")
    if M == 2:
        return pep_value, pep_value
    ser = min(1.0, 2.0 * pep_value)
    ber = min(1.0, 2.0 * pep_value / np.log2(M))
    return ser, ber


def pep_point(alpha_sd: float, alpha: float, p_db: float, M: int) -> PepPoint:
    """Full analytic record (PEP, SER, BER, floor) at one power level."""
    params = PepParams.for_link(alpha_sd, alpha, p_db, M)
    p = pep(params)
    ser, ber = ser_ber_from_pep(p, M)
    floor = error_floor(params)
    return PepPoint(p_db, p, ser, ber, floor)
