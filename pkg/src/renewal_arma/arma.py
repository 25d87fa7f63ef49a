"""Spectral factorization of the count-series autocovariance into ARMA form.

The autocovariance generating function of a count series built from a
nonlattice lifetime with rational generating function P/Q factors as

    G(z) = (k M / mu) * theta(z) theta(1/z) / (phi(z) phi(1/z)),

with all roots of phi and theta strictly outside the unit circle and no root
shared between them.  ``factorize`` carries that factorization out
numerically; ``closed_form_p2`` gives the explicit coefficients available for
the two-term-head family; ``arma_acvf`` and ``gen_eval_arma`` recompute the
autocovariance from the ARMA side for cross-validation against the renewal
side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FactorizationError, SingularEvaluationError, ValidationError
from .lifetime import RationalPGF
from .polynomials import (
    TOL_CIRCLE,
    Poly,
    deflate_at_one,
    divide_sym_by_unit_pair,
    factor_outside,
    roots,
    sym_product_diff,
)

K_CROSS_CHECK_RTOL = 1e-9
COMMON_ROOT_TOL = 1e-8


@dataclass(frozen=True)
class ArmaModel:
    """Causal, invertible ARMA model for a superposed renewal count series.

    ``phi`` and ``theta`` are the AR and MA coefficients in
    ``X_t - phi_1 X_{t-1} - ... = Z_t + theta_1 Z_{t-1} + ...`` and
    ``sigma2 = k * M / mu`` is the white-noise variance.
    """

    phi: tuple[float, ...]
    theta: tuple[float, ...]
    k: float
    M: int
    mu: float
    sigma2: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.sigma2 is None:
            object.__setattr__(self, "sigma2", self.k * self.M / self.mu)


def phi_poly(model: ArmaModel) -> Poly:
    """AR characteristic polynomial 1 - phi_1 z - ... - phi_p z**p."""
    return Poly((1.0,) + tuple(-c for c in model.phi))


def theta_poly(model: ArmaModel) -> Poly:
    """MA characteristic polynomial 1 + theta_1 z + ... + theta_q z**q."""
    return Poly((1.0,) + tuple(model.theta))


def factorize(pgf: RationalPGF, M: int) -> ArmaModel:
    """Factor the autocovariance generating function of the count series.

    Pipeline: deflate the structural zero of ``den - num`` at z = 1 and
    normalize to get phi; form ``den*den(1/z) - num*num(1/z)``; divide out its
    double zero at z = 1; factor what remains into ``k_raw * theta theta(1/z)``
    with theta-roots outside the circle.  The constant is cross-checked
    against the closed form ``Var[L] * den(1)**2 / (theta(1)**2 * den(0)**2)``;
    disagreement beyond 1e-9 relative is treated as a bug, not a warning.
    """
    if M < 1:
        raise ValueError("superposition count must be positive")
    P, Q = pgf.num, pgf.den
    deflated = deflate_at_one(Q - P)
    q0 = deflated.coeffs[0] if deflated.degree >= 0 else 0.0
    if q0 == 0.0:
        raise FactorizationError("degenerate AR factor: constant term vanished")
    ar = deflated.scale(1.0 / q0)
    phi = tuple(-c for c in ar.coeffs[1:])

    numerator = sym_product_diff(P, Q)
    spectral = divide_sym_by_unit_pair(numerator)
    theta_p, k_raw = factor_outside(spectral)
    theta = tuple(theta_p.coeffs[1:])
    k = k_raw / Q.coeffs[0] ** 2

    mu = pgf.mean()
    var_l = pgf.variance()
    k_formula = var_l * Q(1.0) ** 2 / (theta_p(1.0) ** 2 * Q.coeffs[0] ** 2)
    if abs(k - k_formula) > K_CROSS_CHECK_RTOL * abs(k_formula):
        raise FactorizationError(
            f"factorization inconsistent with the closed-form constant: "
            f"{k!r} vs {k_formula!r}"
        )

    model = ArmaModel(phi=phi, theta=theta, k=k, M=M, mu=mu)
    validate_model(model)
    return model


def closed_form_p2(f1: float, f2: float, r: float) -> tuple[tuple[float, ...], tuple[float, ...], float]:
    """Explicit ARMA(2,1) coefficients for a two-term head with tail rate r.

    With ``f3 = (1 - r)(1 - f1 - f2)`` the AR coefficients are
    ``phi_1 = r + f1 - 1`` and ``phi_2 = f2 r - f3``.  The spectral numerator
    reduces to ``side*z + center + side/z``; its outside root gives the single
    MA coefficient, and the scale constant comes from matching constant terms.
    When ``side`` vanishes (``f3 = f2 r``) the MA order drops to zero.

    Returns ``(phi, theta, k)``.
    """
    f3 = (1.0 - r) * (1.0 - f1 - f2)
    # route through Poly so the trim semantics match the numeric factorization
    # (when f3 = f2 r both phi_2 and the MA side coefficient vanish together)
    ar = Poly((1.0, -(r + f1 - 1.0), -(f2 * r - f3)))
    phi = tuple(-c for c in ar.coeffs[1:])
    side = f1 * (f3 - f2 * r)
    center = f1 * f2 * (1.0 - r) ** 2 + f1 * f3 * (2.0 - r) + r * (1.0 - f1 ** 2 - f2 ** 2) + f2 * f3
    constant_term = (
        (1.0 - f1 ** 2 - f2 ** 2 - f3 ** 2)
        + r ** 2 * (1.0 - f1 ** 2 - f2 ** 2)
        + 2.0 * f1 * f2 * r
        + 2.0 * f2 * f3 * r
    )
    if abs(side) <= 1e-13 * abs(center):
        return phi, (), constant_term / 2.0
    root_out = (-center - math.sqrt(center ** 2 - 4.0 * side ** 2)) / (2.0 * side)
    ma1 = -1.0 / root_out
    k = constant_term / (2.0 + 2.0 * ma1 ** 2 - 2.0 * ma1)
    return phi, (ma1,), k


def arma_acvf(model: ArmaModel, hmax: int) -> np.ndarray:
    """Autocovariance gamma(0..hmax) via the truncated infinite moving average.

    psi(z) = theta(z)/phi(z) is expanded until the geometric tail bound
    ``rho**T / (1 - rho) < 1e-14`` holds, with rho the largest reciprocal
    modulus of the AR roots; then gamma(h) = sigma2 * sum_j psi_j psi_{j+h}.
    """
    if hmax < 0:
        raise ValueError("hmax must be nonnegative")
    p, q = len(model.phi), len(model.theta)
    if p == 0:
        T = q + 1
    else:
        rho = max(1.0 / abs(z) for z in roots(phi_poly(model)))
        if rho > 1.0 - 1e-6:
            raise FactorizationError("numerically non-causal")
        T = max(q + 1, math.ceil(math.log(1e-14 * (1.0 - rho)) / math.log(rho)) + 1)
    length = T + hmax
    psi = np.zeros(length)
    psi[0] = 1.0
    for j in range(1, length):
        acc = model.theta[j - 1] if j <= q else 0.0
        for i in range(1, min(j, p) + 1):
            acc += model.phi[i - 1] * psi[j - i]
        psi[j] = acc
    return model.sigma2 * np.array([np.dot(psi[: length - h], psi[h:]) for h in range(hmax + 1)])


def gen_eval_arma(model: ArmaModel, z: complex) -> complex:
    """``sigma2 * theta(z) theta(1/z) / (phi(z) phi(1/z))`` at ``z``."""
    z = complex(z)
    if z == 0:
        raise SingularEvaluationError("singular evaluation point")
    ar, ma = phi_poly(model), theta_poly(model)
    a, b = ar(z), ar(1.0 / z)
    if abs(a) < 1e-12 or abs(b) < 1e-12:
        raise SingularEvaluationError("pole of the generating function")
    return model.sigma2 * ma(z) * ma(1.0 / z) / (a * b)


@dataclass(frozen=True)
class CausalityReport:
    """Root moduli of the AR and MA characteristic polynomials."""

    ar_root_moduli: tuple[float, ...]
    ma_root_moduli: tuple[float, ...]
    tol: float
    passes: bool


def check_causal_invertible(model: ArmaModel, tol_circle: float = TOL_CIRCLE) -> CausalityReport:
    """Diagnostic: every root of phi and theta must lie outside the unit circle."""
    ar = phi_poly(model)
    ma = theta_poly(model)
    ar_mod = tuple(float(abs(z)) for z in roots(ar)) if ar.degree >= 1 else ()
    ma_mod = tuple(float(abs(z)) for z in roots(ma)) if ma.degree >= 1 else ()
    ok = all(m > 1.0 + tol_circle for m in ar_mod + ma_mod)
    return CausalityReport(ar_root_moduli=ar_mod, ma_root_moduli=ma_mod, tol=tol_circle, passes=ok)


def validate_model(model: ArmaModel, tol_circle: float = TOL_CIRCLE) -> None:
    """Raise unless the model is causal, invertible, and nondegenerate."""
    if model.k <= 0.0 or model.sigma2 <= 0.0:
        raise FactorizationError("model constants must be positive")
    ar, ma = phi_poly(model), theta_poly(model)
    ar_roots = roots(ar) if ar.degree >= 1 else []
    ma_roots = roots(ma) if ma.degree >= 1 else []
    for z in ar_roots:
        if abs(z) <= 1.0 + tol_circle:
            raise FactorizationError(f"AR root {z} not outside the unit circle")
    for z in ma_roots:
        if abs(z) <= 1.0 + tol_circle:
            raise FactorizationError(f"MA root {z} not outside the unit circle")
    for a in ar_roots:
        for b in ma_roots:
            if abs(a - b) < COMMON_ROOT_TOL:
                raise FactorizationError(f"AR and MA parts share the root {a}")


def second_moment_limit(pgf: RationalPGF, eps: tuple[float, float] = (1e-3, 1e-4)) -> float:
    """Limit of ``(1 - F(z)F(1/z)) / ((1-z)(1-1/z))`` as z -> 1; equals Var[L].

    Evaluated at z = 1 + eps and Richardson-extrapolated in the symmetric
    variable ``s = (z-1)**2 / z``: the ratio is invariant under z -> 1/z, so
    its expansion around z = 1 has no odd terms in s, and one linear-in-s
    extrapolation step removes the entire leading error.
    """
    ss, hs = [], []
    for e in eps:
        z = 1.0 + e
        h = (1.0 - pgf(z) * pgf(1.0 / z)) / ((1.0 - z) * (1.0 - 1.0 / z))
        ss.append((z - 1.0) ** 2 / z)
        hs.append(h)
    (s1, s2), (h1, h2) = ss, hs
    return (s1 * h2 - s2 * h1) / (s1 - s2)


def unit_circle_grid(n: int = 64) -> np.ndarray:
    """Grid points exp(2 pi i j / n) for j = 1..n-1 (z = 1 excluded)."""
    return np.exp(2j * np.pi * np.arange(1, n) / n)


def model_to_dict(model: ArmaModel) -> dict:
    return {
        "phi": list(model.phi),
        "theta": list(model.theta),
        "k": model.k,
        "M": model.M,
        "mu": model.mu,
        "sigma2": model.sigma2,
    }


def model_from_dict(obj: dict) -> ArmaModel:
    """Deserialize without validating; run :func:`validate_model` to gate it."""
    try:
        return ArmaModel(
            phi=tuple(float(x) for x in obj["phi"]),
            theta=tuple(float(x) for x in obj["theta"]),
            k=float(obj["k"]),
            M=int(obj["M"]),
            mu=float(obj["mu"]),
            sigma2=float(obj["sigma2"]) if obj.get("sigma2") is not None else None,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed model JSON: {e}") from None
