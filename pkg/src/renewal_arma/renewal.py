"""Exact renewal-theoretic quantities for the count series.

Pure and delayed renewal probabilities, the autocovariance of the superposed
count series, and direct evaluation of its autocovariance generating function
from the lifetime's rational generating function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularEvaluationError
from .lifetime import LifetimeSpec, RationalPGF

DEFAULT_HORIZON = 512


def renewal_probs(spec: LifetimeSpec, N: int) -> np.ndarray:
    """``u[0..N]`` for the pure process: u_0 = 1, u_n = sum_{j<n} u_j f_{n-j}.

    Reference O(N^2) evaluation of the recursion; u_n tends to 1/E[L].
    """
    if N < 0:
        raise ValueError("horizon must be nonnegative")
    u = np.zeros(N + 1)
    u[0] = 1.0
    f = np.array([spec.pmf(n) for n in range(1, N + 1)])
    for n in range(1, N + 1):
        u[n] = np.dot(u[:n], f[n - 1 :: -1])
    return u


def delayed_probs(spec: LifetimeSpec, N: int) -> np.ndarray:
    """``nu[0..N]`` for the equilibrium-delayed process; constantly 1/E[L]."""
    if N < 0:
        raise ValueError("horizon must be nonnegative")
    b = np.array([spec.equilibrium_pmf(n) for n in range(N + 1)])
    u = renewal_probs(spec, N)
    return np.convolve(b, u)[: N + 1]


@dataclass(frozen=True)
class RenewalTable:
    """Renewal probabilities of the pure (u) and equilibrium-delayed (nu) process."""

    u: np.ndarray
    nu: np.ndarray
    mu: float
    N: int


def renewal_table(spec: LifetimeSpec, N: int = DEFAULT_HORIZON) -> RenewalTable:
    return RenewalTable(u=renewal_probs(spec, N), nu=delayed_probs(spec, N), mu=spec.mean(), N=N)


def acvf_renewal(spec: LifetimeSpec, M: int, hmax: int) -> np.ndarray:
    """Autocovariance gamma(0..hmax) of the count series: (M/mu) * (u_h - 1/mu)."""
    if M < 1:
        raise ValueError("superposition count must be positive")
    mu = spec.mean()
    u = renewal_probs(spec, hmax)
    return (M / mu) * (u - 1.0 / mu)


def gen_eval_renewal(pgf: RationalPGF, M: int, mu: float, z: complex) -> complex:
    """Autocovariance generating function of the count series at ``z``.

    ``(M/mu) * (1 - F(z)F(1/z)) / ((1 - F(z))(1 - F(1/z)))`` with F = pgf.
    The point z = 1 is a removable singularity and is rejected, as are z = 0
    and any pole of F.
    """
    z = complex(z)
    if z == 0 or abs(z - 1.0) < 1e-12:
        raise SingularEvaluationError("singular evaluation point")
    fz = pgf(z)
    fw = pgf(1.0 / z)
    if abs(1.0 - fz) < 1e-14 or abs(1.0 - fw) < 1e-14:
        raise SingularEvaluationError("singular evaluation point")
    return (M / mu) * (1.0 - fz * fw) / ((1.0 - fz) * (1.0 - fw))
