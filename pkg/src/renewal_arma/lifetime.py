"""Integer lifetime distributions with a geometric tail after a finite head.

A lifetime L takes values in {1, 2, ...} with ``P(L = n) = head[n-1]`` for
``n <= p`` and ``P(L = n) = tail_first * r**(n - p - 1)`` for ``n >= p + 1``,
where ``tail_first = (1 - r) * (1 - sum(head))`` is derived from normalization.
Equivalently the hazard rate is constant and equal to ``1 - r`` from lag
``p + 1`` on.  With ``r = 0`` the support is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import LatticeError, SingularEvaluationError, ValidationError
from .polynomials import Poly, resultant

SERIES_CHECK_TERMS = 200


@dataclass(frozen=True)
class LifetimeSpec:
    """Validated lifetime distribution; build via :func:`make_constant_hazard`."""

    head: tuple[float, ...]
    r: float
    tail_first: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tail_first", (1.0 - self.r) * (1.0 - math.fsum(self.head)))

    @property
    def p(self) -> int:
        """Number of explicit head probabilities (hazard is constant after this lag)."""
        return len(self.head)

    @property
    def finite_support(self) -> bool:
        return self.r == 0.0

    def pmf(self, n: int) -> float:
        """P(L = n) for n >= 1."""
        if n <= 0:
            raise ValueError("lifetimes are positive integers")
        if n <= self.p:
            return self.head[n - 1]
        if self.r == 0.0:
            return self.tail_first if n == self.p + 1 else 0.0
        return self.tail_first * self.r ** (n - self.p - 1)

    def survival(self, n: int) -> float:
        """P(L > n) for n >= 0, via the closed-form geometric tail."""
        if n < 0:
            return 1.0
        if n < self.p:
            return 1.0 - math.fsum(self.head[:n])
        if self.r == 0.0:
            return self.tail_first if n == self.p else 0.0
        return self.tail_first * self.r ** (n - self.p) / (1.0 - self.r)

    def hazard(self, k: int) -> float:
        """P(L = k | L >= k); equals 1 - r for every k >= p + 1."""
        if k <= 0:
            raise ValueError("hazard is defined for positive lags")
        alive = self.survival(k - 1)
        if alive <= 0.0:
            raise ValueError(f"no survivor mass at lag {k}")
        return self.pmf(k) / alive

    def mean(self) -> float:
        head_part = math.fsum((i + 1) * f for i, f in enumerate(self.head))
        if self.tail_first == 0.0:
            return head_part
        p, r = self.p, self.r
        return head_part + self.tail_first * ((p + 1) - p * r) / (1.0 - r) ** 2

    def variance(self) -> float:
        m = self.mean()
        return self._second_factorial_moment() + m - m * m

    def _second_factorial_moment(self) -> float:
        """E[L(L-1)] in closed form."""
        head_part = math.fsum((i + 1) * i * f for i, f in enumerate(self.head))
        if self.tail_first == 0.0:
            return head_part
        p, r = self.p, self.r
        s0 = 1.0 / (1.0 - r)
        s1 = r / (1.0 - r) ** 2
        s2 = r * (1.0 + r) / (1.0 - r) ** 3
        return head_part + self.tail_first * (s2 + (2 * p + 1) * s1 + p * (p + 1) * s0)

    def equilibrium_pmf(self, n: int) -> float:
        """Delay law b_n = P(L > n) / E[L] that makes the delayed process stationary."""
        if n < 0:
            raise ValueError("delays are nonnegative integers")
        return self.survival(n) / self.mean()

    def pgf(self) -> "RationalPGF":
        """Probability generating function as a ratio of polynomials.

        Numerator ``z * [f_1 + (f_2 - f_1 r) z + ... + (f_{p+1} - f_p r) z**p]``
        over denominator ``1 - r z``.  The pair is coprime because the
        numerator does not vanish at ``1/r``.
        """
        f = list(self.head) + [self.tail_first]
        num = [0.0, f[0]] + [f[i] - f[i - 1] * self.r for i in range(1, len(f))]
        return make_rational_pgf(Poly(tuple(num)), Poly((1.0, -self.r)))


def make_constant_hazard(head, r: float, *, allow_zero_f1: bool = False) -> LifetimeSpec:
    """Validated lifetime with head probabilities ``f_1..f_p`` and tail rate ``r``.

    Raises :class:`ValidationError` on a mass or range violation and
    :class:`LatticeError` if the support sits on a proper sublattice (such a
    lifetime cannot arise from any aperiodic renewal structure and the
    factorization theory excludes it).
    """
    head = tuple(float(f) for f in head)
    r = float(r)
    if not all(math.isfinite(f) for f in head) or not math.isfinite(r):
        raise ValidationError("probabilities must be finite")
    if not 0.0 <= r < 1.0:
        raise ValidationError(f"tail rate must lie in [0, 1), got {r}")
    if any(f < 0.0 for f in head):
        raise ValidationError("head probabilities must be nonnegative")
    if any(f > 1.0 for f in head):
        raise ValidationError("head probabilities must not exceed 1")
    s = math.fsum(head)
    if s > 1.0:
        raise ValidationError(f"head probabilities sum to {s} > 1")
    if r > 0.0 and s >= 1.0:
        raise ValidationError("geometric tail requires strictly positive tail mass (sum of head < 1)")

    spec = LifetimeSpec(head=head, r=r)
    f1 = head[0] if head else spec.tail_first
    if not allow_zero_f1 and f1 <= 0.0:
        raise ValidationError("f_1 must be positive (pass allow_zero_f1=True to relax)")
    if f1 >= 1.0:
        raise ValidationError("f_1 must be strictly less than 1")

    support = {i + 1 for i, f in enumerate(head) if f > 0.0}
    if spec.tail_first > 0.0:
        support.add(spec.p + 1)
        if r > 0.0:
            support.add(spec.p + 2)  # consecutive support makes the gcd 1
    if not support:
        raise ValidationError("lifetime has no support")
    if math.gcd(*support) != 1:
        raise LatticeError(f"lifetime support {sorted(support)} lies on a sublattice")
    return spec


@dataclass(frozen=True)
class RationalPGF:
    """``F(z) = num(z) / den(z)`` in lowest terms with ``den(0) = 1`` and ``num(0) = 0``."""

    num: Poly
    den: Poly

    def __call__(self, z):
        try:
            return self.num(z) / self.den(z)
        except ZeroDivisionError:
            raise SingularEvaluationError("evaluation at a pole of the generating function") from None

    def series(self, terms: int) -> list[float]:
        """Power-series coefficients of num/den by synthetic long division."""
        p, q = self.num.coeffs, self.den.coeffs
        out = []
        for n in range(terms):
            acc = p[n] if n < len(p) else 0.0
            for j in range(1, min(n, len(q) - 1) + 1):
                acc -= q[j] * out[n - j]
            out.append(acc / q[0])
        return out

    def mean(self) -> float:
        """F'(1) by the quotient rule."""
        p1, q1 = self.num(1.0), self.den(1.0)
        dp, dq = self.num.derivative()(1.0), self.den.derivative()(1.0)
        return (dp * q1 - p1 * dq) / q1 ** 2

    def variance(self) -> float:
        """F''(1) + F'(1) - F'(1)**2 by quotient-rule derivatives."""
        p1, q1 = self.num(1.0), self.den(1.0)
        dp, dq = self.num.derivative()(1.0), self.den.derivative()(1.0)
        d2p = self.num.derivative().derivative()(1.0)
        d2q = self.den.derivative().derivative()(1.0)
        f1 = (dp * q1 - p1 * dq) / q1 ** 2
        f2 = ((d2p * q1 - p1 * d2q) * q1 - 2.0 * dq * (dp * q1 - p1 * dq)) / q1 ** 3
        return f2 + f1 - f1 * f1


def make_rational_pgf(num: Poly, den: Poly) -> RationalPGF:
    """Normalize and validate a rational probability generating function."""
    if den.degree < 0 or den.coeffs[0] == 0.0:
        raise ValidationError("denominator must have a nonzero constant term")
    q0 = den.coeffs[0]
    num, den = num.scale(1.0 / q0), den.scale(1.0 / q0)
    scale = sum(abs(c) for c in num.coeffs) + sum(abs(c) for c in den.coeffs)
    if num.degree >= 0 and abs(num.coeffs[0]) > 1e-12 * scale:
        raise ValidationError("numerator must vanish at z=0 (no mass at lifetime 0)")
    if num.degree >= 0 and num.coeffs[0] != 0.0:
        num = Poly((0.0,) + num.coeffs[1:])
    if abs(num(1.0) - den(1.0)) > 1e-12 * scale:
        raise ValidationError("generating function must equal 1 at z=1")
    nn = math.sqrt(sum(c * c for c in num.coeffs)) or 1.0
    dn = math.sqrt(sum(c * c for c in den.coeffs)) or 1.0
    if abs(resultant(num.scale(1.0 / nn), den.scale(1.0 / dn))) <= 1e-10:
        raise ValidationError("numerator and denominator share a factor; reduce to lowest terms")
    pgf = RationalPGF(num=num, den=den)
    coeffs = pgf.series(SERIES_CHECK_TERMS)
    if min(coeffs) < -1e-12:
        raise ValidationError("power series of the generating function has negative coefficients")
    return pgf


def spec_to_dict(spec: LifetimeSpec) -> dict:
    return {"head": list(spec.head), "r": spec.r}


def spec_from_dict(obj: dict, *, allow_zero_f1: bool = False) -> LifetimeSpec:
    try:
        head, r = obj["head"], obj["r"]
    except (KeyError, TypeError):
        raise ValidationError("lifetime JSON must carry 'head' and 'r'") from None
    return make_constant_hazard(head, r, allow_zero_f1=allow_zero_f1)
