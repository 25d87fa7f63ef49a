"""Dense real polynomials and symmetric Laurent polynomials.

This is the computational substrate for factoring rational autocovariance
generating functions: root finding, deflation of the structural zero at z = 1,
and splitting a symmetric Laurent polynomial that is positive on the unit
circle into ``k * theta(z) * theta(1/z)`` with every root of ``theta`` strictly
outside the circle.

All values are immutable after construction; every operation is a pure
function of its inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import FactorizationError

# The zero at z = 1 is structural (coefficients cancel exactly up to rounding),
# so TOL_ZERO_AT_ONE is tight enough to separate it from accidental near-zeros.
TRIM_REL = 1e-13
TOL_ZERO_AT_ONE = 1e-10
TOL_CIRCLE = 1e-8
TOL_RESID = 1e-10
PAIRING_TOL = 1e-6


def _trim(coeffs) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    if not all(math.isfinite(x) for x in c):
        raise ValueError("coefficients must be finite real numbers")
    top = max((abs(x) for x in c), default=0.0)
    if top == 0.0:
        return ()
    cut = TRIM_REL * top
    end = len(c)
    while end > 0 and abs(c[end - 1]) < cut:
        end -= 1
    return tuple(c[:end])


def _horner(coeffs, z):
    acc = z * 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class Poly:
    """Real polynomial with dense ascending coefficients; ``coeffs[i]`` multiplies z**i.

    Trailing coefficients below ``TRIM_REL * max|c|`` are dropped at
    construction, so the leading coefficient of a nonzero Poly is nonzero and
    the zero polynomial is the empty tuple (degree -1).
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        """Evaluate at a real or complex point by Horner's rule."""
        return _horner(self.coeffs, z)

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(tuple(a + b for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=0.0)))

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(tuple(a - b for a, b in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=0.0)))

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.coeffs or not other.coeffs:
            return Poly(())
        return Poly(tuple(np.convolve(self.coeffs, other.coeffs)))

    def scale(self, s: float) -> "Poly":
        return Poly(tuple(s * c for c in self.coeffs))

    def derivative(self) -> "Poly":
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i >= 1))


@dataclass(frozen=True)
class SymLaurent:
    """Symmetric Laurent polynomial ``c[0] + sum_h c[h] * (z**h + z**-h)``.

    On the unit circle this is the real trigonometric polynomial
    ``c0 + 2 * sum_h c[h] * cos(h t)``.
    """

    c: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", _trim(self.c))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __call__(self, z):
        if not self.c:
            return z * 0
        acc = z * 0 + self.c[0]
        for h in range(1, len(self.c)):
            acc = acc + self.c[h] * (z ** h + z ** (-h))
        return acc

    def on_circle(self, t):
        """Value at ``z = exp(i t)``; always real. Accepts scalars or arrays."""
        c = np.asarray(self.c)
        if c.size == 0:
            return np.zeros_like(np.asarray(t, dtype=float))
        t = np.asarray(t, dtype=float)
        h = np.arange(1, c.size)
        return c[0] + 2.0 * (np.cos(np.multiply.outer(t, h)) @ c[1:])


def roots(p: Poly, tol_resid: float = TOL_RESID) -> list[complex]:
    """All complex roots of ``p``, with conjugate pairs exactly conjugate.

    Eigenvalues of the balanced companion matrix, polished by two Newton steps,
    then conjugate-symmetrized.  Raises if any residual exceeds
    ``tol_resid * sum|c| * max(1, |root|)**degree``.
    """
    if p.degree < 1:
        raise ValueError("no roots of a constant")
    c = np.asarray(p.coeffs, dtype=float)
    n = p.degree
    monic = c / c[-1]
    comp = np.zeros((n, n))
    if n > 1:
        comp[np.arange(1, n), np.arange(0, n - 1)] = 1.0
    comp[:, -1] = -monic[:n]
    raw = np.atleast_1d(np.linalg.eigvals(comp)).astype(complex)
    dc = p.derivative().coeffs
    polished = [_newton_polish(p.coeffs, dc, z) for z in raw]
    out = _symmetrize_conjugates(polished)
    scale = float(np.sum(np.abs(c)))
    for r in out:
        bound = tol_resid * scale * max(1.0, abs(r)) ** n
        if abs(_horner(p.coeffs, r)) > bound:
            raise FactorizationError(
                f"root residual {abs(_horner(p.coeffs, r)):.3e} exceeds {bound:.3e}; "
                "polynomial too ill-conditioned to root reliably"
            )
    return out


def _newton_polish(coeffs, dcoeffs, z: complex, steps: int = 2) -> complex:
    # Near a multiple root both f and f' are rounding-level small and their
    # ratio is noise, so a step is accepted only if it shrinks the residual.
    fz = _horner(coeffs, z)
    for _ in range(steps):
        dfz = _horner(dcoeffs, z)
        if dfz == 0:
            break
        step = fz / dfz
        if not (math.isfinite(step.real) and math.isfinite(step.imag)):
            break
        cand = z - step
        fcand = _horner(coeffs, cand)
        if abs(fcand) >= abs(fz):
            break
        z, fz = cand, fcand
    return z


def _symmetrize_conjugates(zs: list[complex]) -> list[complex]:
    # Real companion matrices give exactly conjugate eigenvalue pairs and
    # exactly real single eigenvalues; averaging each matched pair restores
    # exact symmetry after the Newton polish.
    out = [z for z in zs if z.imag == 0.0]
    pos = [z for z in zs if z.imag > 0.0]
    neg = [z for z in zs if z.imag < 0.0]
    for a in pos:
        if neg:
            j = min(range(len(neg)), key=lambda i: abs(neg[i].conjugate() - a))
            b = neg.pop(j)
            avg = 0.5 * (a + b.conjugate())
            out.extend([avg, avg.conjugate()])
        else:
            out.append(a)
    out.extend(neg)
    return out


def deflate_at_one(p: Poly, tol_zero_at_one: float = TOL_ZERO_AT_ONE) -> Poly:
    """Divide out the factor ``(1 - z)`` by synthetic division.

    Requires ``|p(1)| <= tol_zero_at_one * sum|c|``; the discarded remainder of
    the division equals ``p(1)``.
    """
    scale = sum(abs(x) for x in p.coeffs)
    if abs(p(1.0)) > tol_zero_at_one * scale:
        raise FactorizationError("no zero at z=1")
    if p.degree < 1:
        return Poly(())
    return Poly(tuple(itertools.accumulate(p.coeffs))[:-1])


def sym_product_diff(P: Poly, Q: Poly) -> SymLaurent:
    """``Q(z)Q(1/z) - P(z)P(1/z)`` as a symmetric Laurent polynomial.

    Coefficient ``c[h] = sum_j Q[j]Q[j+h] - sum_j P[j]P[j+h]``.
    """
    d = max(P.degree, Q.degree, 0)
    out = []
    for h in range(d + 1):
        qq = sum(Q.coeffs[j] * Q.coeffs[j + h] for j in range(max(0, len(Q.coeffs) - h)))
        pp = sum(P.coeffs[j] * P.coeffs[j + h] for j in range(max(0, len(P.coeffs) - h)))
        out.append(qq - pp)
    return SymLaurent(tuple(out))


def divide_sym_by_unit_pair(n: SymLaurent, tol_zero_at_one: float = TOL_ZERO_AT_ONE) -> SymLaurent:
    """Divide ``n`` by ``(2 - z - 1/z) = (1 - z)(1 - 1/z)``.

    ``n`` must vanish at z = 1; by symmetry that zero is automatically a double
    zero, so the quotient is again a symmetric Laurent polynomial.  Internally
    ``z**d * n(z)`` is divided twice by ``(1 - z)``; the identity
    ``z**d n(z) = -(1 - z)**2 * z**(d-1) * q(z)`` fixes the sign.
    """
    scale = sum(abs(x) for x in n.c)
    at_one = (n.c[0] + 2.0 * sum(n.c[1:])) if n.c else 0.0
    if abs(at_one) > tol_zero_at_one * scale:
        raise FactorizationError("numerator lacks (1-z)(1-1/z) factor")
    d = n.degree
    if d <= 0:
        return SymLaurent(())
    m = list(reversed(n.c)) + list(n.c[1:])
    m1 = list(itertools.accumulate(m))[:-1]
    m2 = list(itertools.accumulate(m1))[:-1]
    g = [-x for x in m2]  # ascending coefficients of z**(d-1) * quotient
    mid = d - 1
    return SymLaurent(tuple(0.5 * (g[mid - h] + g[mid + h]) for h in range(d)))


def factor_outside(
    d: SymLaurent,
    tol_circle: float = TOL_CIRCLE,
    grid: int = 128,
) -> tuple[Poly, float]:
    """Factor ``d(z) = k * theta(z) * theta(1/z)`` with theta-roots outside the circle.

    ``d`` must be strictly positive on the unit circle.  The ordinary
    polynomial ``z**q * d(z)`` is rooted, each root ``a`` is paired with its
    reciprocal, the outside member of each pair contributes a factor
    ``(1 - z/a)``, and ``k = d(1) / theta(1)**2``.

    Returns ``(theta, k)`` with ``theta(0) = 1`` and ``k > 0``.
    """
    if not d.c:
        raise FactorizationError("not a valid symmetric spectral density")
    ts = 2.0 * np.pi * np.arange(1, grid + 1) / grid
    vals = d.on_circle(ts)
    if np.any(vals <= 0.0):
        raise FactorizationError("not a valid symmetric spectral density")
    if d.degree == 0:
        return Poly((1.0,)), float(d.c[0])

    ordinary = Poly(tuple(reversed(d.c)) + tuple(d.c[1:]))
    rts = roots(ordinary)
    for r in rts:
        if abs(abs(r) - 1.0) < tol_circle:
            raise FactorizationError("zero on unit circle: lifetime may be lattice or input invalid")
    unmatched = list(rts)
    outside = []
    while unmatched:
        a = unmatched.pop()
        j = min(range(len(unmatched)), key=lambda i: abs(a * unmatched[i] - 1.0))
        b = unmatched.pop(j)
        if abs(a * b - 1.0) > PAIRING_TOL:
            raise FactorizationError(
                f"reciprocal root pairing failed (|a*b - 1| = {abs(a * b - 1.0):.3e}); "
                "numerical factorization unreliable"
            )
        outside.append(a if abs(a) > 1.0 else b)

    th = np.array([1.0 + 0.0j])
    for a in outside:
        th = np.convolve(th, np.array([1.0, -1.0 / a]))
    imag_residue = float(np.max(np.abs(th.imag)))
    if imag_residue > 1e-10:
        raise FactorizationError(
            f"conjugate pairing left imaginary residue {imag_residue:.3e} in theta coefficients"
        )
    theta = Poly(tuple(th.real))
    k = float(d(1.0)) / float(theta(1.0)) ** 2
    if k <= 0.0:
        raise FactorizationError("factorization constant is not positive")
    return theta, k


def resultant(P: Poly, Q: Poly) -> float:
    """Sylvester-matrix resultant; zero (up to rounding) iff P and Q share a root."""
    m, n = P.degree, Q.degree
    if m < 0 or n < 0:
        return 0.0
    if m == 0:
        return P.coeffs[0] ** n
    if n == 0:
        return Q.coeffs[0] ** m
    a = list(reversed(P.coeffs))
    b = list(reversed(Q.coeffs))
    size = m + n
    S = np.zeros((size, size))
    for i in range(n):
        S[i, i : i + m + 1] = a
    for i in range(m):
        S[n + i, i : i + n + 1] = b
    return float(np.linalg.det(S))
