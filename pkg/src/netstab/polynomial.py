"""Complex polynomial primitives and a simultaneous root finder.

Roots are located with the Aberth-Ehrlich iteration. The root finder is the
independent oracle against which the Routh-Hurwitz table is cross-checked, so
it deliberately shares no code with :mod:`netstab.rh`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 500

_EPS = np.finfo(float).eps


class RootFindingError(ArithmeticError):
    """Raised when the root iteration hits its cap without converging.

    The best iterate and its residuals are kept on the exception.
    """

    def __init__(self, message: str, best: np.ndarray, residual: np.ndarray):
        super().__init__(message)
        self.best = best
        self.residual = residual


def _check_finite(z: complex, what: str = "value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients, highest degree first."""

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(_check_finite(c, "coefficient") for c in self.coefficients)
        if len(coeffs) < 2:
            raise ValueError("polynomial degree must be at least 1")
        if coeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "ComplexPolynomial":
        coeffs = np.array([leading], dtype=complex)
        for r in roots:
            coeffs = np.convolve(coeffs, [1.0, -complex(r)])
        return cls(tuple(coeffs))

    def as_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)


@dataclass(frozen=True)
class ComplexQuartic:
    """Monic quartic ``z^4 + sum_j (a_j + i b_j) z^(4-j)``."""

    a1: float
    a2: float
    a3: float
    a4: float
    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0
    b4: float = 0.0

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[complex]) -> "ComplexQuartic":
        """Build from the four complex coefficients below the leading 1."""
        if len(coeffs) != 4:
            raise ValueError(f"expected 4 coefficients, got {len(coeffs)}")
        c = [complex(x) for x in coeffs]
        return cls(c[0].real, c[1].real, c[2].real, c[3].real,
                   c[0].imag, c[1].imag, c[2].imag, c[3].imag)

    @property
    def a(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    @property
    def b(self) -> tuple[float, float, float, float]:
        return (self.b1, self.b2, self.b3, self.b4)

    def coefficients(self) -> tuple[complex, ...]:
        return (1.0 + 0j,) + tuple(complex(x, y) for x, y in zip(self.a, self.b))

    def to_polynomial(self) -> ComplexPolynomial:
        return ComplexPolynomial(self.coefficients())

    def conjugate(self) -> "ComplexQuartic":
        return ComplexQuartic(*self.a, *(-x for x in self.b))


def _as_polynomial(p) -> ComplexPolynomial:
    if isinstance(p, ComplexQuartic):
        return p.to_polynomial()
    if isinstance(p, ComplexPolynomial):
        return p
    return ComplexPolynomial(tuple(p))


def evaluate(p: ComplexPolynomial | ComplexQuartic, z: complex) -> complex:
    """Horner evaluation of ``p`` at ``z``."""
    p = _as_polynomial(p)
    z = _check_finite(z, "evaluation point")
    acc = 0j
    for c in p.coefficients:
        acc = acc * z + c
    return acc


def _horner(coeffs: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, derivative and rounding-error bound of the polynomial at each z."""
    p = np.full_like(z, coeffs[0])
    dp = np.zeros_like(z)
    az = np.abs(z)
    bound = np.full(z.shape, abs(coeffs[0]))
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
        bound = bound * az + abs(c)
    return p, dp, bound


def residuals(p: ComplexPolynomial | ComplexQuartic, zs: Iterable[complex]) -> np.ndarray:
    coeffs = _as_polynomial(p).as_array()
    values, _, _ = _horner(coeffs, np.asarray(list(zs), dtype=complex))
    return np.abs(values)


def roots(p: ComplexPolynomial | ComplexQuartic, tol: float = DEFAULT_TOL,
          max_iter: int = DEFAULT_MAX_ITER) -> list[complex]:
    """All roots of ``p`` with multiplicity, via Aberth-Ehrlich iteration.

    Starting points sit on a circle of radius ``1 + max |c_k / c_0|``, which
    encloses every root. A root stops moving once its correction is at the
    level of machine precision, or once its residual drops below the Horner
    rounding bound (the best achievable at a multiple root).

    Returned roots satisfy ``|p(r)| <= tol * (1 + max |c_k|)`` for well-scaled
    inputs. Raises :class:`RootFindingError` after ``max_iter`` sweeps.
    """
    poly = _as_polynomial(p)
    coeffs = poly.as_array()
    scale = 1.0 + np.max(np.abs(coeffs))
    monic = coeffs / coeffs[0]
    n = poly.degree
    if n == 1:
        return [complex(-monic[1])]

    radius = 1.0 + np.max(np.abs(monic[1:]))
    # the half-step offset keeps the start set off conjugate symmetry
    angles = 2.0 * np.pi * (np.arange(n) + 0.25) / n
    z = radius * np.exp(1j * angles)
    done = np.zeros(n, dtype=bool)
    off_diag = ~np.eye(n, dtype=bool)

    for _ in range(max_iter):
        val, dval, bound = _horner(monic, z)
        small = np.abs(val) <= 4.0 * n * _EPS * bound
        done |= small
        if done.all():
            break
        diff = z[:, None] - z[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(off_diag, 1.0 / np.where(off_diag, diff, 1.0), 0.0)
            repulsion = inv.sum(axis=1)
            ratio = val / dval
            step = ratio / (1.0 - ratio * repulsion)
        bad = ~np.isfinite(step)
        if bad.any():
            # derivative vanished or iterates collided; nudge instead of dividing
            step[bad] = 1e-8 * radius * np.exp(1j * (angles[bad] + 1.0))
        step[done] = 0.0
        z = z - step
        done |= np.abs(step) <= 4.0 * _EPS * np.maximum(np.abs(z), _EPS)
    else:
        val, _, bound = _horner(monic, z)
        raise RootFindingError(
            f"Aberth iteration did not converge in {max_iter} sweeps",
            best=z.copy(), residual=np.abs(val) * abs(coeffs[0]))

    res = residuals(poly, z)
    _, _, bound = _horner(coeffs, z)
    allowed = np.maximum(tol * scale, 8.0 * n * _EPS * bound)
    if np.any(res > allowed):
        raise RootFindingError(
            "roots converged but residual exceeds tolerance", best=z.copy(), residual=res)
    return [complex(r) for r in z]


def spectral_abscissa(p: ComplexPolynomial | ComplexQuartic, **kwargs) -> float:
    """Largest real part among the roots of ``p``."""
    return max(r.real for r in roots(p, **kwargs))

