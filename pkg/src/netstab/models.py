"""Two-species reaction kinetics: equilibria and Jacobians."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Kinetics = Callable[[np.ndarray, np.ndarray], np.ndarray]


class EquilibriumError(ArithmeticError):
    def __init__(self, message: str, last_iterate: tuple[float, float]):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class JacobianEntries:
    f_u: float
    f_v: float
    g_u: float
    g_v: float

    def __post_init__(self):
        for name in ("f_u", "f_v", "g_u", "g_v"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @property
    def trace(self) -> float:
        return self.f_u + self.g_v

    @property
    def det(self) -> float:
        return self.f_u * self.g_v - self.f_v * self.g_u

    def matrix(self) -> np.ndarray:
        return np.array([[self.f_u, self.f_v], [self.g_u, self.g_v]])


@dataclass(frozen=True)
class ReactionModel:
    f: Kinetics = field(repr=False)
    g: Kinetics = field(repr=False)
    equilibrium: tuple[float, float]
    jacobian: JacobianEntries
    name: str = "generic"
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BrusselatorParams:
    b: float
    c: float

    def __post_init__(self):
        if not (self.b > 0 and self.c > 0):
            raise ValueError(f"Brusselator parameters must be positive, got b={self.b}, c={self.c}")


def brusselator(params: BrusselatorParams) -> ReactionModel:
    """Brusselator with kinetics ``f = 1 - (b+1) u + c u^2 v``, ``g = b u - c u^2 v``.

    Fixed point ``(1, b/c)`` with Jacobian ``[[b-1, c], [-b, -c]]``.
    """
    b, c = params.b, params.c

    def f(u, v):
        return 1.0 - (b + 1.0) * u + c * u * u * v

    def g(u, v):
        return b * u - c * u * u * v

    return ReactionModel(
        f=f, g=g,
        equilibrium=(1.0, b / c),
        jacobian=JacobianEntries(f_u=b - 1.0, f_v=c, g_u=-b, g_v=-c),
        name="brusselator",
        params={"b": b, "c": c},
    )


def isolated_stability(j: JacobianEntries) -> bool:
    """Negative trace and positive determinant of the reaction Jacobian."""
    return j.trace < 0 and j.det > 0


def finite_difference_jacobian(f: Kinetics, g: Kinetics, u: float, v: float) -> JacobianEntries:
    """Central differences with relative step ``1e-6 * (1 + |x|)``."""
    hu = 1e-6 * (1.0 + abs(u))
    hv = 1e-6 * (1.0 + abs(v))
    return JacobianEntries(
        f_u=(f(u + hu, v) - f(u - hu, v)) / (2 * hu),
        f_v=(f(u, v + hv) - f(u, v - hv)) / (2 * hv),
        g_u=(g(u + hu, v) - g(u - hu, v)) / (2 * hu),
        g_v=(g(u, v + hv) - g(u, v - hv)) / (2 * hv),
    )


def generic_model(f: Kinetics, g: Kinetics, initial_guess: tuple[float, float],
                  tol: float = 1e-10, max_iter: int = 100, name: str = "generic") -> ReactionModel:
    """Locate an equilibrium of ``(f, g)`` by damped Newton and linearize there.

    Raises :class:`EquilibriumError` (carrying the last iterate) if the
    residual does not fall below ``tol`` within ``max_iter`` iterations.
    """
    x = np.array(initial_guess, dtype=float)

    def residual(y):
        return np.array([f(y[0], y[1]), g(y[0], y[1])], dtype=float)

    r = residual(x)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            break
        J = finite_difference_jacobian(f, g, x[0], x[1]).matrix()
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise EquilibriumError("singular Jacobian during Newton iteration",
                                   (float(x[0]), float(x[1]))) from None
        # halve the step until the residual norm decreases
        t = 1.0
        norm = np.linalg.norm(r)
        while t > 1e-6:
            trial = x + t * step
            r_trial = residual(trial)
            if np.all(np.isfinite(r_trial)) and np.linalg.norm(r_trial) < norm:
                break
            t *= 0.5
        x, r = trial, r_trial
    if not np.max(np.abs(r)) <= tol:
        raise EquilibriumError(f"Newton iteration did not converge in {max_iter} steps",
                               (float(x[0]), float(x[1])))
    u, v = float(x[0]), float(x[1])
    return ReactionModel(f=f, g=g, equilibrium=(u, v),
                         jacobian=finite_difference_jacobian(f, g, u, v), name=name)
