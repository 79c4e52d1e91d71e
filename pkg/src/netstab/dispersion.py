"""Per-mode dispersion relation of the inertial reaction-diffusion network.

Projecting the linearization onto a Laplacian eigenmode with eigenvalue ``lam``
gives a 2x2 matrix polynomial in the growth rate ``z``::

    [[tau_u z^2 + z - f_u - D_u lam,  -f_v                          ],
     [-g_u,                           tau_v z^2 + z - g_v - D_v lam ]]

Its determinant divided by ``tau_u * tau_v`` is the monic quartic assembled
by :func:`build_quartic`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .models import JacobianEntries
from .polynomial import ComplexQuartic, RootFindingError, spectral_abscissa
from .rh import StabilityVerdict, is_stable

ASSEMBLY_TOL = 1e-12


class AssemblyError(ArithmeticError):
    """Closed-form quartic coefficients disagree with the determinant expansion."""


@dataclass(frozen=True)
class TransportParams:
    D_u: float
    D_v: float
    tau_u: float
    tau_v: float

    def __post_init__(self):
        for name in ("D_u", "D_v", "tau_u", "tau_v"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if not (self.tau_u > 0 and self.tau_v > 0):
            raise ValueError(f"inertia constants must be positive, got tau_u={self.tau_u}, "
                             f"tau_v={self.tau_v}")
        if self.D_u < 0 or self.D_v < 0:
            raise ValueError(f"diffusivities must be nonnegative, got D_u={self.D_u}, "
                             f"D_v={self.D_v}")

    @property
    def epsilon(self) -> float:
        return 1.0 / (self.tau_u * self.tau_v)


def determinant(j: JacobianEntries, t: TransportParams, lam: complex, z: complex) -> complex:
    """The 2x2 mode determinant evaluated at growth rate ``z`` (not normalized)."""
    lam = complex(lam)
    j11 = t.tau_u * z * z + z - j.f_u - t.D_u * lam
    j22 = t.tau_v * z * z + z - j.g_v - t.D_v * lam
    return j11 * j22 - j.f_v * j.g_u


def _determinant_coefficients(j: JacobianEntries, t: TransportParams, lam: complex) -> np.ndarray:
    lam = complex(lam)
    first = np.array([t.tau_u, 1.0, -j.f_u - t.D_u * lam], dtype=complex)
    second = np.array([t.tau_v, 1.0, -j.g_v - t.D_v * lam], dtype=complex)
    coeffs = np.convolve(first, second)
    coeffs[-1] -= j.f_v * j.g_u
    return coeffs / (t.tau_u * t.tau_v)


def _closed_form(j: JacobianEntries, t: TransportParams, lam: complex) -> ComplexQuartic:
    lam = complex(lam)
    re, im = lam.real, lam.imag
    eps = t.epsilon
    Du, Dv, tu, tv = t.D_u, t.D_v, t.tau_u, t.tau_v
    cross = tu * Dv + tv * Du
    mixed = j.f_u * Dv + j.g_v * Du
    return ComplexQuartic(
        a1=eps * (tu + tv),
        a2=eps * (1.0 - j.g_v * tu - j.f_u * tv - cross * re),
        a3=eps * (-j.g_v - j.f_u - (Du + Dv) * re),
        a4=eps * (mixed * re + j.det + Du * Dv * (re * re - im * im)),
        b1=0.0,
        b2=-eps * im * cross,
        b3=-eps * im * (Du + Dv),
        b4=eps * (mixed * im + 2.0 * Du * Dv * re * im),
    )


def build_quartic(j: JacobianEntries, t: TransportParams, lam: complex) -> ComplexQuartic:
    """Monic dispersion quartic for Laplacian eigenvalue ``lam``.

    The closed-form coefficients are checked against a direct polynomial
    expansion of the mode determinant. A relative mismatch above 1e-12 raises
    :class:`AssemblyError`.
    """
    q = _closed_form(j, t, lam)
    expanded = _determinant_coefficients(j, t, lam)
    closed = np.array(q.coefficients())
    scale = np.maximum(1.0, np.abs(expanded))
    gap = np.max(np.abs(closed - expanded) / scale)
    if gap > ASSEMBLY_TOL:
        raise AssemblyError(f"quartic assembly mismatch {gap:.3e} for lam={lam}")
    return q


def published_coefficients(j: JacobianEntries, t: TransportParams, lam: complex) -> ComplexQuartic:
    """Coefficient formulas as commonly published for this system, kept verbatim.

    They differ from the determinant expansion in ``a3`` (signs of ``f_u`` and
    the diffusion term), ``a4`` (sign of ``Im(lam)^2``) and ``b4`` (factor 2 on
    the ``D_u D_v`` term). Used only for discrepancy reporting.
    """
    lam = complex(lam)
    re, im = lam.real, lam.imag
    eps = t.epsilon
    Du, Dv, tu, tv = t.D_u, t.D_v, t.tau_u, t.tau_v
    return ComplexQuartic(
        a1=eps * (tu + tv),
        a2=eps * (1.0 - j.g_v * tu - j.f_u * tv - (tu * Dv + tv * Du) * re),
        a3=eps * (-j.g_v + j.f_u + (Du + Dv) * re),
        a4=eps * ((j.f_u * Dv + j.g_v * Du) * re + j.f_u * j.g_v - j.f_v * j.g_u
                  + Du * Dv * (re * re + im * im)),
        b1=0.0,
        b2=eps * (-im * (tu * Dv + tv * Du)),
        b3=eps * (-im * (Du + Dv)),
        b4=eps * ((j.g_v * Du + j.f_u * Dv) * im + Du * Dv * re * im),
    )


def coefficient_discrepancies(j: JacobianEntries, t: TransportParams, lam: complex,
                              rtol: float = 1e-12) -> dict[str, tuple[float, float]]:
    """Coefficients where the published formulas differ from the determinant.

    Maps coefficient name to ``(derived, published)``.
    """
    derived = build_quartic(j, t, lam)
    published = published_coefficients(j, t, lam)
    out = {}
    for name in ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"):
        x, y = getattr(derived, name), getattr(published, name)
        if abs(x - y) > rtol * max(1.0, abs(x), abs(y)):
            out[name] = (x, y)
    return out


@dataclass(frozen=True)
class ModeVerdict:
    eigenvalue: complex
    quartic: ComplexQuartic
    stable: bool
    growth_rate: Optional[float]
    rh_margin: float
    rh: StabilityVerdict


def mode_verdict(j: JacobianEntries, t: TransportParams, lam: complex,
                 with_growth: bool = True) -> ModeVerdict:
    """Routh-Hurwitz verdict for one mode, with the root-based growth rate attached.

    ``growth_rate`` is None when the root finder fails or ``with_growth`` is off;
    the table verdict is always present.
    """
    q = build_quartic(j, t, lam)
    rh = is_stable(q)
    growth = None
    if with_growth:
        try:
            growth = spectral_abscissa(q)
        except RootFindingError:
            growth = None
    return ModeVerdict(eigenvalue=complex(lam), quartic=q, stable=rh.stable,
                       growth_rate=growth, rh_margin=rh.margin, rh=rh)


@dataclass(frozen=True)
class NetworkVerdict:
    stable: bool
    modes: tuple[ModeVerdict, ...]
    dominant_index: int
    homogeneous_index: int

    @property
    def dominant(self) -> ModeVerdict:
        return self.modes[self.dominant_index]

    @property
    def unstable_modes(self) -> list[ModeVerdict]:
        return [m for m in self.modes if not m.stable]

    def excited_growth_rate(self) -> float:
        """Largest growth rate over the non-homogeneous modes.

        This is the rate a perturbation with no homogeneous component sees.
        Falls back to the homogeneous mode for a single-node network.
        """
        rates = [m.growth_rate for i, m in enumerate(self.modes)
                 if i != self.homogeneous_index and m.growth_rate is not None]
        if not rates:
            return self.modes[self.homogeneous_index].growth_rate
        return max(rates)


def network_verdict(j: JacobianEntries, t: TransportParams,
                    eigenvalues: Sequence[complex]) -> NetworkVerdict:
    """Verdict over every Laplacian mode, the homogeneous one included.

    The network is stable only if every mode is. The dominant mode has the
    largest growth rate; when roots are unavailable it falls back to the
    smallest RH margin.
    """
    eigenvalues = [complex(x) for x in eigenvalues]
    if not eigenvalues:
        raise ValueError("spectrum is empty")
    modes = tuple(mode_verdict(j, t, lam) for lam in eigenvalues)
    homogeneous = int(np.argmin([abs(lam) for lam in eigenvalues]))
    if all(m.growth_rate is not None for m in modes):
        dominant = int(np.argmax([m.growth_rate for m in modes]))
    else:
        dominant = int(np.argmin([m.rh_margin for m in modes]))
    return NetworkVerdict(stable=all(m.stable for m in modes), modes=modes,
                          dominant_index=dominant, homogeneous_index=homogeneous)
