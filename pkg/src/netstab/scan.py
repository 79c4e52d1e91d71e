"""Stability region maps over the eigenvalue plane or over model parameter planes."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dispersion import TransportParams, mode_verdict
from .models import BrusselatorParams, JacobianEntries, ReactionModel, brusselator

PARAMETER_AXES = ("b", "c", "tau_u", "tau_v", "D_u", "D_v", "Lambda_Re", "Lambda_Im")
CSV_HEADER = ["axis1", "axis2", "stable", "margin", "growth_rate"]


@dataclass(frozen=True)
class AxisSpec:
    name: str
    min: float
    max: float
    resolution: int

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ValueError(f"axis {self.name!r}: resolution must be an integer >= 2")
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or not self.min < self.max:
            raise ValueError(f"axis {self.name!r}: need finite min < max")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, int(self.resolution))


@dataclass(eq=False)
class RegionMap:
    axis1: AxisSpec
    axis2: AxisSpec
    stable: np.ndarray        # bool, shape (res1, res2)
    margin: np.ndarray
    growth_rate: np.ndarray   # nan where roots were not computed
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.axis1.resolution, self.axis2.resolution)
        for name in ("stable", "margin", "growth_rate"):
            if np.shape(getattr(self, name)) != shape:
                raise ValueError(f"{name} grid has shape {np.shape(getattr(self, name))}, "
                                 f"expected {shape}")

    @property
    def stable_fraction(self) -> float:
        return float(np.mean(self.stable))

    def same_as(self, other: "RegionMap") -> bool:
        """Bit-for-bit equality of axes, grids and context."""
        return (self.axis1 == other.axis1 and self.axis2 == other.axis2
                and np.array_equal(self.stable, other.stable)
                and np.array_equal(self.margin, other.margin)
                and np.array_equal(self.growth_rate, other.growth_rate, equal_nan=True)
                and self.context == other.context)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        x1, x2 = self.axis1.values, self.axis2.values
        for i, a in enumerate(x1):
            for k, b in enumerate(x2):
                writer.writerow([repr(float(a)), repr(float(b)), int(self.stable[i, k]),
                                 repr(float(self.margin[i, k])),
                                 repr(float(self.growth_rate[i, k]))])
        return buf.getvalue()


def read_region_csv(text: str, names: tuple[str, str] = ("axis1", "axis2")) -> RegionMap:
    """Rebuild a :class:`RegionMap` from its CSV form (axes inferred from the rows)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    data = rows[1:]
    try:
        a1 = [float(r[0]) for r in data]
        a2 = [float(r[1]) for r in data]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"malformed region CSV: {exc}") from None
    v1 = list(dict.fromkeys(a1))
    v2 = list(dict.fromkeys(a2))
    shape = (len(v1), len(v2))
    if len(data) != shape[0] * shape[1]:
        raise ValueError("region CSV is not a full row-major grid")
    stable = np.array([r[2] == "1" for r in data]).reshape(shape)
    margin = np.array([float(r[3]) for r in data]).reshape(shape)
    growth = np.array([float(r[4]) for r in data]).reshape(shape)
    return RegionMap(AxisSpec(names[0], v1[0], v1[-1], len(v1)),
                     AxisSpec(names[1], v2[0], v2[-1], len(v2)),
                     stable, margin, growth)


def _resolution_pair(resolution) -> tuple[int, int]:
    if np.ndim(resolution) == 0:
        return int(resolution), int(resolution)
    r1, r2 = resolution
    return int(r1), int(r2)


def scan_lambda_plane(j: JacobianEntries, t: TransportParams, re_range: tuple[float, float],
                      im_range: tuple[float, float], resolution, with_growth: bool = True,
                      context: Optional[dict] = None) -> RegionMap:
    """Mode verdicts on a grid of Laplacian eigenvalues (``Lambda_Re`` x ``Lambda_Im``)."""
    if re_range[1] > 0:
        raise ValueError("Lambda_Re range must lie in (-inf, 0]")
    r1, r2 = _resolution_pair(resolution)
    ax1 = AxisSpec("Lambda_Re", re_range[0], re_range[1], r1)
    ax2 = AxisSpec("Lambda_Im", im_range[0], im_range[1], r2)
    stable = np.zeros((r1, r2), dtype=bool)
    margin = np.zeros((r1, r2))
    growth = np.full((r1, r2), np.nan)
    for i, re in enumerate(ax1.values):
        for k, im in enumerate(ax2.values):
            mv = mode_verdict(j, t, complex(re, im), with_growth=with_growth)
            stable[i, k] = mv.stable
            margin[i, k] = mv.rh_margin
            if mv.growth_rate is not None:
                growth[i, k] = mv.growth_rate
    ctx = {"jacobian": (j.f_u, j.f_v, j.g_u, j.g_v), "D_u": t.D_u, "D_v": t.D_v,
           "tau_u": t.tau_u, "tau_v": t.tau_v}
    ctx.update(context or {})
    return RegionMap(ax1, ax2, stable, margin, growth, ctx)


def scan_parameter_plane(model: BrusselatorParams | ReactionModel, t_template: TransportParams,
                         axis1: str, axis2: str, ranges: Sequence[tuple[float, float]],
                         resolution, lambda_samples: Sequence[complex],
                         with_growth: bool = True) -> RegionMap:
    """Stability over a plane of two named parameters.

    A grid point is stable only if every eigenvalue in ``lambda_samples`` gives
    a stable mode. Its margin is the smallest mode margin and its growth rate
    the largest mode growth rate. An axis named ``Lambda_Re`` or ``Lambda_Im``
    overrides that component of every sample. Axes ``b`` and ``c`` need a
    Brusselator (its parameters, or a model built by :func:`brusselator`).
    """
    for name in (axis1, axis2):
        if name not in PARAMETER_AXES:
            raise ValueError(f"unknown axis {name!r}; choose from {', '.join(PARAMETER_AXES)}")
    if axis1 == axis2:
        raise ValueError("the two axes must differ")
    samples = [complex(x) for x in lambda_samples]
    if not samples:
        raise ValueError("lambda_samples must not be empty")
    if len(ranges) != 2:
        raise ValueError("need one (min, max) range per axis")

    if isinstance(model, BrusselatorParams):
        kinetic = {"b": model.b, "c": model.c}
        fixed_jac = None
    elif model.name == "brusselator":
        kinetic = dict(model.params)
        fixed_jac = None
    else:
        if {"b", "c"} & {axis1, axis2}:
            raise ValueError("axes 'b' and 'c' require a Brusselator model")
        kinetic = {}
        fixed_jac = model.jacobian

    r1, r2 = _resolution_pair(resolution)
    ax1 = AxisSpec(axis1, ranges[0][0], ranges[0][1], r1)
    ax2 = AxisSpec(axis2, ranges[1][0], ranges[1][1], r2)
    base = {"D_u": t_template.D_u, "D_v": t_template.D_v,
            "tau_u": t_template.tau_u, "tau_v": t_template.tau_v, **kinetic}

    stable = np.zeros((r1, r2), dtype=bool)
    margin = np.zeros((r1, r2))
    growth = np.full((r1, r2), np.nan)
    for i, x in enumerate(ax1.values):
        for k, y in enumerate(ax2.values):
            point = dict(base)
            point[axis1] = float(x)
            point[axis2] = float(y)
            jac = fixed_jac or brusselator(BrusselatorParams(point["b"], point["c"])).jacobian
            t = TransportParams(point["D_u"], point["D_v"], point["tau_u"], point["tau_v"])
            lams = []
            for lam in samples:
                re = point.get("Lambda_Re", lam.real)
                im = point.get("Lambda_Im", lam.imag)
                lams.append(complex(re, im))
            verdicts = [mode_verdict(jac, t, lam, with_growth=with_growth) for lam in lams]
            stable[i, k] = all(v.stable for v in verdicts)
            margin[i, k] = min(v.rh_margin for v in verdicts)
            rates = [v.growth_rate for v in verdicts if v.growth_rate is not None]
            if with_growth and len(rates) == len(verdicts):
                growth[i, k] = max(rates)
    ctx = {"base": base, "lambda_samples": [repr(s) for s in samples]}
    return RegionMap(ax1, ax2, stable, margin, growth, ctx)


# Four reference configurations for region maps. "inertia_onset" loses stability
# on the real axis (symmetric coupling) once tau_v is large; the other three
# are stable on the real axis and lose stability only through Lambda_Im.
REGION_PRESETS = {
    "inertia_onset": {"b": 1.3, "c": 14.0, "D_u": 0.5, "D_v": 0.5, "tau_u": 2.0, "tau_v": 5.0},
    "baseline": {"b": 1.3, "c": 14.0, "D_u": 0.5, "D_v": 0.5, "tau_u": 2.0, "tau_v": 1.0},
    "equal_inertia": {"b": 1.3, "c": 14.0, "D_u": 0.5, "D_v": 0.5, "tau_u": 1.0, "tau_v": 1.0},
    "strong_feedback": {"b": 2.0, "c": 10.0, "D_u": 1.0, "D_v": 1.0, "tau_u": 1.5, "tau_v": 0.5},
}


def preset(name: str) -> tuple[JacobianEntries, TransportParams]:
    try:
        p = REGION_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(REGION_PRESETS)}") from None
    model = brusselator(BrusselatorParams(p["b"], p["c"]))
    return model.jacobian, TransportParams(p["D_u"], p["D_v"], p["tau_u"], p["tau_v"])


def to_svg(region: RegionMap, points: Sequence[complex] = (), cell: int = 6,
           stable_fill: str = "#cfe8cf", unstable_fill: str = "#f2b8b5") -> str:
    """Heatmap of a region map; ``points`` (complex, Re on axis1, Im on axis2) are overlaid."""
    r1, r2 = region.stable.shape
    pad = 40
    width, height = r1 * cell + 2 * pad, r2 * cell + 2 * pad
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for i in range(r1):
        for k in range(r2):
            fill = stable_fill if region.stable[i, k] else unstable_fill
            x = pad + i * cell
            y = pad + (r2 - 1 - k) * cell
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}"/>')
    a1, a2 = region.axis1, region.axis2
    for p in points:
        fx = (p.real - a1.min) / (a1.max - a1.min)
        fy = (p.imag - a2.min) / (a2.max - a2.min)
        if 0 <= fx <= 1 and 0 <= fy <= 1:
            cx = pad + fx * (r1 - 1) * cell + cell / 2
            cy = pad + (1 - fy) * (r2 - 1) * cell + cell / 2
            parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2.5" fill="#1f3fbf"/>')
    parts.append(f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle" '
                 f'font-size="12">{a1.name} [{a1.min:g}, {a1.max:g}]</text>')
    parts.append(f'<text x="12" y="{height / 2:.0f}" font-size="12" '
                 f'transform="rotate(-90 12 {height / 2:.0f})" text-anchor="middle">'
                 f'{a2.name} [{a2.min:g}, {a2.max:g}]</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
