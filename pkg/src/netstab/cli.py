"""Command-line front end: ``netstab {spectrum,check,scan,simulate,roots}``.

Runs are described by an INI-style config file; see the README for the grammar.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .dispersion import TransportParams, coefficient_discrepancies, network_verdict
from .models import BrusselatorParams, JacobianEntries, ReactionModel, brusselator
from .network import DirectedNetwork, newman_watts_directed, read_edge_list
from .polynomial import ComplexQuartic, RootFindingError, roots
from .rh import build_table, compare_with_table, is_stable, proposition_conditions
from .scan import (PARAMETER_AXES, REGION_PRESETS, preset, scan_lambda_plane,
                   scan_parameter_plane, to_svg)
from .sim import default_time_step, integrate, perturbation_experiment, perturbed_state

DEFAULT_RE_RANGE = (-6.0, 0.0)
DEFAULT_IM_RANGE = (-3.0, 3.0)
DEFAULT_RESOLUTION = 61
# a step this many times the heuristic gets a warning
DT_WARN_FACTOR = 10.0


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config

@dataclass
class NetworkSection:
    generator: str
    n: int = 0
    k: int = 0
    p: float = 0.0
    seed: int = 0
    path: Optional[Path] = None
    symmetrize: bool = False


@dataclass
class ScanSection:
    kind: str = "lambda_plane"
    axis1: str = "Lambda_Re"
    axis2: str = "Lambda_Im"
    range1: tuple[float, float] = DEFAULT_RE_RANGE
    range2: tuple[float, float] = DEFAULT_IM_RANGE
    resolution: tuple[int, int] = (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)
    lambda_samples: object = None   # list of complex, or "network"
    preset: Optional[str] = None


@dataclass
class SimSection:
    dt: Optional[float] = None
    horizon: float = 200.0
    amplitude: float = 1e-6
    seed: int = 0
    skip_fraction: float = 0.2
    linear_ceiling: Optional[float] = 1e-2
    samples: int = 4000


@dataclass
class RunConfig:
    model: Optional[dict] = None
    transport: Optional[dict] = None
    network: Optional[NetworkSection] = None
    scan: Optional[ScanSection] = None
    sim: Optional[SimSection] = None
    source: Optional[Path] = None
    raw: dict = field(default_factory=dict)

    def require(self, *names: str):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"config is missing the [{name}] section")


def _get(section, key, conv, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"[{section.name}] is missing required key {key!r}")
        return default
    text = section[key].strip()
    try:
        return conv(text)
    except (ValueError, TypeError):
        raise ConfigError(f"[{section.name}] {key} = {text!r}: cannot parse as "
                          f"{getattr(conv, '__name__', 'value')}") from None


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(text)
    return int(value)


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(text)
    return float(parts[0]), float(parts[1])


def _resolution(text: str) -> tuple[int, int]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) == 1:
        return _int(parts[0]), _int(parts[0])
    if len(parts) == 2:
        return _int(parts[0]), _int(parts[1])
    raise ValueError(text)


def _optional_float(text: str) -> Optional[float]:
    return None if text.lower() == "none" else float(text)


def _samples(text: str):
    if text.lower() == "network":
        return "network"
    out = [complex(p.strip().replace(" ", "")) for p in text.split(",") if p.strip()]
    if not out:
        raise ValueError(text)
    return out


_KNOWN_KEYS = {
    "model": {"name", "b", "c", "f_u", "f_v", "g_u", "g_v"},
    "transport": {"D_u", "D_v", "tau_u", "tau_v"},
    "network": {"generator", "n", "k", "p", "seed", "path", "symmetrize"},
    "scan": {"kind", "axis1", "axis2", "axis1_range", "axis2_range", "re_range", "im_range",
             "resolution", "lambda_samples", "preset"},
    "sim": {"dt", "horizon", "amplitude", "seed", "skip_fraction", "linear_ceiling", "samples"},
}


def parse_config(text: str, source: Optional[Path] = None) -> RunConfig:
    """Parse config text; relative edge-list paths resolve against ``source``'s directory."""
    parser = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                       interpolation=None, empty_lines_in_values=False)
    parser.optionxform = str   # keys are case-sensitive
    try:
        parser.read_string(text, source=str(source) if source else "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None
    for name in parser.sections():
        if name not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{name}]")
        unknown = set(parser[name]) - _KNOWN_KEYS[name]
        if unknown:
            raise ConfigError(f"[{name}] has unknown keys: {', '.join(sorted(unknown))}")

    cfg = RunConfig(source=source, raw={s: dict(parser[s]) for s in parser.sections()})
    base = source.parent if source else Path.cwd()

    if parser.has_section("model"):
        sec = parser["model"]
        name = _get(sec, "name", str, "brusselator")
        if name == "brusselator":
            cfg.model = {"name": name, "b": _get(sec, "b", float, required=True),
                         "c": _get(sec, "c", float, required=True)}
        elif name == "jacobian":
            cfg.model = {"name": name, **{k: _get(sec, k, float, required=True)
                                          for k in ("f_u", "f_v", "g_u", "g_v")}}
        else:
            raise ConfigError(f"[model] name = {name!r}: expected 'brusselator' or 'jacobian'")

    if parser.has_section("transport"):
        sec = parser["transport"]
        cfg.transport = {k: _get(sec, k, float, required=True)
                         for k in ("D_u", "D_v", "tau_u", "tau_v")}

    if parser.has_section("network"):
        sec = parser["network"]
        gen = _get(sec, "generator", str, required=True)
        net = NetworkSection(generator=gen, symmetrize=_get(sec, "symmetrize", _bool, False))
        if gen == "newman_watts":
            net.n = _get(sec, "n", _int, required=True)
            net.k = _get(sec, "k", _int, required=True)
            net.p = _get(sec, "p", float, required=True)
            net.seed = _get(sec, "seed", _int, required=True)
        elif gen == "edge_list":
            path = Path(_get(sec, "path", str, required=True))
            net.path = path if path.is_absolute() else base / path
            if not net.path.is_file():
                raise ConfigError(f"[network] path: file not found: {net.path}")
        else:
            raise ConfigError(f"[network] generator = {gen!r}: expected 'newman_watts' "
                              "or 'edge_list'")
        cfg.network = net

    if parser.has_section("scan"):
        sec = parser["scan"]
        kind = _get(sec, "kind", str, "lambda_plane")
        sc = ScanSection(kind=kind, preset=_get(sec, "preset", str),
                         resolution=_get(sec, "resolution", _resolution,
                                         (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)))
        if kind == "lambda_plane":
            sc.range1 = _get(sec, "re_range", _pair, DEFAULT_RE_RANGE)
            sc.range2 = _get(sec, "im_range", _pair, DEFAULT_IM_RANGE)
        elif kind == "parameter_plane":
            sc.axis1 = _get(sec, "axis1", str, required=True)
            sc.axis2 = _get(sec, "axis2", str, required=True)
            for ax in (sc.axis1, sc.axis2):
                if ax not in PARAMETER_AXES:
                    raise ConfigError(f"[scan] unknown axis {ax!r}; choose from "
                                      f"{', '.join(PARAMETER_AXES)}")
            sc.range1 = _get(sec, "axis1_range", _pair, required=True)
            sc.range2 = _get(sec, "axis2_range", _pair, required=True)
            sc.lambda_samples = _get(sec, "lambda_samples", _samples, required=True)
        else:
            raise ConfigError(f"[scan] kind = {kind!r}: expected 'lambda_plane' or "
                              "'parameter_plane'")
        if sc.preset is not None and sc.preset not in REGION_PRESETS:
            raise ConfigError(f"[scan] preset = {sc.preset!r}: choose from "
                              f"{', '.join(REGION_PRESETS)}")
        cfg.scan = sc

    if parser.has_section("sim"):
        sec = parser["sim"]
        cfg.sim = SimSection(
            dt=_get(sec, "dt", float),
            horizon=_get(sec, "horizon", float, 200.0),
            amplitude=_get(sec, "amplitude", float, 1e-6),
            seed=_get(sec, "seed", _int, 0),
            skip_fraction=_get(sec, "skip_fraction", float, 0.2),
            linear_ceiling=_get(sec, "linear_ceiling", _optional_float, 1e-2),
            samples=_get(sec, "samples", _int, 4000),
        )
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, source=path)


# ---------------------------------------------------------------- builders

def build_model(cfg: RunConfig) -> ReactionModel | JacobianEntries:
    cfg.require("model")
    m = cfg.model
    if m["name"] == "brusselator":
        return brusselator(BrusselatorParams(m["b"], m["c"]))
    return JacobianEntries(m["f_u"], m["f_v"], m["g_u"], m["g_v"])


def jacobian_of(model) -> JacobianEntries:
    return model if isinstance(model, JacobianEntries) else model.jacobian


def build_transport(cfg: RunConfig) -> TransportParams:
    cfg.require("transport")
    return TransportParams(**cfg.transport)


def build_network(cfg: RunConfig) -> DirectedNetwork:
    cfg.require("network")
    net = cfg.network
    if net.generator == "newman_watts":
        A = newman_watts_directed(net.n, net.k, net.p, net.seed)
    else:
        A = read_edge_list(net.path.read_text(encoding="utf-8"))
    network = DirectedNetwork(A)
    return network.symmetrized() if net.symmetrize else network


def apply_seed(cfg: RunConfig, seed: Optional[int]) -> None:
    if seed is None:
        return
    if cfg.network is not None and cfg.network.generator == "newman_watts":
        cfg.network.seed = seed
    if cfg.sim is not None:
        cfg.sim.seed = seed


# ---------------------------------------------------------------- report

@dataclass
class ReportRecord:
    modes: list
    stable: bool
    dominant_index: int
    homogeneous_index: int
    notes: list

    def to_record(self) -> dict:
        return {"stable": self.stable, "dominant_index": self.dominant_index,
                "homogeneous_index": self.homogeneous_index, "modes": self.modes,
                "notes": self.notes}

    def to_text(self) -> str:
        lines = [f"{'idx':>4} {'Re(Lambda)':>12} {'Im(Lambda)':>12} {'stable':>7} "
                 f"{'margin':>12} {'growth':>12}"]
        for m in self.modes:
            growth = "n/a" if m["growth_rate"] is None else f"{m['growth_rate']:.6g}"
            flag = " *" if m["index"] == self.dominant_index else ""
            lines.append(f"{m['index']:>4} {m['re']:>12.6g} {m['im']:>12.6g} "
                         f"{'yes' if m['stable'] else 'NO':>7} {m['margin']:>12.4e} "
                         f"{growth:>12}{flag}")
        dom = self.modes[self.dominant_index]
        lines.append("")
        lines.append(f"overall: {'STABLE' if self.stable else 'UNSTABLE'}")
        lines.append(f"dominant mode: index {dom['index']}, Lambda = "
                     f"{dom['re']:.6g}{dom['im']:+.6g}i, growth rate {dom['growth_rate']}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def build_report(j: JacobianEntries, t: TransportParams, eigenvalues) -> ReportRecord:
    verdict = network_verdict(j, t, eigenvalues)
    modes = []
    coeff_modes, closed_modes, sign_modes = [], 0, 0
    names: set[str] = set()
    for i, m in enumerate(verdict.modes):
        lam = m.eigenvalue
        modes.append({"index": i, "re": lam.real, "im": lam.imag, "stable": m.stable,
                      "margin": m.rh_margin, "growth_rate": m.growth_rate})
        diff = coefficient_discrepancies(j, t, lam)
        if diff:
            coeff_modes.append(i)
            names.update(diff)
        conds = proposition_conditions(m.quartic, t.epsilon, tau_u=t.tau_u, tau_v=t.tau_v,
                                       f_u=j.f_u, g_v=j.g_v, D_u=t.D_u, D_v=t.D_v,
                                       lambda_re=lam.real, lambda_im=lam.imag)
        cmp = compare_with_table(conds, build_table(m.quartic))
        closed_modes += cmp["verdict_mismatch"]
        sign_modes += bool(cmp["sign_mismatches"])
    notes = []
    if coeff_modes:
        notes.append(f"published coefficient formulas differ from the determinant expansion "
                     f"in {', '.join(sorted(names))} for {len(coeff_modes)} of {len(modes)} "
                     "modes; verdicts use the determinant expansion")
    if sign_modes or closed_modes:
        notes.append(f"closed-form stability conditions disagree with the table pivots in sign "
                     f"for {sign_modes} modes and in verdict for {closed_modes} modes; "
                     "verdicts use the table")
    return ReportRecord(modes=modes, stable=verdict.stable,
                        dominant_index=verdict.dominant_index,
                        homogeneous_index=verdict.homogeneous_index, notes=notes)


# ---------------------------------------------------------------- commands

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def spectrum_csv(eigenvalues) -> str:
    lines = ["index,re,im"]
    for i, lam in enumerate(eigenvalues):
        lines.append(f"{i},{float(lam.real)!r},{float(lam.imag)!r}")
    return "\n".join(lines) + "\n"


def cmd_spectrum(cfg: RunConfig, args) -> int:
    network = build_network(cfg)
    _emit(spectrum_csv(network.spectrum), args.out)
    return 0


def cmd_check(cfg: RunConfig, args) -> int:
    j = jacobian_of(build_model(cfg))
    t = build_transport(cfg)
    network = build_network(cfg)
    report = build_report(j, t, network.spectrum)
    sys.stdout.write(report.to_text())
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_record(), indent=2) + "\n",
                                  encoding="utf-8")
    return 0 if report.stable else 1


def _scan_inputs(cfg: RunConfig):
    sc = cfg.scan
    if sc.preset:
        p = REGION_PRESETS[sc.preset]
        j, t = preset(sc.preset)
        return BrusselatorParams(p["b"], p["c"]), j, t
    model = build_model(cfg)
    t = build_transport(cfg)
    if isinstance(model, JacobianEntries):
        return None, model, t
    return BrusselatorParams(**model.params), model.jacobian, t


def cmd_scan(cfg: RunConfig, args) -> int:
    cfg.require("scan")
    sc = cfg.scan
    params, j, t = _scan_inputs(cfg)
    network = build_network(cfg) if cfg.network is not None else None
    if sc.kind == "lambda_plane":
        region = scan_lambda_plane(j, t, sc.range1, sc.range2, sc.resolution,
                                   context={"preset": sc.preset} if sc.preset else None)
    else:
        samples = sc.lambda_samples
        if samples == "network":
            if network is None:
                raise ConfigError("[scan] lambda_samples = network needs a [network] section")
            samples = list(network.spectrum)
        if params is None and {"b", "c"} & {sc.axis1, sc.axis2}:
            raise ConfigError("[scan] axes 'b' and 'c' need [model] name = brusselator")
        model = params if params is not None else ReactionModel(
            f=None, g=None, equilibrium=(math.nan, math.nan), jacobian=j, name="jacobian")
        region = scan_parameter_plane(model, t, sc.axis1, sc.axis2, [sc.range1, sc.range2],
                                      sc.resolution, samples)
    _emit(region.to_csv(), args.out)
    if args.svg:
        if not args.out:
            raise ConfigError("--svg needs --out (the SVG is written next to the CSV)")
        points = list(network.spectrum) if (network is not None
                                            and sc.kind == "lambda_plane") else []
        Path(args.out).with_suffix(".svg").write_text(to_svg(region, points), encoding="utf-8")
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    cfg.require("sim")
    model = build_model(cfg)
    if isinstance(model, JacobianEntries):
        raise ConfigError("simulate needs full kinetics; [model] name = jacobian is linear only")
    t = build_transport(cfg)
    network = build_network(cfg)
    sim = cfg.sim
    L = network.laplacian
    heuristic = default_time_step(t, L)
    dt = heuristic if sim.dt is None else sim.dt
    warnings = []
    if dt > DT_WARN_FACTOR * heuristic:
        msg = (f"dt = {dt:g} exceeds the stability heuristic {heuristic:.3g} by "
               f"{dt / heuristic:.0f}x; results may be numerical artefacts")
        warnings.append(msg)
        print(f"warning: {msg}", file=sys.stderr)

    est = perturbation_experiment(model, t, L, amplitude=sim.amplitude, seed=sim.seed, dt=dt,
                                  horizon=sim.horizon, skip_fraction=sim.skip_fraction,
                                  linear_ceiling=sim.linear_ceiling, samples=sim.samples)
    linear = network_verdict(model.jacobian, t, network.spectrum)
    predicted = linear.excited_growth_rate()

    if est.blew_up:
        status = "blow-up"
    elif est.fit_points < 3 or not math.isfinite(est.residual):
        status = "fit-failed"
    elif est.saturated:
        status = "saturated"
    elif est.decayed_to_rounding:
        status = "decayed"
    else:
        status = "ok"
    record = est.to_record()
    record.update({
        "status": status,
        "dt": dt,
        "predicted_rate": predicted,
        "difference": (est.rate - predicted) if predicted is not None else None,
        "linear_stable": linear.stable,
        "warnings": warnings,
    })
    print(json.dumps(record, indent=2))

    if args.out:
        # replay the same perturbed run to record the trajectory
        traj = _trajectory_for(model, t, L, sim, dt)
        Path(args.out).write_text(traj.to_csv(), encoding="utf-8", newline="\n")
    if status == "blow-up":
        print("error: integration blew up; reduce dt", file=sys.stderr)
        return 2
    return 0 if est.stable else 1


def _trajectory_for(model: ReactionModel, t: TransportParams, L, sim: SimSection, dt: float):
    init = perturbed_state(model, L, sim.amplitude, sim.seed)
    steps = max(1, int(np.ceil(sim.horizon / dt)))
    every = max(1, steps // min(sim.samples, 400))
    return integrate(model, t, L, init, dt, steps, sample_every=every)


def cmd_roots(args) -> int:
    q = ComplexQuartic.from_coefficients([complex(a, b) for a, b in
                                          zip(args.coefficients[:4], args.coefficients[4:])])
    table = build_table(q)
    verdict = is_stable(q)
    print("pivots: " + " ".join(f"{name}={value:.10g}" for name, value in
                                zip(("a1_1", "a2_2", "a3_3", "a4_4"), table.pivots)))
    print(f"verdict: {'STABLE' if verdict.stable else 'UNSTABLE'} (margin {verdict.margin:.6g})")
    try:
        zs = roots(q)
    except RootFindingError as exc:
        print(f"roots: oracle did not converge ({exc})")
    else:
        for z in sorted(zs, key=lambda z: (-z.real, -z.imag)):
            print(f"root: {z.real:.12g} {z.imag:+.12g}i")
    return 0 if verdict.stable else 1


# ---------------------------------------------------------------- entry point

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI-style run configuration")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--seed", type=int, help="override every seed in the config")

    parser = argparse.ArgumentParser(
        prog="netstab",
        description="Linear stability of inertial reaction-diffusion dynamics on directed "
                    "networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="Laplacian eigenvalues as CSV (index,re,im)")
    sub.add_parser("check", parents=[common],
                   help="per-mode verdicts; exit 0 stable, 1 unstable, 2 error; --out writes JSON")
    scan = sub.add_parser(
        "scan", parents=[common],
        help="region map CSV",
        description="Region map CSV. Default lambda-plane ranges: Re in [-6, 0], Im in [-3, 3], "
                    f"resolution {DEFAULT_RESOLUTION}. Presets: {', '.join(REGION_PRESETS)}.")
    scan.add_argument("--svg", action="store_true",
                      help="also write a heatmap next to --out, with the spectrum overlaid")
    sub.add_parser("simulate", parents=[common],
                   help="perturbation experiment; JSON record on stdout, trajectory CSV to --out")
    roots_p = sub.add_parser("roots", help="RH pivots, verdict and roots of z^4 + sum (a_k + i b_k) "
                                           "z^(4-k)")
    roots_p.add_argument("coefficients", nargs=8, type=float, metavar="C",
                         help="a1 a2 a3 a4 b1 b2 b3 b4")
    return parser


COMMANDS = {"spectrum": cmd_spectrum, "check": cmd_check, "scan": cmd_scan,
            "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "roots":
            return cmd_roots(args)
        cfg = load_config(args.config)
        apply_seed(cfg, args.seed)
        return COMMANDS[args.command](cfg, args)
    except (ValueError, ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
