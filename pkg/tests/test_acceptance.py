"""Acceptance criteria, one test each, at the stated sample sizes and tolerances.

Each test records a one-line PASS/FAIL summary; the lines are printed together
at the end of the pytest run.
"""
import json
import math
from functools import lru_cache

import numpy as np

from conftest import ACCEPTANCE_LINES
from netstab.dispersion import (AssemblyError, TransportParams, build_quartic,
                                coefficient_discrepancies, mode_verdict, network_verdict)
from netstab.models import BrusselatorParams, JacobianEntries, brusselator, isolated_stability
from netstab.network import DirectedNetwork, newman_watts_directed
from netstab.polynomial import ComplexQuartic, roots
from netstab.rh import build_table, compare_with_table, is_stable, proposition_conditions
from netstab.sim import SimState, integrate, perturbation_experiment
from oracles import (classical_hurwitz, damped_oscillator, mode_determinant, root_abscissa,
                     simulation_family)

from test_sim import LINEAR, UNIT

# (k, p) pairs tried in order for the 50-node directed network, seed 1
NETWORK_GRID = [(2, 0.1), (3, 0.05), (3, 0.02), (4, 0.02), (4, 0.05), (5, 0.02)]
NETWORK_SEED = 1


def record(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@lru_cache(maxsize=None)
def complex_quartic_agreement(samples: int = 10_000, seed: int = 1):
    rng = np.random.default_rng(seed)
    kept = agree = 0
    for c in rng.uniform(-5, 5, size=(samples, 8)):
        q = ComplexQuartic(*c)
        abscissa = root_abscissa(q.coefficients())
        if abs(abscissa) <= 1e-6:
            continue
        kept += 1
        agree += is_stable(q).stable == (abscissa < 0)
    return kept, agree


def test_criterion_1_oracle_equivalence():
    kept, agree = complex_quartic_agreement()
    ok = kept >= 9_900 and agree == kept
    record(1, ok, f"table verdict matches root signs on {agree}/{kept} complex quartics")
    assert ok


def test_criterion_2_classical_reduction():
    rng = np.random.default_rng(2)
    kept = agree = 0
    for a in rng.uniform(-5, 5, size=(10_000, 4)):
        if abs(root_abscissa([1, *a])) <= 1e-6:
            continue
        kept += 1
        agree += is_stable(ComplexQuartic(*a)).stable == classical_hurwitz(*a)
    ok = kept >= 9_900 and agree == kept
    record(2, ok, f"generalized verdict matches classical conditions on {agree}/{kept} real quartics")
    assert ok


def test_criterion_3_assembly_identity():
    rng = np.random.default_rng(3)
    worst = 0.0
    fired = 0
    for _ in range(200):
        jac = tuple(rng.uniform(-3, 3, 4))
        t = TransportParams(rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0.1, 3),
                            rng.uniform(0.1, 3))
        lam = complex(rng.uniform(-8, 0), rng.uniform(-5, 5))
        try:
            q = build_quartic(JacobianEntries(*jac), t, lam)
        except AssemblyError:
            fired += 1
            continue
        for z in roots(q):
            res = abs(mode_determinant(jac, t.tau_u, t.tau_v, t.D_u, t.D_v, lam, z))
            worst = max(worst, res / (t.tau_u * t.tau_v))
    ok = worst <= 1e-7 and fired == 0
    record(3, ok, f"max determinant residual {worst:.2e} (<= 1e-7), assembly check fired {fired} times")
    assert ok


def test_criterion_4_directed_vs_symmetrized():
    j = brusselator(BrusselatorParams(1.3, 14)).jacobian
    t = TransportParams(0.5, 0.5, 2.0, 1.0)
    outcome = None
    tried = []
    for k, p in NETWORK_GRID:
        net = DirectedNetwork(newman_watts_directed(50, k, p, NETWORK_SEED))
        sym_stable = network_verdict(j, t, net.symmetrized().spectrum).stable
        directed = network_verdict(j, t, net.spectrum)
        complex_unstable = [m for m in directed.unstable_modes if abs(m.eigenvalue.imag) > 0]
        tried.append((k, p))
        if sym_stable and complex_unstable:
            outcome = (k, p, len(complex_unstable))
            break
    ok = outcome is not None
    detail = (f"n=50 seed={NETWORK_SEED} k={outcome[0]} p={outcome[1]}: symmetrized stable, "
              f"{outcome[2]} unstable directed modes with Im != 0" if ok
              else f"no preset of {tried} reproduced the split")
    record(4, ok, detail)
    assert ok


def test_criterion_5_zero_eigenvalue():
    rng = np.random.default_rng(5)
    real_ok = classical_ok = 0
    total = 0
    while total < 1000:
        j = JacobianEntries(*rng.uniform(-3, 3, 4))
        t = TransportParams(rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0.1, 3),
                            rng.uniform(0.1, 3))
        q = build_quartic(j, t, 0)
        if abs(root_abscissa(q.coefficients())) <= 1e-6:
            continue
        total += 1
        real_ok += q.b == (0, 0, 0, 0)
        classical_ok += is_stable(q).stable == classical_hurwitz(*q.a)
    small = TransportParams(rng.uniform(0, 2), rng.uniform(0, 2), 1e-3, 1e-3)
    stable_hits = checked = 0
    while checked < 100:
        j = JacobianEntries(*rng.uniform(-3, 3, 4))
        if not isolated_stability(j):
            continue
        checked += 1
        stable_hits += mode_verdict(j, small, 0).stable == isolated_stability(j)
    ok = real_ok == total and classical_ok == total and stable_hits == checked
    record(5, ok, f"real coefficients {real_ok}/{total}, classical agreement {classical_ok}/{total}, "
                  f"tau=1e-3 matches isolated stability {stable_hits}/{checked}")
    assert ok


def test_criterion_6_simulation_agreement():
    sign_ok = rate_ok = 0
    worst = ""
    cases = 24
    for seed in range(cases):
        model, t, L, lead = simulation_family(seed)
        est = perturbation_experiment(model, t, L, amplitude=1e-6, seed=seed, horizon=400,
                                      skip_fraction=0.5)
        tol = max(0.02 * abs(lead), 1e-3)
        sign_ok += est.stable == (lead < 0)
        if abs(est.rate - lead) <= tol:
            rate_ok += 1
        else:
            worst = f"; seed {seed} fitted {est.rate:+.4f} vs {lead:+.4f}"
    ok = sign_ok == cases and rate_ok == cases
    record(6, ok, f"{cases} configurations: sign agreement {sign_ok}/{cases}, "
                  f"rate within max(2%, 1e-3) {rate_ok}/{cases}{worst}")
    assert ok


def test_criterion_7_discrepancy_report(tmp_path):
    rng = np.random.default_rng(7)
    entries = []
    for _ in range(200):
        b, c = rng.uniform(0.5, 3), rng.uniform(1, 15)
        j = brusselator(BrusselatorParams(b, c)).jacobian
        t = TransportParams(rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.2, 3),
                            rng.uniform(0.2, 3))
        lam = complex(rng.uniform(-6, 0), rng.uniform(-4, 4))
        q = build_quartic(j, t, lam)
        conds = proposition_conditions(q, t.epsilon, tau_u=t.tau_u, tau_v=t.tau_v, f_u=j.f_u,
                                       g_v=j.g_v, D_u=t.D_u, D_v=t.D_v,
                                       lambda_re=lam.real, lambda_im=lam.imag)
        cmp = compare_with_table(conds, build_table(q))
        coeffs = coefficient_discrepancies(j, t, lam)
        entries.append({"b": b, "c": c, "D_u": t.D_u, "D_v": t.D_v, "tau_u": t.tau_u,
                        "tau_v": t.tau_v, "lambda": [lam.real, lam.imag],
                        "closed_form": cmp,
                        "coefficients": {k: list(v) for k, v in coeffs.items()}})
    summary = {
        "samples": len(entries),
        "verdict_mismatches": sum(e["closed_form"]["verdict_mismatch"] for e in entries),
        "sign_mismatches": sum(bool(e["closed_form"]["sign_mismatches"]) for e in entries),
        "coefficient_mismatches": sum(bool(e["coefficients"]) for e in entries),
    }
    path = tmp_path / "discrepancy_report.json"
    path.write_text(json.dumps({"summary": summary, "entries": entries}, indent=1))
    reloaded = json.loads(path.read_text())
    kept, agree = complex_quartic_agreement()
    ok = path.exists() and reloaded["summary"]["samples"] == 200 and agree == kept
    record(7, ok, f"report written ({summary['verdict_mismatches']} verdict and "
                  f"{summary['sign_mismatches']} sign mismatches of closed forms in 200 samples); "
                  f"table verdict agreement {agree}/{kept}")
    assert ok


def test_criterion_8_rk4_order():
    def error(dt):
        steps = int(round(10 / dt))
        traj = integrate(LINEAR, UNIT, np.zeros((1, 1)), SimState([1.0], [1.0], [0.0], [0.0]),
                         dt, steps, sample_every=steps)
        return abs(traj.u[-1, 0] - damped_oscillator(10.0, 1.0, 1.0, 0.0))

    errs = [error(h) for h in (0.2, 0.1, 0.05)]
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    ok = min(orders) >= 3.8
    record(8, ok, f"observed orders {', '.join(f'{o:.3f}' for o in orders)} (>= 3.8)")
    assert ok
