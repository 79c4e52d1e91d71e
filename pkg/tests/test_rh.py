import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netstab.dispersion import TransportParams, build_quartic
from netstab.models import BrusselatorParams, brusselator
from netstab.polynomial import ComplexPolynomial, ComplexQuartic
from netstab.rh import (build_table, compare_with_table, is_stable, proposition_conditions,
                        verdict_from_table)
from oracles import classical_hurwitz, root_abscissa

coefficient = st.floats(-5, 5, allow_nan=False)


def quartic_from_roots(rs) -> ComplexQuartic:
    c = ComplexPolynomial.from_roots(rs).coefficients
    return ComplexQuartic.from_coefficients(c[1:])


def test_binomial_quartic_pivots_by_hand():
    table = build_table(ComplexQuartic(4, 6, 4, 1))
    # hand evaluation of the recurrences
    assert table.a2_1 == 20 and table.b1_1 == 0
    assert table.a4_1 == 4 and table.a4_2 == 16 and table.a3_2 == 256
    assert table.pivots == (4, 80, 20480, 20480 * 327680)
    assert table.a4_3 == 20480 * 16
    assert is_stable(ComplexQuartic(4, 6, 4, 1)).stable


def test_zero_first_coefficient_is_not_stable():
    v = is_stable(ComplexQuartic(0, 1, 2, 3))
    assert v.pivots[0] == 0 and not v.stable and v.failing_index == 0


def test_shifted_binomial_all_pivots_positive():
    q = quartic_from_roots([-1 - 1j] * 4)
    assert root_abscissa(q.coefficients()) < 0
    assert all(p > 0 for p in build_table(q).pivots)


def test_one_unstable_root_detected():
    q = quartic_from_roots([1, -2, -2, -2])
    assert root_abscissa(q.coefficients()) == pytest.approx(1.0, abs=1e-6)
    assert not is_stable(q).stable


def test_slow_root_is_stable_with_small_margin():
    q = quartic_from_roots([-1 + 1j, -1 - 1j, -0.01, -3])
    assert root_abscissa(q.coefficients()) == pytest.approx(-0.01, abs=1e-9)
    v = is_stable(q)
    assert v.stable and v.margin > 0
    # the last pivot carries a4 = product of roots, so it shrinks with the slow root
    last = [is_stable(quartic_from_roots([-1 + 1j, -1 - 1j, -s, -3])).pivots[3]
            for s in (1.0, 0.1, 0.01, 0.001)]
    assert all(x > y > 0 for x, y in zip(last, last[1:]))
    assert last[-1] < 1e-2 * last[0]


def test_margin_is_smallest_pivot():
    v = is_stable(ComplexQuartic(1, -2, 0.5, 3, 0.3, 0, -1, 2))
    assert v.margin == min(v.pivots)
    assert verdict_from_table(build_table(ComplexQuartic(1, -2, 0.5, 3, 0.3, 0, -1, 2))) == v


def test_table_is_deterministic():
    q = ComplexQuartic(1.1, 2.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8)
    assert build_table(q) == build_table(q)


def test_overflow_is_reported():
    with pytest.raises(OverflowError):
        build_table(ComplexQuartic(1e80, 1e80, 1e80, 1e80, 0, 1e80, 1e80, 1e80))


@settings(max_examples=400, deadline=None)
@given(st.lists(coefficient, min_size=8, max_size=8))
def test_agrees_with_root_oracle(c):
    q = ComplexQuartic(*c)
    abscissa = root_abscissa(q.coefficients())
    if abs(abscissa) <= 1e-6:
        return
    assert is_stable(q).stable == (abscissa < 0)


@settings(max_examples=400, deadline=None)
@given(st.lists(coefficient, min_size=4, max_size=4))
def test_real_quartics_reduce_to_classical_conditions(a):
    q = ComplexQuartic(*a)
    if abs(root_abscissa(q.coefficients())) <= 1e-6:
        return
    assert is_stable(q).stable == classical_hurwitz(*a)


@settings(max_examples=100, deadline=None)
@given(st.lists(coefficient, min_size=8, max_size=8))
def test_conjugate_quartic_has_same_verdict(c):
    q = ComplexQuartic(*c)
    if abs(root_abscissa(q.coefficients())) <= 1e-6:
        return
    assert is_stable(q).stable == is_stable(q.conjugate()).stable


class TestClosedFormConditions:
    def setup_method(self):
        self.j = brusselator(BrusselatorParams(1.3, 14)).jacobian
        self.t = TransportParams(0.5, 0.5, 2.0, 1.0)

    def conditions(self, lam):
        q = build_quartic(self.j, self.t, lam)
        return q, proposition_conditions(q, self.t.epsilon, tau_u=2.0, tau_v=1.0,
                                         f_u=self.j.f_u, g_v=self.j.g_v, D_u=0.5, D_v=0.5,
                                         lambda_re=complex(lam).real,
                                         lambda_im=complex(lam).imag)

    def test_upsilon_on_real_axis(self):
        _, conds = self.conditions(-2.0)
        eps, tu, tv = 0.5, 2.0, 1.0
        expected = eps * (tu + tv) * (tu + tv - self.j.g_v * tu**2 - self.j.f_u * tv**2
                                      - (tu**2 * 0.5 + tv**2 * 0.5) * -2.0)
        assert conds.upsilon == pytest.approx(expected, rel=1e-14)

    def test_gamma_sign_compared_at_zero_eigenvalue(self):
        q, conds = self.conditions(0.0)
        report = compare_with_table(conds, build_table(q))
        table_sign = build_table(q).a3_3 > 0
        assert table_sign   # the reference kinetics are stable at Lambda = 0
        assert ("gamma_vs_a3_3" in report["sign_mismatches"]) == ((conds.gamma > 0) != table_sign)

    def test_disagreement_is_recorded(self):
        rng = np.random.default_rng(2)
        mismatches = 0
        for _ in range(200):
            lam = complex(rng.uniform(-6, 0), rng.uniform(-4, 4))
            q, conds = self.conditions(lam)
            report = compare_with_table(conds, build_table(q))
            assert set(report["values"]) == {"upsilon_vs_a2_2", "gamma_vs_a3_3", "cond3_vs_a4_4"}
            if report["verdict_mismatch"] or report["sign_mismatches"]:
                mismatches += 1
                assert report["sign_mismatches"]
        assert mismatches > 0

    def test_rejects_nonpositive_epsilon(self):
        q = ComplexQuartic(4, 6, 4, 1)
        with pytest.raises(ValueError):
            proposition_conditions(q, 0.0, tau_u=1, tau_v=1, f_u=0, g_v=0, D_u=0, D_v=0,
                                   lambda_re=0, lambda_im=0)
