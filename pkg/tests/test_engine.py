import cmath
import math
import random
from fractions import Fraction

import pytest

from witten.deformation import BetaSpec, DeformedP, Handle, InvariantPoly
from witten.engine import (
    DivergenceError,
    PairingSpec,
    SpecError,
    Summation,
    conjugacy_fourier_term,
    default_mode,
    double_fourier_term,
    fusion_product_check,
    pairing_term,
    sum_pairing,
)
from witten.lie import build_root_system, dominant_weights_in_ball
from witten.numeric import csum
from witten.oracles import clausen_series, zeta_closed_forms
from witten.series import GeneratorTable, SuperSeries
from witten.volumes import char_value, make_marking, vol_conjugacy_class, vol_G, weyl_dim

A1 = build_root_system("A1")
A2 = build_root_system("A2")
SCALAR = GeneratorTable((), (), 0)


def plain(rs, genus, markings=(), table=SCALAR, **summation):
    return PairingSpec(rs, genus, list(markings), DeformedP(rs, []), BetaSpec(), table, Summation(**summation))


def scalar(series):
    return complex(series.constant_term)


# ------------------------------------------------------------------ terms


def test_a1_genus_two_term():
    spec = plain(A1, 2)
    v = float(vol_G(A1))
    for k in range(6):
        assert scalar(pairing_term(spec, (k,))) == pytest.approx(2 * v * v / (k + 1) ** 2, rel=1e-14)


def test_trivial_conjugacy_term_is_dimension():
    m = make_marking(A2, (0, 0))
    for lam in [(0, 0), (1, 0), (2, 1)]:
        t = conjugacy_fourier_term(A2, m, DeformedP(A2, []), lam, SCALAR)
        assert scalar(t) == pytest.approx(weyl_dim(A2, lam), rel=1e-14)


def test_conjugacy_term_at_zero_weight():
    m = make_marking(A2, (Fraction(1, 3), Fraction(1, 4)))
    t = conjugacy_fourier_term(A2, m, DeformedP(A2, []), (0, 0), SCALAR)
    expected = (2j * math.pi) ** m.half_dim * complex(vol_conjugacy_class(A2, m))
    assert scalar(t) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("u", [Fraction(1, 3), Fraction(1, 5)])
def test_conjugacy_term_composes_factors(u):
    m = make_marking(A1, (u,))
    for k in range(5):
        t = conjugacy_fourier_term(A1, m, DeformedP(A1, []), (k,), SCALAR)
        expected = (2j * math.pi) * complex(char_value(A1, (k,), m)).conjugate() * complex(vol_conjugacy_class(A1, m))
        assert scalar(t) == pytest.approx(expected, rel=1e-13, abs=1e-14)


def test_double_term_quadratic():
    for lam in [(0, 0), (1, 2)]:
        t = double_fourier_term(A2, DeformedP(A2, []), BetaSpec(), lam, SCALAR)
        expected = (2j * math.pi) ** 8 * float(vol_G(A2)) ** 2 / weyl_dim(A2, lam)
        assert scalar(t) == pytest.approx(expected, rel=1e-13)


def test_double_term_odd_pair_and_sigma():
    table = GeneratorTable(("s",), ("e1", "e2"), 2)
    p2 = InvariantPoly.casimir(A2)
    p3 = InvariantPoly.parse(A2, "power_sum(3)")
    beta = BetaSpec([("s", p3)], [Handle([("e1", p2)], [("e2", p3)])])
    lam = (1, 2)
    t = double_fourier_term(A2, DeformedP(A2, []), beta, lam, table)
    base = (2j * math.pi) ** 8 * float(vol_G(A2)) ** 2 / weyl_dim(A2, lam)
    point = (Fraction(2), Fraction(3))
    # gradient of the Casimir is the point itself, so grad p2 . grad p3 = d/dt p3(point + t point) = 3 p3(point)
    pair = 3 * float(p3(point))
    assert complex(t.coefficient("e1*e2")) == pytest.approx(-pair / (2j * math.pi) * base, rel=1e-13)
    assert complex(t.coefficient("s")) == pytest.approx(float(p3(point)) * base, rel=1e-13)
    with pytest.raises(SpecError):
        double_fourier_term(A2, DeformedP(A2, []), BetaSpec([], [Handle(), Handle()]), lam, table)


def test_scale_covariance():
    s = 2
    for rs_label in ("A1", "A2"):
        base = build_root_system(rs_label)
        scaled = build_root_system(rs_label, scale=Fraction(9, 4))
        ratios = [scalar(pairing_term(plain(scaled, s), lam)) / scalar(pairing_term(plain(base, s), lam)) for lam in [(0,) * base.rank, (1,) * base.rank, (3,) + (0,) * (base.rank - 1)]]
        assert max(abs(r - ratios[0]) for r in ratios) < 1e-12 * abs(ratios[0])
        assert ratios[0] == pytest.approx((9 / 4) ** (base.dim * (s - 1)), rel=1e-12)


def test_decay_bound():
    m = make_marking(A2, (Fraction(1, 3), Fraction(1, 4)))
    spec = plain(A2, 2, [m])
    c = abs(scalar(pairing_term(spec, (0, 0))))
    for lam in [(5, 7), (11, 2), (20, 20)]:
        assert abs(scalar(pairing_term(spec, lam))) <= c * weyl_dim(A2, lam) ** -2 * 1.0000001 * 1e6


# --------------------------------------------------------------- summation


def test_a1_volumes_match_zeta():
    for s in (2, 3):
        res = sum_pairing(plain(A1, s, mode="truncate"))
        exact = complex(2 * vol_G(A1) ** (2 * s - 2) * zeta_closed_forms(2 * s - 2))
        assert res.status == "ok"
        assert abs(res.coefficients["1"] - exact) <= res.tail_bound
    assert sum_pairing(plain(A1, 2, mode="truncate")).coefficients["1"] == pytest.approx(1 / 6, rel=1e-10)
    assert sum_pairing(plain(A1, 3, mode="truncate")).coefficients["1"] == pytest.approx(1 / 180, rel=1e-9)


def test_empty_radius():
    res = sum_pairing(plain(A2, 2, mode="truncate", radius=0.5))
    assert res.terms_summed == 0 and res.coefficients == {} and res.tail_bound == math.inf


def test_tail_bound_dominates_remainder():
    for rs, s in ((A1, 2), (A2, 2), (build_root_system("B2"), 2)):
        small = sum_pairing(plain(rs, s, mode="truncate", radius=20, accelerate=False))
        big = sum_pairing(plain(rs, s, mode="truncate", radius=40, accelerate=False))
        huge = sum_pairing(plain(rs, s, mode="truncate", radius=90, accelerate=False))
        assert abs(small.coefficients["1"] - big.coefficients["1"]) <= small.tail_bound
        assert abs(small.coefficients["1"] - huge.coefficients["1"]) <= small.tail_bound


def test_partial_sums_are_cauchy():
    spec = plain(A2, 2)
    weights = dominant_weights_in_ball(A2, 40)
    terms = [scalar(pairing_term(spec, w.coords)) for w in weights]
    partial = [abs(csum(terms[:n])) for n in range(1, len(terms), 25)]
    diffs = [abs(b - a) for a, b in zip(partial, partial[1:])]
    assert diffs[-1] < diffs[0]
    # the dimension majorant bounds every tail
    dims = [weyl_dim(A2, w.coords) ** -2.0 for w in weights]
    k = abs(terms[0])
    assert all(abs(t) <= k * d * (1 + 1e-12) for t, d in zip(terms, dims))


def test_divergence_reported():
    # genus 1 with a trivial marking: terms are constant in lambda
    spec = PairingSpec(A1, 1, [make_marking(A1, (0,))], DeformedP(A1, []), BetaSpec(), SCALAR, Summation(mode="truncate", radius=30), check_regime=False)
    res = sum_pairing(spec)
    assert res.status == "diverged"
    with pytest.raises(DivergenceError):
        sum_pairing(spec, raise_on_divergence=True)


def test_budget_exhaustion():
    res = sum_pairing(plain(A2, 2, mode="truncate", radius=60, max_terms=50))
    assert res.status == "budget_exhausted" and res.terms_summed == 50


def test_regime_and_table_validation():
    with pytest.raises(SpecError):
        plain(A1, 1)
    with pytest.raises(SpecError):
        plain(A1, 0, [make_marking(A1, (Fraction(1, 3),))] * 2)
    plain(A1, 0, [make_marking(A1, (Fraction(1, 3),))] * 3)
    with pytest.raises(SpecError):
        PairingSpec(A1, 2, [], DeformedP(A1, [("d", InvariantPoly.parse(A1, "power_sum(4)"))]), BetaSpec(), SCALAR)
    with pytest.raises(SpecError):
        PairingSpec(A1, 2, [], DeformedP(A1, []), BetaSpec(handles=[Handle([("e", InvariantPoly.casimir(A1))])]), SCALAR)
    with pytest.raises(SpecError):
        PairingSpec(A1, 2, [], DeformedP(A1, []), BetaSpec(handles=[Handle()] * 3), SCALAR)
    with pytest.raises(SpecError):
        sum_pairing(plain(A1, 2, mode="sideways"))


def test_default_mode():
    assert default_mode(plain(A1, 2)) == "truncate"
    m = make_marking(A1, (Fraction(1, 3),))
    assert default_mode(plain(A1, 0, [m] * 3)) == "convergence_factor"
    q = make_marking(A1, (Fraction(1, 3),), InvariantPoly.casimir(A1))
    assert default_mode(plain(A1, 3, [q])) == "convergence_factor"


@pytest.mark.parametrize("u", [Fraction(1, 3), Fraction(1, 4)])
def test_marked_series_closed_form(u):
    m = make_marking(A1, (u,))
    exact = complex(clausen_series(u / 2, 2)) / math.pi**3
    for mode in ("truncate", "convergence_factor"):
        res = sum_pairing(plain(A1, 2, [m], mode=mode))
        assert res.status == "ok"
        assert abs(res.coefficients["1"] - exact) < 1e-8


def test_convergence_factor_trace():
    res = sum_pairing(plain(A1, 2, mode="convergence_factor", epsilons=(0.1, 0.05, 0.025, 0.0125)))
    assert [e for e, _ in res.regulator_trace] == [0.1, 0.05, 0.025, 0.0125]
    assert res.extrapolation_residual is not None
    assert abs(res.coefficients["1"] - 1 / 6) < 1e-4
    with pytest.raises(SpecError):
        sum_pairing(plain(A1, 2, mode="convergence_factor", epsilons=(0.1,)))


def test_thread_count_does_not_change_result():
    table = GeneratorTable(("d", "s"), (), 2)
    p4 = InvariantPoly.parse(A2, "power_sum(4)")
    spec = PairingSpec(A2, 2, [], DeformedP(A2, [("d", p4)]), BetaSpec([("s", InvariantPoly.casimir(A2))]), table, Summation(mode="truncate", radius=15))
    a = sum_pairing(spec, threads=1)
    b = sum_pairing(spec, threads=4)
    assert a.coefficients == b.coefficients


# ---------------------------------------------------------------- invariants


def random_spec(rng):
    rs = rng.choice([A1, A2, build_root_system("B2")])
    polys = {"A": ["power_sum(3)", "power_sum(4)"], "B": ["casimir^2"]}[rs.type_label]
    if rs.type_label == "A" and rs.rank == 1:
        polys = ["power_sum(4)", "casimir^2"]
    p = InvariantPoly.parse(rs, rng.choice(polys))
    table = GeneratorTable(("d", "s"), ("a1", "a2", "b1", "b2"), 3)
    genus = rng.choice([1, 2])
    handles = [Handle([("a1", p)], [("a2", InvariantPoly.casimir(rs))])]
    if genus == 2:
        handles.append(Handle([("b1", InvariantPoly.casimir(rs))], [("b2", p)]))
    mus = [tuple(Fraction(rng.randint(1, 5), 24) for _ in range(rs.rank)) for _ in range(rng.randint(1, 2))]
    markings = [make_marking(rs, mu, p if i == 0 else None) for i, mu in enumerate(mus)]
    spec = PairingSpec(rs, genus, markings, DeformedP(rs, [("d", p)]), BetaSpec([("s", p)], handles), table, Summation(mode="truncate", radius=6), check_regime=False)
    return rs, spec


def test_trivial_marking_invariance():
    rng = random.Random(3)
    for _ in range(10):
        rs, spec = random_spec(rng)
        trivial = spec.with_marking(make_marking(rs, (0,) * rs.rank))
        for w in dominant_weights_in_ball(rs, 6)[:8]:
            a, b = pairing_term(spec, w.coords), pairing_term(trivial, w.coords)
            scale = max(1.0, max((abs(complex(c)) for c in a.terms.values()), default=0))
            assert a.max_abs_diff(b) <= 1e-12 * scale


@pytest.mark.parametrize("genus,n_markings", [(0, 1), (1, 0), (1, 1), (2, 1)])
def test_fusion_factorization(genus, n_markings):
    rng = random.Random(genus * 10 + n_markings)
    for rs in (A1, A2):
        table = GeneratorTable(("d", "s"), ("e1", "e2"), 3)
        p = InvariantPoly.parse(rs, "power_sum(4)")
        handles = [Handle([("e1", p)], [("e2", InvariantPoly.casimir(rs))])] if genus else []
        markings = [make_marking(rs, (Fraction(1, 5),) * rs.rank, InvariantPoly.casimir(rs)) for _ in range(n_markings)]
        spec = PairingSpec(rs, genus, markings, DeformedP(rs, [("d", p)]), BetaSpec([("s", p)], handles), table, check_regime=False)
        lams = [tuple(rng.randint(0, 6) for _ in range(rs.rank)) for _ in range(20)]
        report = fusion_product_check(spec, lams)
        assert report["passed"], report["max_rel_diff"]


def test_single_factor_compositions():
    m = make_marking(A2, (Fraction(1, 3), Fraction(1, 6)))
    P = DeformedP(A2, [])
    spec = PairingSpec(A2, 0, [m], P, BetaSpec(), SCALAR, check_regime=False)
    lam = (2, 1)
    dim = weyl_dim(A2, lam)
    # r = 1, s = 0: the term is the conjugacy coefficient times the global normalization
    norm = 3 * (2j * math.pi) ** (-m.half_dim) * dim**2 / float(vol_G(A2)) ** 2 / dim
    assert scalar(pairing_term(spec, lam)) == pytest.approx(norm * scalar(conjugacy_fourier_term(A2, m, P, lam, SCALAR)), rel=1e-12)
    spec1 = PairingSpec(A2, 1, [], P, BetaSpec(), SCALAR, check_regime=False)
    norm1 = 3 * (2j * math.pi) ** (-8) * dim**2 / float(vol_G(A2)) ** 2 / dim
    assert scalar(pairing_term(spec1, lam)) == pytest.approx(norm1 * scalar(double_fourier_term(A2, P, BetaSpec(), lam, SCALAR)), rel=1e-12)


def test_sigma_coefficient_matches_insertion():
    table = GeneratorTable(("s",), (), 1)
    p3 = InvariantPoly.parse(A2, "power_sum(3)")
    m = make_marking(A2, (Fraction(1, 4), Fraction(1, 4)))
    with_sigma = PairingSpec(A2, 2, [m], DeformedP(A2, []), BetaSpec([("s", p3)]), table, Summation(mode="truncate", radius=25, accelerate=False))
    res = sum_pairing(with_sigma)
    inserted = PairingSpec(A2, 2, [make_marking(A2, m.mu, p3)], DeformedP(A2, []), BetaSpec(), table, Summation(mode="truncate", radius=25, accelerate=False))
    ref = sum_pairing(inserted)
    assert abs(res.coefficients["s"] - ref.coefficients["1"]) <= 1e-12 * max(1, abs(ref.coefficients["1"]))


def test_order_independence():
    spec = plain(A2, 2, [make_marking(A2, (Fraction(1, 3), Fraction(1, 4)))])
    weights = dominant_weights_in_ball(A2, 30)
    terms = [scalar(pairing_term(spec, w.coords)) for w in weights]
    forward = csum(terms)
    shuffled = list(terms)
    random.Random(1).shuffle(shuffled)
    assert abs(csum(shuffled) - forward) <= 1e-12 * abs(forward)
    assert abs(csum(list(reversed(terms))) - forward) <= 1e-12 * abs(forward)


def test_divergence_in_a_subdominant_coefficient():
    # sigma^2 p3(xi)^2 stops decaying along the alcove walls while the
    # constant coefficient converges fast; the shell test runs per monomial.
    table = GeneratorTable(("s",), (), 2)
    p3 = InvariantPoly.parse(A2, "power_sum(3)")
    m = make_marking(A2, (Fraction(1, 3), Fraction(1, 6)))
    spec = PairingSpec(A2, 2, [m], DeformedP(A2, []), BetaSpec([("s", p3)]), table, Summation(mode="truncate", radius=30))
    assert sum_pairing(spec).status == "diverged"
    plain_spec = PairingSpec(A2, 2, [m], DeformedP(A2, []), BetaSpec(), table, Summation(mode="truncate", radius=30))
    assert sum_pairing(plain_spec).status == "ok"
