"""Oracle suites behind ``witten verify``; each yields (label, error, tolerance)."""
from __future__ import annotations

import math
import random
from fractions import Fraction

from .deformation import BetaSpec, DeformedP, Handle, InvariantPoly, det_half_pp, grad, solve_xi
from .engine import PairingSpec, Summation, pairing_term, sum_pairing
from .lie import build_root_system
from .oracles import (
    ClassFunction,
    freudenthal_character,
    root_product_ratio,
    sun_eigenvalue_hessian,
    torus_quadrature_pairing,
    zeta_closed_forms,
)
from .series import GeneratorTable
from .volumes import char_value, make_marking, vol_G


def _small_weights(rs, bound):
    from .lie import dominant_weights_in_ball

    return [w.coords for w in dominant_weights_in_ball(rs, bound)]


def orthonormality():
    for label in ("A1", "A2", "G2"):
        rs = build_root_system(label)
        lams = _small_weights(rs, 5)
        chars = {lam: ClassFunction.character(rs, lam) for lam in lams}
        err = max(
            abs(torus_quadrature_pairing(rs, chars[a], chars[b]) - (a == b)) for a in lams for b in lams
        )
        yield f"{label} characters with |lambda+rho| <= 5", err, 1e-8


def freudenthal():
    rng = random.Random(7)
    for label in ("A1", "A2", "B2", "G2"):
        rs = build_root_system(label)
        err = 0.0
        for _ in range(25):
            lam = tuple(rng.randint(0, 3) for _ in range(rs.rank))
            mu = _random_alcove_point(rs, rng)
            m = make_marking(rs, mu)
            err = max(err, abs(complex(char_value(rs, lam, m)) - complex(freudenthal_character(rs, lam, mu))))
        yield f"{label} char_value vs Freudenthal", err, 1e-10


def _random_alcove_point(rs, rng, denominator=24):
    from .lie import in_closed_alcove

    while True:
        mu = tuple(Fraction(rng.randint(0, denominator), denominator) for _ in range(rs.rank))
        if in_closed_alcove(rs, mu):
            return mu


def hessian_root_product():
    for n, poly in ((2, "power_sum(4)"), (3, "power_sum(3)")):
        rs = build_root_system("A", n - 1)
        P = DeformedP(rs, [("d", InvariantPoly.parse(rs, poly))])
        xi = [Fraction(c) + 1 for c in (1,) + (0,) * (rs.rank - 1)]
        amb = [float(x) for x in rs.to_ambient(xi)]
        for delta in (1e-2, 5e-3):
            fd, _ = sun_eigenvalue_hessian(n, P, amb, deltas={"d": delta})
            lp = root_product_ratio(P, [float(x) for x in xi], {"d": delta}) ** 2
            yield f"su({n}) {poly} at delta={delta}", abs(fd - lp) / abs(lp), 1e-6


def inversion_residuals():
    rng = random.Random(11)
    polys = {"A1": ["power_sum(4)", "casimir^2"], "A2": ["power_sum(3)", "power_sum(4)"], "B2": ["casimir^2"], "G2": ["casimir^3"]}
    err = 0.0
    for _ in range(20):
        label = rng.choice(sorted(polys))
        rs = build_root_system(label)
        chosen = rng.sample(polys[label], k=1 + rng.randrange(len(polys[label])))
        names = tuple(f"d{i}" for i in range(len(chosen)))
        table = GeneratorTable(names, (), 4)
        P = DeformedP(rs, [(nm, InvariantPoly.parse(rs, p)) for nm, p in zip(names, chosen)])
        target = tuple(Fraction(rng.randint(1, 4)) for _ in range(rs.rank))
        xi = solve_xi(P, target, table)
        g = grad(P, xi)
        for gi, t in zip(g, target):
            err = max(err, max((abs(complex(c)) for c in (gi - float(t)).terms.values()), default=0.0))
    yield "substitute-back residual at truncation 4", err, 1e-12


def trivial_marking():
    rs = build_root_system("A1")
    table = GeneratorTable(("d",), ("e1", "e2"), 3)
    p4 = InvariantPoly.parse(rs, "power_sum(4)")
    P = DeformedP(rs, [("d", p4)])
    beta = BetaSpec([], [Handle([("e1", p4)], [("e2", InvariantPoly.casimir(rs))])])
    base = PairingSpec(rs, 2, [], P, beta, table)
    trivial = base.with_marking(make_marking(rs, (0,)))
    err = max(pairing_term(base, (k,)).max_abs_diff(pairing_term(trivial, (k,))) for k in range(12))
    yield "A1 terms with and without a trivial marking", err, 1e-12


def zeta_volumes():
    rs = build_root_system("A1")
    for s in (2, 3):
        spec = PairingSpec(rs, s, [], DeformedP(rs, []), BetaSpec(), GeneratorTable((), (), 0), Summation(mode="truncate", tolerance=1e-10))
        res = sum_pairing(spec)
        exact = rs.center_order * vol_G(rs) ** (2 * s - 2) * zeta_closed_forms(2 * s - 2)
        yield f"A1 genus {s} volume vs zeta closed form", abs(res.coefficients["1"] - exact), max(res.tail_bound, 1e-15)


SUITES = {
    "orthonormality": orthonormality,
    "freudenthal": freudenthal,
    "hessian-lemma": hessian_root_product,
    "inversion-residuals": inversion_residuals,
    "trivial-marking": trivial_marking,
    "zeta-volumes": zeta_volumes,
}
