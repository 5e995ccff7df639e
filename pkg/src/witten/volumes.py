"""Weyl dimension and character formulas, and the volumes that enter the
fixed point formulas for conjugacy classes, doubles and moduli spaces."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Any, Sequence

from . import numeric
from .lie import RootSystem, RootSystemError, _check_subsystem, coset_representatives, stabilizer_roots, weyl_group


def _prod(xs, start=Fraction(1)):
    return reduce(lambda a, b: a * b, xs, start)


def _shift(rs: RootSystem, lam: Sequence) -> tuple:
    return tuple(Fraction(c) + 1 for c in lam)


def _check_dominant_integral(lam: Sequence) -> None:
    for c in lam:
        if Fraction(c).denominator != 1 or c < 0:
            raise ValueError(f"{tuple(lam)} is not a dominant integral weight")


@dataclass(frozen=True, eq=False)
class Marking:
    """A conjugacy class exp(mu), mu in the closed alcove, with a polynomial Q on k."""

    mu: tuple
    k_roots: tuple
    k_indices: tuple  # indices of the positive roots of K
    other_indices: tuple  # indices of the remaining positive roots
    sign_exponent: int  # 2 mu . rho_K
    reps: tuple  # minimal coset representatives of W/W_K
    Q: Any = None  # InvariantPoly on the Cartan subalgebra, W_K-invariant; None means 1

    @cached_property
    def inverse_reps(self) -> tuple:
        return tuple(w.inverse() for w in self.reps)

    @property
    def half_dim(self) -> int:
        """dim(C)/2."""
        return len(self.other_indices)


def make_marking(rs: RootSystem, mu: Sequence, Q=None) -> Marking:
    mu = tuple(Fraction(c) for c in mu)
    k_roots = stabilizer_roots(rs, mu)
    k_idx = tuple(rs.root_index(a) for a in k_roots)
    other = tuple(k for k in range(rs.n_positive) if k not in set(k_idx))
    two_rho_k = tuple(sum(a[j] for a in k_roots) for j in range(rs.rank))
    sign_exp = rs.dot(two_rho_k, mu)
    if sign_exp.denominator != 1:
        raise RootSystemError("2 mu.rho_K is not an integer")  # pragma: no cover
    if Q is not None:
        Q.check_invariant(rs, k_roots)
    reps = tuple(coset_representatives(rs, k_roots))
    return Marking(mu, k_roots, k_idx, other, int(sign_exp), reps, Q)


def weyl_dim(rs: RootSystem, lam: Sequence) -> int:
    """Dimension of the irreducible representation with highest weight lam."""
    _check_dominant_integral(lam)
    v = _shift(rs, lam)
    d = _prod(rs.root_dot(k, v) / rs.root_dot(k, rs.rho) for k in range(rs.n_positive))
    assert d.denominator == 1
    return int(d)


def _rho_products(rs: RootSystem, k_roots) -> Fraction:
    """prod over positive roots of K of alpha . rho_K."""
    if not k_roots:
        return Fraction(1)
    rho_k = tuple(Fraction(sum(a[j] for a in k_roots), 2) for j in range(rs.rank))
    return _prod(rs.dot(a, rho_k) for a in k_roots)


def vol_G_over_T(rs: RootSystem):
    p = _prod(rs.root_dot(k, rs.rho) for k in range(rs.n_positive))
    return 1 / ((2 * numeric.pi()) ** rs.n_positive * numeric.num(p))


def vol_K_over_T(rs: RootSystem, k_roots):
    k_roots = _check_subsystem(rs, k_roots)
    return 1 / ((2 * numeric.pi()) ** len(k_roots) * numeric.num(_rho_products(rs, k_roots)))


def vol_G_over_K(rs: RootSystem, k_roots):
    return vol_G_over_T(rs) / vol_K_over_T(rs, k_roots)


def vol_coadjoint_orbit(rs: RootSystem, mu: Sequence):
    """Symplectic volume of the coadjoint orbit through mu (closed positive chamber)."""
    mu = tuple(Fraction(c) for c in mu)
    pairs = [rs.root_dot(k, mu) for k in range(rs.n_positive)]
    if any(x < 0 for x in pairs):
        raise ValueError("mu is not in the closed positive chamber")
    stab = [a for a, x in zip(rs.positive_roots, pairs) if x == 0]
    pos = [x for x in pairs if x > 0]
    return (2 * numeric.pi()) ** len(pos) * numeric.num(_prod(pos)) * vol_G_over_K(rs, stab)


def vol_conjugacy_class(rs: RootSystem, marking: Marking):
    sines = [numeric.sin_pi(rs.root_dot(k, marking.mu)) for k in marking.other_indices]
    out = vol_G_over_K(rs, marking.k_roots)
    for s in sines:
        out = out * 2 * s
    return out


def vol_G(rs: RootSystem):
    from .lie import lattice_covolume

    return vol_G_over_T(rs) * lattice_covolume(rs)


def char_ratio(rs: RootSystem, lam: Sequence, marking: Marking):
    """chi_lambda(exp mu) / dim V_lambda via the sum over W/W_K.

    The powers of 2*pi in (2 pi i)^(-dim C/2) and in Vol(C) cancel exactly, so
    only i^(-dim C/2), exact rationals and the sines remain.
    """
    _check_dominant_integral(lam)
    v = _shift(rs, lam)
    mu_dual = tuple(sum(rs.fw_gram[i][j] * marking.mu[i] for i in range(rs.rank)) for j in range(rs.rank))
    terms = []
    # exp(mu) is fixed by W_K, so the Weyl sum collapses onto right cosets W_K w;
    # their minimal representatives are the inverses of those of W/W_K
    for w in marking.inverse_reps:
        wv = w.apply(v)
        theta = sum((a * b for a, b in zip(wv, mu_dual)), Fraction(0))
        den = _prod(rs.root_dot(k, wv) for k in marking.other_indices)
        terms.append(numeric.phase(theta) / numeric.num(den))
    total = numeric.csum(terms)
    n = marking.half_dim
    const = _prod(rs.root_dot(k, rs.rho) for k in range(rs.n_positive)) / _rho_products(rs, marking.k_roots)
    sines = numeric.num(1)
    for k in marking.other_indices:
        sines = sines * 2 * numeric.sin_pi(rs.root_dot(k, marking.mu))
    sign = -1 if marking.sign_exponent % 2 else 1
    return sign * numeric.i_power(-n) * numeric.num(const) * total / sines


def char_value(rs: RootSystem, lam: Sequence, marking: Marking):
    """chi_lambda(exp mu)."""
    return char_ratio(rs, lam, marking) * weyl_dim(rs, lam)


def char_value_regular(rs: RootSystem, lam: Sequence, mu: Sequence):
    """Weyl character formula at a regular torus element exp(mu)."""
    _check_dominant_integral(lam)
    mu = tuple(Fraction(c) for c in mu)
    pairs = [rs.root_dot(k, mu) for k in range(rs.n_positive)]
    if any(x.denominator == 1 for x in pairs):
        raise ValueError("exp(mu) is not a regular element")
    v = _shift(rs, lam)
    mu_dual = tuple(sum(rs.fw_gram[i][j] * mu[i] for i in range(rs.rank)) for j in range(rs.rank))
    num = numeric.csum(
        w.parity * numeric.phase(sum((a * b for a, b in zip(w.apply(v), mu_dual)), Fraction(0)))
        for w in weyl_group(rs)
    )
    den = numeric.i_power(rs.n_positive)
    for x in pairs:
        den = den * 2 * numeric.sin_pi(x)
    return num / den
