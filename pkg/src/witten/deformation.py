"""Invariant polynomial deformations p = |xi|^2/2 + sum_j delta_j p_j on the
Cartan subalgebra, the change of variables p'(xi) = lambda + rho, Hessian
determinant factors and the exponent R~ of the handle contributions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    rationalize,
    standard_transformations,
)

from . import numeric
from .lie import RootSystem, _solve
from .series import GeneratorTable, SeriesError, SeriesMatrix, SuperSeries


class PolynomialError(ValueError):
    pass


# ---------------------------------------------------------------- exact polys
# polynomials in the fundamental-weight coordinates y_1..y_r: {exponents: Fraction}


def _poly_diff(poly: dict, i: int) -> dict:
    out = {}
    for e, c in poly.items():
        if e[i]:
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = out.get(tuple(f), 0) + c * e[i]
    return {k: v for k, v in out.items() if v}


def _poly_lincomb(polys: Sequence[dict], weights: Sequence) -> dict:
    out: dict = {}
    for p, w in zip(polys, weights):
        if not w:
            continue
        for e, c in p.items():
            out[e] = out.get(e, 0) + w * c
    return {k: v for k, v in out.items() if v}


class _Powers:
    """Lazily cached powers of the coordinates of a point."""

    def __init__(self, point):
        self.point = point
        self.cache = [dict() for _ in point]

    def get(self, i: int, e: int):
        c = self.cache[i]
        if e not in c:
            if e == 0:
                c[e] = None
            elif e == 1:
                c[e] = self.point[i]
            else:
                c[e] = self.get(i, e - 1) * self.point[i]
        return c[e]


def _evaluate(poly: dict, powers: _Powers, table: GeneratorTable | None):
    terms = []
    for e, c in poly.items():
        t = None
        for i, k in enumerate(e):
            if k:
                f = powers.get(i, k)
                t = f if t is None else t * f
        cn = numeric.num(c)
        terms.append(cn if t is None else t * cn)
    if table is None:
        return numeric.fsum(terms) if terms else numeric.num(0)
    out = SuperSeries.zero(table)
    for t in terms:
        out = out + t
    return out


@dataclass(eq=False)
class InvariantPoly:
    """Polynomial on the Cartan subalgebra with exact rational coefficients.

    ``ambient`` is the defining expression in the ambient model coordinates
    x1..xd; ``coeffs`` is its restriction to fundamental-weight coordinates.
    """

    rs: RootSystem
    ambient: sympy.Expr
    coeffs: dict
    text: str = ""
    _grad: list | None = field(default=None, repr=False)
    _hess: list | None = field(default=None, repr=False)

    @classmethod
    def from_expr(cls, rs: RootSystem, expr, text: str = "") -> "InvariantPoly":
        xs = ambient_symbols(rs)
        ys = sympy.symbols(f"y1:{rs.rank + 1}")
        subs = {
            xs[a]: sum(sympy.Rational(rs.fundamental_ambient[i][a].numerator, rs.fundamental_ambient[i][a].denominator) * ys[i] for i in range(rs.rank))
            for a in range(rs.ambient_dim)
        }
        expr = sympy.sympify(expr)
        free = expr.free_symbols - set(xs)
        if free:
            raise PolynomialError(f"unknown symbols {sorted(map(str, free))}")
        restricted = sympy.Poly(sympy.expand(expr.subs(subs, simultaneous=True)), *ys, domain="QQ")
        coeffs = {tuple(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in restricted.terms() if c != 0}
        return cls(rs, expr, coeffs, text or str(expr))

    @classmethod
    def parse(cls, rs: RootSystem, text: str) -> "InvariantPoly":
        return cls.from_expr(rs, parse_polynomial(rs, text), text)

    @classmethod
    def casimir(cls, rs: RootSystem) -> "InvariantPoly":
        return cls.parse(rs, "casimir")

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.coeffs)

    def substitute(self, matrix) -> dict:
        """Coefficients of y -> p(M y) for an integer/rational matrix M."""
        ys = sympy.symbols(f"y1:{self.rs.rank + 1}")
        poly = sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([y**k for y, k in zip(ys, e)]) for e, c in self.coeffs.items())
        subs = {ys[i]: sum(sympy.Rational(Fraction(matrix[i][j]).numerator, Fraction(matrix[i][j]).denominator) * ys[j] for j in range(len(ys))) for i in range(len(ys))}
        if not self.coeffs:
            return {}
        p = sympy.Poly(sympy.expand(sympy.sympify(poly).subs(subs, simultaneous=True)), *ys, domain="QQ")
        return {tuple(m): Fraction(int(c.numerator), int(c.denominator)) for m, c in p.terms() if c != 0}

    def check_invariant(self, rs: RootSystem, roots=None) -> None:
        """Exact invariance under the reflections in ``roots`` (default: simple roots, i.e. all of W)."""
        roots = rs.simple_roots_fw if roots is None else roots
        n = rs.rank
        for alpha in roots:
            cols = [rs.reflect(alpha, tuple(int(i == j) for i in range(n))) for j in range(n)]
            matrix = [[cols[j][i] for j in range(n)] for i in range(n)]
            if self.substitute(matrix) != self.coeffs:
                raise PolynomialError(f"polynomial {self.text!r} is not invariant under the reflection in {alpha}")

    def gradient_polys(self) -> list:
        """Components of p' (gradient for the invariant inner product) as polynomials."""
        if self._grad is None:
            n = self.rs.rank
            partials = [_poly_diff(self.coeffs, i) for i in range(n)]
            finv = _inverse(self.rs.fw_gram)
            self._grad = [_poly_lincomb(partials, finv[i]) for i in range(n)]
        return self._grad

    def hessian_polys(self) -> list:
        """Matrix of the Hessian operator p'' on the Cartan subalgebra."""
        if self._hess is None:
            n = self.rs.rank
            second = [[_poly_diff(_poly_diff(self.coeffs, i), j) for j in range(n)] for i in range(n)]
            finv = _inverse(self.rs.fw_gram)
            self._hess = [[_poly_lincomb([second[k][j] for k in range(n)], finv[i]) for j in range(n)] for i in range(n)]
        return self._hess

    def __call__(self, point, table: GeneratorTable | None = None):
        return _evaluate(self.coeffs, _Powers(point), table)


def _inverse(m):
    n = len(m)
    return _solve([list(r) for r in m], [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])


def ambient_symbols(rs: RootSystem):
    return sympy.symbols(f"x1:{rs.ambient_dim + 1}")


def parse_polynomial(rs: RootSystem, text: str):
    """Parse "3/2*x1^2 + power_sum(3) + casimir" into an exact sympy expression."""
    xs = ambient_symbols(rs)
    half = sympy.Rational(1, 2)
    factor = sympy.Rational(rs.ambient_factor.numerator, rs.ambient_factor.denominator)
    local = {str(x): x for x in xs}
    local["casimir"] = half * factor * sum(x**2 for x in xs)
    local["power_sum"] = sympy.Lambda(sympy.Symbol("k"), sum(x ** sympy.Symbol("k") for x in xs))
    try:
        expr = parse_expr(
            text,
            local_dict=local,
            global_dict={"Integer": sympy.Integer, "Rational": sympy.Rational, "Symbol": sympy.Symbol, "Float": sympy.Float},
            transformations=standard_transformations + (convert_xor, rationalize),
        )
        expr = sympy.expand(sympy.sympify(expr))
    except Exception as exc:  # sympy raises a zoo of exception types
        raise PolynomialError(f"cannot parse polynomial {text!r}: {exc}") from exc
    free = expr.free_symbols - set(xs)
    if free:
        raise PolynomialError(f"unknown symbols {sorted(map(str, free))} in {text!r}")
    if not expr.is_polynomial(*xs):
        raise PolynomialError(f"{text!r} is not a polynomial")
    return expr


# ---------------------------------------------------------- deformations


@dataclass(eq=False)
class DeformedP:
    """p(xi) = |xi|^2/2 + sum_j delta_j p_j(xi) with delta_j even generators."""

    rs: RootSystem
    terms: list = field(default_factory=list)  # [(generator name, InvariantPoly)]
    check: bool = True

    def __post_init__(self):
        names = [n for n, _ in self.terms]
        if len(set(names)) != len(names):
            raise PolynomialError("deformation generators must be distinct")
        if self.check:
            for _, p in self.terms:
                p.check_invariant(self.rs)

    @property
    def is_quadratic(self) -> bool:
        return not self.terms

    def value(self, xi, table: GeneratorTable):
        """p(xi) as a series."""
        rs = self.rs
        out = SuperSeries.zero(table)
        for i in range(rs.rank):
            for j in range(rs.rank):
                if rs.fw_gram[i][j]:
                    out = out + xi[i] * xi[j] * (numeric.num(rs.fw_gram[i][j]) / 2)
        for name, p in self.terms:
            out = out + SuperSeries.generator(table, name) * p(xi, table)
        return out


def constant_point(table: GeneratorTable, v: Sequence) -> list:
    return [SuperSeries.constant(table, numeric.num(Fraction(c))) for c in v]


def _poly_vector(polys, powers: _Powers, table):
    return [_evaluate(p, powers, table) for p in polys]


def grad(P: DeformedP, xi: Sequence) -> list:
    """p'(xi) as a vector of series."""
    table = xi[0].table
    out = list(xi)
    for name, p in P.terms:
        d = SuperSeries.generator(table, name)
        g = _poly_vector(p.gradient_polys(), _Powers(xi), table)
        out = [o + d * gi for o, gi in zip(out, g)]
    return out


def hess(P: DeformedP, xi: Sequence) -> SeriesMatrix:
    """Hessian operator p''(xi) restricted to the Cartan subalgebra."""
    table = xi[0].table
    n = len(xi)
    rows = [[SuperSeries.constant(table, int(i == j)) for j in range(n)] for i in range(n)]
    for name, p in P.terms:
        d = SuperSeries.generator(table, name)
        powers = _Powers(xi)
        h = p.hessian_polys()
        rows = [[rows[i][j] + d * _evaluate(h[i][j], powers, table) for j in range(n)] for i in range(n)]
    return SeriesMatrix(rows)


def solve_xi(P: DeformedP, target: Sequence, table: GeneratorTable) -> list:
    """Formal inverse of the change of variables: the series xi with p'(xi) = target.

    Fixed point iteration xi <- target - q'(xi); each pass raises the lowest
    degree of the error by one, so D passes are exact at truncation D.
    """
    base = constant_point(table, target)
    xi = list(base)
    if P.is_quadratic:
        return xi
    for _ in range(table.truncation):
        correction = grad(P, xi)
        # grad = xi + q'(xi)
        xi = [b - (c - x) for b, c, x in zip(base, correction, xi)]
    return xi


def _root_pair(rs: RootSystem, k: int, v: Sequence):
    out = None
    for a, x in zip(rs.root_duals[k], v):
        if a:
            t = x * numeric.num(a)
            out = t if out is None else out + t
    return out


def root_ratio(rs: RootSystem, P: DeformedP, xi: Sequence, indices, pprime=None) -> SuperSeries:
    """prod over the given positive roots of (alpha . p'(xi)) / (alpha . xi)."""
    table = xi[0].table
    if P.is_quadratic:
        return SuperSeries.constant(table, 1)
    pprime = grad(P, xi) if pprime is None else pprime
    num = SuperSeries.constant(table, 1)
    den = SuperSeries.constant(table, 1)
    for k in indices:
        num = num * _root_pair(rs, k, pprime)
        den = den * _root_pair(rs, k, xi)
    return num * den.inverse()


def det_half_pp(rs: RootSystem, P: DeformedP, xi: Sequence, k_roots=(), variant: str = "full") -> SuperSeries:
    """Square roots of Hessian determinants.

    ``full``: det^{1/2} p''(xi) on the whole Lie algebra;
    ``k``: det^{1/2} of p'' on the subalgebra k (Cartan part and roots of K);
    ``ratio``: det^{1/2} p'' / det^{1/2} p''_k, the product over the other roots.
    """
    table = xi[0].table
    k_idx = [rs.root_index(a) for a in k_roots]
    if variant == "full":
        idx = range(rs.n_positive)
    elif variant == "k":
        idx = k_idx
    elif variant == "ratio":
        idx = [k for k in range(rs.n_positive) if k not in set(k_idx)]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    ratio = root_ratio(rs, P, xi, idx)
    if variant == "ratio":
        return ratio
    if P.is_quadratic:
        return SuperSeries.constant(table, 1)
    det_t = hess(P, xi).det()
    return det_t.sqrt() * ratio


def det_pp_t(P: DeformedP, xi: Sequence) -> SuperSeries:
    return hess(P, xi).det()


# ------------------------------------------------------------------- beta


@dataclass(eq=False)
class Handle:
    """Odd data of one handle: P1 = sum eps1_i p_i and P2 = sum eps2_i p_i."""

    eps1: list = field(default_factory=list)  # [(odd generator name, InvariantPoly)]
    eps2: list = field(default_factory=list)


@dataclass(eq=False)
class BetaSpec:
    sigmas: list = field(default_factory=list)  # [(even generator name, InvariantPoly)]
    handles: list = field(default_factory=list)  # [Handle]

    @property
    def is_trivial(self) -> bool:
        return not self.sigmas and not any(h.eps1 or h.eps2 for h in self.handles)


def _odd_gradient(pairs, xi, table):
    n = len(xi)
    out = [SuperSeries.zero(table) for _ in range(n)]
    powers = _Powers(xi)
    for name, p in pairs:
        e = SuperSeries.generator(table, name)
        g = _poly_vector(p.gradient_polys(), powers, table)
        out = [o + e * gi for o, gi in zip(out, g)]
    return out


def inner(rs: RootSystem, u: Sequence, v: Sequence, table: GeneratorTable) -> SuperSeries:
    """u . v for series vectors, keeping u to the left of v."""
    out = SuperSeries.zero(table)
    for i in range(rs.rank):
        for j in range(rs.rank):
            f = rs.fw_gram[i][j]
            if f and u[i].terms and v[j].terms:
                out = out + (u[i] * v[j]) * numeric.num(f)
    return out


def sigma_part(xi: Sequence, sigmas, table: GeneratorTable) -> SuperSeries:
    out = SuperSeries.zero(table)
    for name, p in sigmas:
        out = out + SuperSeries.generator(table, name) * p(xi, table)
    return out


def handle_part(rs: RootSystem, P: DeformedP, xi: Sequence, handle: Handle, hessian: SeriesMatrix | None = None) -> SuperSeries:
    """-(1/2 pi i) p_t''(xi)^{-1} P1'(xi) . P2'(xi) for one handle."""
    table = xi[0].table
    if not handle.eps1 or not handle.eps2:
        return SuperSeries.zero(table)
    g1 = _odd_gradient(handle.eps1, xi, table)
    g2 = _odd_gradient(handle.eps2, xi, table)
    if not P.is_quadratic:
        hessian = hess(P, xi) if hessian is None else hessian
        g1 = hessian.solve(g1)
    factor = -1 / (2 * numeric.pi() * numeric.cnum(1j))
    return inner(rs, g1, g2, table) * factor


def rtilde(rs: RootSystem, P: DeformedP, xi: Sequence, beta: BetaSpec) -> SuperSeries:
    table = xi[0].table
    out = sigma_part(xi, beta.sigmas, table)
    hessian = None if P.is_quadratic or not beta.handles else hess(P, xi)
    for h in beta.handles:
        out = out + handle_part(rs, P, xi, h, hessian)
    return out
