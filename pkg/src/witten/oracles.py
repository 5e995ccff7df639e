"""Independent brute-force and closed-form reference computations.

Nothing in the production code path imports this module; tests and the
``verify`` subcommand compare the main implementation against it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy

from . import numeric
from .deformation import DeformedP, _evaluate, _Powers
from .lie import RootSystem, weyl_group


class OracleError(ValueError):
    pass


# -------------------------------------------------------------- Freudenthal


def weight_multiplicities(rs: RootSystem, lam: Sequence, budget: int = 200_000) -> dict:
    """All weights of V_lambda with multiplicities, by Freudenthal's recursion.

    Weights are generated layer by layer below lambda (depth = height of
    lambda - nu); each multiplicity only needs those of shallower weights.
    """
    lam = tuple(int(c) for c in lam)
    if any(c < 0 for c in lam):
        raise OracleError(f"{lam} is not dominant")
    rho = rs.rho
    top_norm = rs.norm2(tuple(a + b for a, b in zip(lam, rho)))
    roots = [(a, sum(s)) for a, s in zip(rs.positive_roots, rs.positive_roots_simple)]
    simple = rs.simple_roots_fw
    mult = {lam: 1}
    layer, depth = [lam], 0
    while layer:
        depth += 1
        candidates = sorted({tuple(a - b for a, b in zip(nu, s)) for nu in layer for s in simple})
        nxt = []
        for nu in candidates:
            gap = top_norm - rs.norm2(tuple(a + b for a, b in zip(nu, rho)))
            if gap <= 0:
                continue
            acc = Fraction(0)
            for a, height in roots:
                k = 1
                while k * height <= depth:
                    up = tuple(x + k * y for x, y in zip(nu, a))
                    m = mult.get(up)
                    if m:
                        acc += m * rs.dot(up, a)
                    k += 1
            m = 2 * acc / gap
            if m.denominator != 1:
                raise OracleError("non-integral multiplicity")  # pragma: no cover
            if m > 0:
                mult[nu] = int(m)
                nxt.append(nu)
                if len(mult) > budget:
                    raise OracleError("weight budget exceeded")
        layer = nxt
    return mult


def freudenthal_character(rs: RootSystem, lam: Sequence, mu: Sequence, budget: int = 200_000):
    """sum over weights nu of m_nu exp(2 pi i nu . mu)."""
    mu = tuple(Fraction(c) for c in mu)
    mult = weight_multiplicities(rs, lam, budget)
    return numeric.csum(m * numeric.phase(rs.dot(nu, mu)) for nu, m in mult.items())


# --------------------------------------------------------- torus quadrature


@dataclass
class ClassFunction:
    """A finite Fourier series on the maximal torus: frequencies are weights (fw coordinates)."""

    rs: RootSystem
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def character(cls, rs: RootSystem, lam: Sequence) -> "ClassFunction":
        return cls(rs, {nu: complex(m) for nu, m in weight_multiplicities(rs, lam).items()})

    def __mul__(self, other: "ClassFunction") -> "ClassFunction":
        out: dict = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                k = tuple(i + j for i, j in zip(a, b))
                out[k] = out.get(k, 0) + x * y
        return ClassFunction(self.rs, out)

    def bandwidth(self) -> tuple:
        n = self.rs.rank
        return tuple(max((abs(nu[j]) for nu in self.coeffs), default=0) for j in range(n))

    def __call__(self, t: np.ndarray) -> np.ndarray:
        """Evaluate at points given in coroot coordinates (shape (N, rank))."""
        if not self.coeffs:
            return np.zeros(len(t), dtype=complex)
        freqs = np.array(list(self.coeffs), dtype=float)
        amps = np.array(list(self.coeffs.values()), dtype=complex)
        return np.exp(2j * np.pi * t @ freqs.T) @ amps


def _weyl_density(rs: RootSystem, t: np.ndarray) -> np.ndarray:
    # alpha(sum_j t_j coroot_j) = sum_j t_j <alpha, coroot_j> = t . (fw coordinates of alpha)
    roots = np.array(rs.positive_roots, dtype=float)
    return np.prod(np.abs(2 * np.sin(np.pi * t @ roots.T)) ** 2, axis=1)


def torus_quadrature_pairing(rs: RootSystem, f: ClassFunction, g: ClassFunction, mesh: int | None = None) -> complex:
    """<f, g> over G via the Weyl integration formula on a uniform torus mesh.

    The integrand f conj(g) |A|^2 is a trigonometric polynomial; a mesh finer
    than its bandwidth integrates it exactly.
    """
    need = [
        a + b + sum(abs(r[j]) for r in rs.positive_roots)
        for j, (a, b) in enumerate(zip(f.bandwidth(), g.bandwidth()))
    ]
    if mesh is None:
        mesh = max(need) + 1
    if mesh <= max(need):
        raise OracleError(f"mesh {mesh} does not exceed the bandwidth {max(need)}")
    axes = [np.arange(mesh) / mesh] * rs.rank
    t = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    vals = f(t) * np.conj(g(t)) * _weyl_density(rs, t)
    return complex(vals.mean() / len(weyl_group(rs)))


# ------------------------------------------------ finite-difference Hessian


def _hermitian_offdiag_basis(n: int) -> list:
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = 1 / math.sqrt(2)
            basis.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[i, j], e[j, i] = -1j / math.sqrt(2), 1j / math.sqrt(2)
            basis.append(e)
    return basis


def eigenvalue_function(P: DeformedP, deltas: Mapping[str, float]) -> Callable:
    """p extended to Hermitian matrices through their eigenvalues (type A only)."""
    rs = P.rs
    if not rs.type_label.startswith("A"):
        raise OracleError("the eigenvalue model needs a type A root system")
    xs = sympy.symbols(f"x1:{rs.ambient_dim + 1}")
    factor = sympy.Rational(rs.ambient_factor.numerator, rs.ambient_factor.denominator)
    expr = factor * sum(x**2 for x in xs) / 2
    for name, p in P.terms:
        expr = expr + sympy.Float(deltas[name], 30) * p.ambient
    fn = sympy.lambdify([xs], expr, "numpy")

    def value(matrix: np.ndarray) -> float:
        return float(fn(np.linalg.eigvalsh(matrix)))

    return value


def _offdiag_hessian(f: Callable, x0: np.ndarray, basis: list, h: float) -> np.ndarray:
    m = len(basis)
    out = np.empty((m, m))
    f0 = f(x0)
    for a in range(m):
        out[a, a] = (f(x0 + h * basis[a]) - 2 * f0 + f(x0 - h * basis[a])) / h**2
        for b in range(a + 1, m):
            pp = f(x0 + h * (basis[a] + basis[b]))
            pm = f(x0 + h * (basis[a] - basis[b]))
            mp = f(x0 - h * (basis[a] - basis[b]))
            mm = f(x0 - h * (basis[a] + basis[b]))
            out[a, b] = out[b, a] = (pp - pm - mp + mm) / (4 * h**2)
    return out


def sun_eigenvalue_hessian(n: int, P: DeformedP, xi: Sequence[float], h: float = 1e-3, deltas: Mapping[str, float] | None = None, rtol: float = 1e-6) -> tuple:
    """det of the off-diagonal block of the Hessian of p on su(n) at diag(xi).

    ``xi`` holds the n eigenvalues (ambient coordinates).  Returns
    ``(value, error)``: Richardson-combined central differences at h and h/2,
    with the error estimated against the h/2, h/4 combination.
    """
    if P.rs.rank != n - 1:
        raise OracleError("rank mismatch")
    xi = np.asarray(xi, dtype=float)
    if len(set(np.round(xi, 12))) != n:
        raise OracleError("xi is not regular")
    f = eigenvalue_function(P, deltas or {})
    x0 = np.diag(xi).astype(complex)
    basis = _hermitian_offdiag_basis(n)
    dets = [np.linalg.det(_offdiag_hessian(f, x0, basis, h / 2**k)) for k in range(3)]
    r1 = (4 * dets[1] - dets[0]) / 3
    r2 = (4 * dets[2] - dets[1]) / 3
    err = abs(r2 - r1)
    if err > rtol * max(abs(r2), 1.0):
        raise OracleError(f"finite differences unstable at h={h}: {err:.3g}")
    return float(r2), float(err)


def root_product_ratio(P: DeformedP, xi_fw: Sequence[float], deltas: Mapping[str, float]) -> float:
    """prod over positive roots of alpha . p'(xi) / alpha . xi at a numeric point."""
    rs = P.rs
    point = [float(x) for x in xi_fw]
    grad = list(point)
    for name, p in P.terms:
        powers = _Powers(point)
        grad = [a + deltas[name] * float(_evaluate(q, powers, None)) for a, q in zip(grad, p.gradient_polys())]
    out = 1.0
    for duals in rs.root_duals:
        out *= sum(float(d) * g for d, g in zip(duals, grad)) / sum(float(d) * x for d, x in zip(duals, point))
    return out


# --------------------------------------------------------------- closed forms


def zeta_closed_forms(s_exponent: int):
    """zeta(2m) from the Bernoulli number B_2m."""
    if s_exponent < 2 or s_exponent % 2:
        raise OracleError("only even arguments >= 2 have a Bernoulli closed form")
    m = s_exponent // 2
    b = Fraction(str(sympy.bernoulli(2 * m)))
    value = numeric.num((-1) ** (m + 1) * b / (2 * math.factorial(2 * m))) * (2 * numeric.pi()) ** (2 * m)
    return value


def clausen_series(t, m: int):
    """sum_{n>=1} sin(2 pi n t) / n^(2m-1) for rational t via Bernoulli polynomials."""
    if m < 1:
        raise OracleError("order must be positive")
    t = Fraction(t)
    t = t - math.floor(t)
    if t == 0:
        return numeric.num(0)
    k = m - 1
    bern = sympy.bernoulli(2 * k + 1, sympy.Rational(t.numerator, t.denominator))
    b = Fraction(int(bern.p), int(bern.q))
    coeff = (-1) ** (k + 1) * b / (2 * math.factorial(2 * k + 1))
    return numeric.num(coeff) * (2 * numeric.pi()) ** (2 * k + 1)
