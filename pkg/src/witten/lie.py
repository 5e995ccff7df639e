"""Exact root data, weights and Weyl groups of the simple compact types.

Every vector lives in the Cartan subalgebra, identified with its dual by the
invariant inner product, and is written in the basis of fundamental weights.
Roots and weights then have integer coordinates and all inner products are
exact rationals.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from . import numeric

Vec = tuple  # tuple of int / Fraction

MAX_RANK = 8
DEFAULT_WEYL_BUDGET = 10**7

_WEYL_ORDER = {
    "E6": 51840,
    "E7": 2903040,
    "E8": 696729600,
    "F4": 1152,
    "G2": 12,
}


class RootSystemError(ValueError):
    pass


def _e(n: int, i: int, c=1) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[i] = Fraction(c)
    return v


def _sub(u, v):
    return [a - b for a, b in zip(u, v)]


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _simple_root_model(t: str, n: int):
    """Ambient dimension, simple roots and the squared length of a long root."""
    if t == "A" and n >= 1:
        d = n + 1
        return d, [_sub(_e(d, i), _e(d, i + 1)) for i in range(n)], 2
    if t == "B" and n >= 2:
        roots = [_sub(_e(n, i), _e(n, i + 1)) for i in range(n - 1)] + [_e(n, n - 1)]
        return n, roots, 2
    if t == "C" and n >= 2:
        roots = [_sub(_e(n, i), _e(n, i + 1)) for i in range(n - 1)] + [_e(n, n - 1, 2)]
        return n, roots, 4
    if t == "D" and n >= 4:
        roots = [_sub(_e(n, i), _e(n, i + 1)) for i in range(n - 1)]
        roots.append(_add(_e(n, n - 2), _e(n, n - 1)))
        return n, roots, 2
    if t == "E" and n in (6, 7, 8):
        h = Fraction(1, 2)
        a1 = [h, -h, -h, -h, -h, -h, -h, h]
        a2 = _add(_e(8, 0), _e(8, 1))
        rest = [_sub(_e(8, i), _e(8, i - 1)) for i in range(1, 7)]
        return 8, ([a1, a2] + rest)[:n], 2
    if t == "F" and n == 4:
        h = Fraction(1, 2)
        roots = [
            _sub(_e(4, 1), _e(4, 2)),
            _sub(_e(4, 2), _e(4, 3)),
            _e(4, 3),
            [h, -h, -h, -h],
        ]
        return 4, roots, 2
    if t == "G" and n == 2:
        return 3, [[Fraction(1), Fraction(-1), Fraction(0)], [Fraction(-2), Fraction(1), Fraction(1)]], 6
    raise RootSystemError(f"invalid simple type {t}{n}")


def _weyl_order_table(t: str, n: int) -> int:
    if t == "A":
        return math.factorial(n + 1)
    if t in "BC":
        return 2**n * math.factorial(n)
    if t == "D":
        return 2 ** (n - 1) * math.factorial(n)
    return _WEYL_ORDER[f"{t}{n}"]


def _center_order(t: str, n: int) -> int:
    if t == "A":
        return n + 1
    if t in "BC":
        return 2
    if t == "D":
        return 4
    return {"E6": 3, "E7": 2, "E8": 1, "F4": 1, "G2": 1}[f"{t}{n}"]


def _solve(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact Gauss-Jordan solution x of a x = b for square a and matrix b."""
    n = len(a)
    m = [list(map(Fraction, row)) + list(map(Fraction, brow)) for row, brow in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def exact_det(a: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Fraction, row)) for row in a]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


@dataclass(frozen=True)
class WeightVector:
    """A weight in fundamental-weight coordinates, with a float cache."""

    coords: tuple
    ambient: tuple = field(compare=False, repr=False, default=())

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)


@dataclass(frozen=True)
class WeylElement:
    """Weyl group element acting on fundamental-weight coordinates."""

    matrix: tuple
    length: int

    @property
    def parity(self) -> int:
        return -1 if self.length % 2 else 1

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.matrix)

    def compose(self, other: "WeylElement") -> "WeylElement":
        """Matrix of self∘other; the length is not minimised, only its parity is tracked."""
        n = len(self.matrix)
        m = tuple(
            tuple(sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return WeylElement(m, self.length + other.length)

    def inverse(self) -> "WeylElement":
        n = len(self.matrix)
        ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        inv = _solve([[Fraction(x) for x in row] for row in self.matrix], ident)
        return WeylElement(tuple(tuple(int(x) for x in row) for row in inv), self.length)


@dataclass(frozen=True, eq=False)
class RootSystem:
    type_label: str
    rank: int
    scale: Fraction
    ambient_dim: int
    ambient_factor: Fraction  # inner product on the ambient model is ambient_factor * (x . y)
    simple_roots: tuple  # ambient coordinates
    cartan: tuple  # cartan[i][j] = <alpha_i, alpha_j^vee>
    gram: tuple  # inner products alpha_i . alpha_j
    fw_gram: tuple  # inner products omega_i . omega_j
    fundamental_ambient: tuple  # ambient coordinates of omega_i (rows)
    positive_roots: tuple  # fundamental-weight coordinates
    positive_roots_simple: tuple  # simple-root coordinates
    root_duals: tuple  # F alpha, so that alpha . v = sum(root_duals[k][j] * v[j])
    coroot_basis: tuple  # alpha_i^vee in fundamental-weight coordinates
    weyl_order: int
    center_order: int

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"

    @property
    def n_positive(self) -> int:
        return len(self.positive_roots)

    @property
    def dim(self) -> int:
        return self.rank + 2 * self.n_positive

    @property
    def rho(self) -> tuple:
        return (1,) * self.rank

    @property
    def fundamental_weights(self) -> tuple:
        return tuple(tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank))

    @property
    def simple_roots_fw(self) -> tuple:
        return tuple(tuple(row) for row in self.cartan)

    @property
    def highest_root(self) -> tuple:
        k = max(range(self.n_positive), key=lambda i: (sum(self.positive_roots_simple[i]), self.positive_roots_simple[i]))
        return self.positive_roots[k]

    def dot(self, u: Sequence, v: Sequence) -> Fraction:
        f = self.fw_gram
        return sum((u[i] * f[i][j] * v[j] for i in range(self.rank) for j in range(self.rank) if u[i] and v[j]), Fraction(0))

    def norm2(self, v: Sequence) -> Fraction:
        return self.dot(v, v)

    def root_dot(self, k: int, v: Sequence) -> Fraction:
        """alpha_k . v for the k-th positive root."""
        return sum((a * x for a, x in zip(self.root_duals[k], v) if x), Fraction(0))

    def root_index(self, alpha: Sequence) -> int:
        return self._root_lookup()[tuple(alpha)]

    def _root_lookup(self) -> dict:
        cache = self.__dict__.get("_lookup")
        if cache is None:
            cache = {r: k for k, r in enumerate(self.positive_roots)}
            object.__setattr__(self, "_lookup", cache)
        return cache

    def is_positive_root(self, v: Sequence) -> bool:
        return tuple(v) in self._root_lookup()

    def reflect(self, alpha: Sequence, v: Sequence) -> tuple:
        """Reflection of v in the hyperplane orthogonal to alpha."""
        c = 2 * self.dot(alpha, v) / self.dot(alpha, alpha)
        return tuple(x - c * a for x, a in zip(v, alpha))

    def simple_reflection_matrix(self, i: int) -> tuple:
        n = self.rank
        return tuple(
            tuple(int(j == k) - (self.cartan[i][j] if k == i else 0) for k in range(n)) for j in range(n)
        )

    def to_ambient(self, v: Sequence) -> tuple:
        return tuple(
            sum((Fraction(c) * self.fundamental_ambient[i][a] for i, c in enumerate(v) if c), Fraction(0))
            for a in range(self.ambient_dim)
        )

    def weight(self, coords: Sequence) -> WeightVector:
        coords = tuple(Fraction(c) if not isinstance(c, int) else c for c in coords)
        return WeightVector(coords, tuple(float(x) for x in self.to_ambient(coords)))

    def fw_from_ambient(self, x: Sequence) -> tuple:
        """Fundamental-weight coordinates of an ambient vector lying in the Cartan subalgebra."""
        # <x, alpha_i^vee> = 2 (x . alpha_i) / (alpha_i . alpha_i)
        out = []
        for i, a in enumerate(self.simple_roots):
            xa = self.ambient_factor * sum(Fraction(p) * q for p, q in zip(x, a))
            out.append(2 * xa / self.gram[i][i])
        return tuple(out)


def build_root_system(type_label: str, rank: int | None = None, scale=1) -> RootSystem:
    """Root data of the simple simply connected group of the given type.

    ``type_label`` may carry the rank ("A2") or it may be passed separately.
    ``scale`` multiplies the invariant inner product on the Lie algebra; the
    default is the basic normalization in which long roots have squared
    length 2.
    """
    t = type_label.strip().upper()
    if rank is None:
        if len(t) < 2 or not t[1:].isdigit():
            raise RootSystemError(f"cannot parse group label {type_label!r}")
        t, rank = t[0], int(t[1:])
    rank = int(rank)
    if rank > MAX_RANK:
        raise RootSystemError(f"rank {rank} exceeds the supported maximum {MAX_RANK}")
    scale = Fraction(scale)
    if scale <= 0:
        raise RootSystemError("scale must be positive")
    d, simple, long2 = _simple_root_model(t, rank)
    # basic normalization: long roots of squared length 2; scaling the inner
    # product on the Lie algebra by s divides the dual inner product by s
    factor = Fraction(2, long2) / scale
    n = rank
    g = [[factor * sum(a * b for a, b in zip(simple[i], simple[j])) for j in range(n)] for i in range(n)]
    cartan_q = [[2 * g[i][j] / g[j][j] for j in range(n)] for i in range(n)]
    if any(c.denominator != 1 for row in cartan_q for c in row):
        raise RootSystemError("non-integral Cartan matrix")  # pragma: no cover
    cartan = tuple(tuple(int(c) for c in row) for row in cartan_q)

    # positive roots: orbit of the simple roots under simple reflections
    def refl(i, v):
        c = sum(v[k] * cartan[k][i] for k in range(n))
        return tuple(v[k] - (c if k == i else 0) for k in range(n))

    simple_coords = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    seen = set(simple_coords)
    queue = deque(simple_coords)
    while queue:
        v = queue.popleft()
        for i in range(n):
            w = refl(i, v)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    pos_simple = sorted((v for v in seen if all(c >= 0 for c in v)), key=lambda v: (sum(v), v))
    pos_fw = tuple(tuple(sum(v[k] * cartan[k][j] for k in range(n)) for j in range(n)) for v in pos_simple)

    # omega_i in simple-root coordinates: Omega = g^{-1} D with D = diag(alpha_j.alpha_j / 2)
    dmat = [[g[i][i] / 2 if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    omega = _solve(g, dmat)  # omega[k][i] = k-th simple-root coordinate of omega_i
    fw_gram = tuple(
        tuple(sum(omega[k][i] * g[k][l] * omega[l][j] for k in range(n) for l in range(n)) for j in range(n))
        for i in range(n)
    )
    fundamental_ambient = tuple(
        tuple(sum(omega[k][i] * simple[k][a] for k in range(n)) for a in range(d)) for i in range(n)
    )
    root_duals = tuple(
        tuple(sum(alpha[i] * fw_gram[i][j] for i in range(n)) for j in range(n)) for alpha in pos_fw
    )
    coroots = tuple(tuple(2 * Fraction(c) / g[i][i] for c in cartan[i]) for i in range(n))
    rs = RootSystem(
        type_label=t,
        rank=n,
        scale=scale,
        ambient_dim=d,
        ambient_factor=factor,
        simple_roots=tuple(tuple(r) for r in simple),
        cartan=cartan,
        gram=tuple(tuple(r) for r in g),
        fw_gram=fw_gram,
        fundamental_ambient=fundamental_ambient,
        positive_roots=pos_fw,
        positive_roots_simple=tuple(pos_simple),
        root_duals=root_duals,
        coroot_basis=coroots,
        weyl_order=_weyl_order_table(t, n),
        center_order=_center_order(t, n),
    )
    return rs


def weyl_elements(rs: RootSystem, budget: int = DEFAULT_WEYL_BUDGET) -> Iterator[WeylElement]:
    """All Weyl group elements, breadth first by length.

    Elements are identified by the image of rho, which has trivial
    stabilizer.  Raises if |W| exceeds ``budget`` (E8 needs an explicit
    override).
    """
    if rs.weyl_order > budget:
        raise RootSystemError(f"|W| = {rs.weyl_order} exceeds the enumeration budget {budget}")
    n = rs.rank
    gens = [rs.simple_reflection_matrix(i) for i in range(n)]
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    rho = rs.rho
    seen = {rho}
    layer = [(rho, ident)]
    length = 0
    while layer:
        nxt = []
        for image, m in layer:
            yield WeylElement(m, length)
            for i, s in enumerate(gens):
                c = image[i]
                new_image = tuple(image[j] - c * rs.cartan[i][j] for j in range(n))
                if new_image in seen:
                    continue
                seen.add(new_image)
                new_m = tuple(
                    tuple(sum(s[a][k] * m[k][b] for k in range(n)) for b in range(n)) for a in range(n)
                )
                nxt.append((new_image, new_m))
        layer = nxt
        length += 1


def weyl_group(rs: RootSystem, budget: int = DEFAULT_WEYL_BUDGET) -> list[WeylElement]:
    cache = rs.__dict__.get("_weyl")
    if cache is None:
        cache = list(weyl_elements(rs, budget))
        object.__setattr__(rs, "_weyl", cache)
    return cache


def _check_subsystem(rs: RootSystem, k_roots) -> tuple:
    k_roots = tuple(tuple(a) for a in k_roots)
    ks = set(k_roots)
    for a in k_roots:
        if not rs.is_positive_root(a):
            raise RootSystemError(f"{a} is not a positive root")
    for a in k_roots:
        for b in k_roots:
            c = tuple(x + y for x, y in zip(a, b))
            if rs.is_positive_root(c) and c not in ks:
                raise RootSystemError("root subset is not closed")
            c = tuple(x - y for x, y in zip(a, b))
            if rs.is_positive_root(c) and c not in ks:
                raise RootSystemError("root subset is not closed")
    return k_roots


def coset_representatives(rs: RootSystem, k_roots, budget: int = DEFAULT_WEYL_BUDGET) -> list[WeylElement]:
    """Minimal-length representatives of W/W_K.

    In each coset exactly one element maps every positive root of K to a
    positive root; that element has minimal length.
    """
    k_roots = _check_subsystem(rs, k_roots)
    reps = [w for w in weyl_group(rs, budget) if all(rs.is_positive_root(w.apply(b)) for b in k_roots)]
    reps.sort(key=lambda w: (w.length, w.matrix))
    return reps


def dominant_weights_in_ball(rs: RootSystem, radius) -> list[WeightVector]:
    """Dominant weights lambda with |lambda + rho| <= radius.

    Sorted by |lambda + rho| and then lexicographically.  Membership is
    decided exactly: a float radius is converted to its exact binary value.
    """
    r2 = Fraction(radius) ** 2
    n = rs.rank
    f = rs.fw_gram
    if any(x < 0 for row in f for x in row):
        raise RootSystemError("fundamental weights with negative inner product")  # pragma: no cover
    out = []
    m = [1] * n  # m = lambda + rho coordinates, each >= 1

    def quad(v):
        return sum(v[i] * f[i][j] * v[j] for i in range(n) for j in range(n))

    def rec(i):
        # coordinates >= i are still at their minimum 1, so quad(m) is a lower bound
        if quad(m) > r2:
            return
        if i == n:
            out.append(tuple(m))
            return
        while True:
            if quad(m) > r2:
                break
            rec(i + 1)
            m[i] += 1
        m[i] = 1

    rec(0)
    keyed = sorted(((quad(v), tuple(c - 1 for c in v)) for v in out))
    return [rs.weight(lam) for _, lam in keyed]


def in_closed_alcove(rs: RootSystem, mu: Sequence) -> bool:
    mu = tuple(Fraction(c) for c in mu)
    for i in range(rs.rank):
        if rs.root_dot(rs.root_index(rs.simple_roots_fw[i]), mu) < 0:
            return False
    return rs.root_dot(rs.root_index(rs.highest_root), mu) <= 1


def stabilizer_roots(rs: RootSystem, mu: Sequence) -> tuple:
    """Positive roots alpha with alpha . mu an integer (roots of the centralizer of exp(mu))."""
    mu = tuple(Fraction(c) for c in mu)
    if len(mu) != rs.rank:
        raise RootSystemError("marking has wrong dimension")
    if not in_closed_alcove(rs, mu):
        raise RootSystemError(f"{tuple(str(c) for c in mu)} is outside the closed fundamental alcove")
    return tuple(a for k, a in enumerate(rs.positive_roots) if rs.root_dot(k, mu).denominator == 1)


def lattice_covolume(rs: RootSystem):
    """Covolume of the integral lattice (coroot lattice of the simply connected group)."""
    n = rs.rank
    g = [[4 * rs.gram[i][j] / (rs.gram[i][i] * rs.gram[j][j]) for j in range(n)] for i in range(n)]
    return numeric.sqrt(numeric.num(exact_det(g)))
