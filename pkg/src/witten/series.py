"""Truncated supercommutative formal series.

A series is a finite map from normal-ordered monomials to complex
coefficients.  A monomial is stored as a flat tuple: the exponents of the
even generators followed by a bitmask of the odd generators present.  Odd
generators anticommute and square to zero; every generator counts one unit
of degree and terms of total degree above the table's truncation are
dropped.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from . import numeric


class SeriesError(ValueError):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _odd_sign(a: int, b: int) -> int:
    """Sign from moving the odd factors of b past those of a into index order."""
    swaps = 0
    while b:
        low = b & -b
        swaps += _popcount(a & ~((low << 1) - 1))
        b ^= low
    return -1 if swaps & 1 else 1


@dataclass(frozen=True)
class GeneratorTable:
    even: tuple = ()
    odd: tuple = ()
    truncation: int = 4

    def __post_init__(self):
        object.__setattr__(self, "even", tuple(self.even))
        object.__setattr__(self, "odd", tuple(self.odd))
        names = self.even + self.odd
        if len(set(names)) != len(names):
            raise SeriesError("generator names must be unique")
        if self.truncation < 0:
            raise SeriesError("truncation must be >= 0")

    @property
    def n_even(self) -> int:
        return len(self.even)

    @property
    def one(self) -> tuple:
        return (0,) * self.n_even + (0,)

    def degree(self, key: tuple) -> int:
        return _degree(key)

    def key_of(self, monomial) -> tuple:
        """Normalize a monomial given as a key, a canonical string or a {name: power} map.

        Returns ``(key, sign)``; the sign accounts for reordering odd factors.
        """
        if isinstance(monomial, tuple):
            return monomial, 1
        if isinstance(monomial, str):
            monomial = _parse_monomial(monomial)
        evens = [0] * self.n_even
        mask = 0
        sign = 1
        for name, power in (monomial.items() if isinstance(monomial, Mapping) else monomial):
            if name in self.even:
                evens[self.even.index(name)] += power
            elif name in self.odd:
                if power == 0:
                    continue
                bit = 1 << self.odd.index(name)
                if power > 1 or mask & bit:
                    return None, 0
                sign *= _odd_sign(mask, bit)
                mask |= bit
            else:
                raise SeriesError(f"unknown generator {name!r}")
        return tuple(evens) + (mask,), sign

    def monomial_string(self, key: tuple) -> str:
        parts = []
        for name, e in zip(self.even, key[:-1]):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        mask = key[-1]
        for i, name in enumerate(self.odd):
            if mask >> i & 1:
                parts.append(name)
        return "*".join(parts) if parts else "1"


_FACTOR = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_()]*)\s*(?:\^\s*(\d+))?\s*$")


def _parse_monomial(text: str) -> list:
    text = text.strip()
    if text == "1":
        return []
    out = []
    for part in text.split("*"):
        m = _FACTOR.match(part)
        if not m:
            raise SeriesError(f"bad monomial {text!r}")
        out.append((m.group(1), int(m.group(2) or 1)))
    return out


@lru_cache(maxsize=None)
def _degree(key: tuple) -> int:
    return sum(key[:-1]) + _popcount(key[-1])


class SuperSeries:
    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping | None = None):
        self.table = table
        d = table.truncation
        self.terms = {k: c for k, c in (terms or {}).items() if c != 0 and _degree(k) <= d}

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, table: GeneratorTable, value) -> "SuperSeries":
        return cls(table, {table.one: numeric.cnum(value)})

    @classmethod
    def zero(cls, table: GeneratorTable) -> "SuperSeries":
        return cls(table)

    @classmethod
    def generator(cls, table: GeneratorTable, name: str) -> "SuperSeries":
        key, _ = table.key_of({name: 1})
        return cls(table, {key: numeric.cnum(1)})

    @classmethod
    def monomial(cls, table: GeneratorTable, monomial, coeff=1) -> "SuperSeries":
        key, sign = table.key_of(monomial)
        if key is None:
            return cls(table)
        return cls(table, {key: sign * numeric.cnum(coeff)})

    # inspection ---------------------------------------------------------
    @property
    def constant_term(self):
        return self.terms.get(self.table.one, numeric.cnum(0))

    def coefficient(self, monomial):
        key, sign = self.table.key_of(monomial)
        if key is None:
            return numeric.cnum(0)
        if _degree(key) > self.table.truncation:
            raise SeriesError("monomial beyond the truncation degree")
        return sign * self.terms.get(key, numeric.cnum(0))

    def is_even(self) -> bool:
        return all(k[-1] == 0 for k in self.terms)

    def is_constant(self) -> bool:
        return all(k == self.table.one for k in self.terms)

    def to_dict(self) -> dict:
        return {self.table.monomial_string(k): c for k, c in sorted(self.terms.items())}

    def max_abs_diff(self, other: "SuperSeries") -> float:
        other = self._coerce(other)
        keys = set(self.terms) | set(other.terms)
        zero = numeric.cnum(0)
        return max((abs(complex(self.terms.get(k, zero) - other.terms.get(k, zero))) for k in keys), default=0.0)

    def allclose(self, other, atol: float = 1e-12, rtol: float = 0.0) -> bool:
        other = self._coerce(other)
        keys = set(self.terms) | set(other.terms)
        zero = numeric.cnum(0)
        for k in keys:
            a, b = self.terms.get(k, zero), other.terms.get(k, zero)
            if abs(complex(a - b)) > atol + rtol * max(abs(complex(a)), abs(complex(b))):
                return False
        return True

    def evaluate(self, values: Mapping):
        """Substitute numbers for the even generators; odd content is not allowed."""
        total = []
        for k, c in self.terms.items():
            if k[-1]:
                raise SeriesError("cannot evaluate a series with odd content")
            term = c
            for name, e in zip(self.table.even, k[:-1]):
                if e:
                    term = term * values[name] ** e
            total.append(term)
        return numeric.csum(total)

    def __repr__(self):
        body = " + ".join(f"({c})*{self.table.monomial_string(k)}" for k, c in sorted(self.terms.items()))
        return f"SuperSeries({body or '0'})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "SuperSeries":
        if isinstance(other, SuperSeries):
            if other.table != self.table:
                raise SeriesError("generator tables differ")
            return other
        return SuperSeries.constant(self.table, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return SuperSeries(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return SuperSeries(self.table, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, factor) -> "SuperSeries":
        return SuperSeries(self.table, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SuperSeries):
            return self.scale(numeric.cnum(other) if not isinstance(other, (int, float, complex)) else other)
        other = self._coerce(other)
        d = self.table.truncation
        out: dict = {}
        a_items = [(k, c, _degree(k)) for k, c in self.terms.items()]
        b_items = [(k, c, _degree(k)) for k, c in other.terms.items()]
        for ka, ca, da in a_items:
            ma = ka[-1]
            for kb, cb, db in b_items:
                if da + db > d:
                    continue
                mb = kb[-1]
                if ma & mb:
                    continue
                key = tuple(x + y for x, y in zip(ka[:-1], kb[:-1])) + (ma | mb,)
                c = ca * cb
                if mb and ma:
                    c = c * _odd_sign(ma, mb)
                out[key] = out[key] + c if key in out else c
        return SuperSeries(self.table, out)

    def __rmul__(self, other):
        # scalars commute with everything
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, SuperSeries):
            return self * other.inverse()
        return self.scale(1 / other)

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise SeriesError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        result = SuperSeries.constant(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _augmentation(self) -> "SuperSeries":
        terms = dict(self.terms)
        terms.pop(self.table.one, None)
        return SuperSeries(self.table, terms)

    def _power_series(self, coeffs: Iterable) -> "SuperSeries":
        """sum_n coeffs[n] x^n for an augmentation-zero x = self."""
        result = SuperSeries.zero(self.table)
        power = SuperSeries.constant(self.table, 1)
        for n, c in enumerate(coeffs):
            if n > self.table.truncation or not power.terms:
                break
            result = result + power.scale(c)
            power = power * self
        return result

    def exp(self) -> "SuperSeries":
        if self.constant_term != 0:
            raise SeriesError("exp requires a series with zero constant term")
        coeffs = []
        f = numeric.num(1)
        for n in range(self.table.truncation + 1):
            coeffs.append(1 / f)
            f = f * (n + 1)
        return self._power_series(coeffs)

    def inverse(self) -> "SuperSeries":
        c = self.constant_term
        if c == 0:
            raise SeriesError("series with zero constant term is not invertible")
        x = self._augmentation().scale(1 / c)
        return x._power_series([(-1) ** n for n in range(self.table.truncation + 1)]).scale(1 / c)

    def sqrt(self) -> "SuperSeries":
        """Principal square root: principal branch on the constant, binomial series on the rest."""
        c = self.constant_term
        if c == 0:
            raise SeriesError("series with zero constant term has no square root")
        x = self._augmentation().scale(1 / c)
        coeffs = []
        b = numeric.num(1)
        for n in range(self.table.truncation + 1):
            coeffs.append(b)
            b = b * (numeric.num(1) / 2 - n) / (n + 1)
        root = numeric.sqrt(c) if numeric.is_extended() else complex(c) ** 0.5
        return x._power_series(coeffs).scale(root)


class SeriesMatrix:
    """Square matrix with even series entries."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise SeriesError("matrix must be square")
        for r in self.rows:
            for e in r:
                if not e.is_even():
                    raise SeriesError("matrix entries must be even")
        self.table = self.rows[0][0].table if n else None

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, table: GeneratorTable, n: int) -> "SeriesMatrix":
        return cls([[SuperSeries.constant(table, int(i == j)) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        n = self.size
        if isinstance(other, SeriesMatrix):
            return SeriesMatrix(
                [[_series_sum(self.table, (self.rows[i][k] * other.rows[k][j] for k in range(n))) for j in range(n)] for i in range(n)]
            )
        return [_series_sum(self.table, (self.rows[i][k] * other[k] for k in range(n))) for i in range(n)]

    def _eliminate(self, rhs=None):
        n = self.size
        a = [list(r) for r in self.rows]
        b = [list(r) for r in rhs] if rhs is not None else None
        det = SuperSeries.constant(self.table, 1)
        for col in range(n):
            piv = max(range(col, n), key=lambda r: abs(complex(a[r][col].constant_term)))
            if a[piv][col].constant_term == 0:
                raise SeriesError("constant part of the matrix is singular")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                if b is not None:
                    b[col], b[piv] = b[piv], b[col]
                det = -det
            p = a[col][col]
            det = det * p
            pinv = p.inverse()
            a[col] = [e * pinv for e in a[col]]
            if b is not None:
                b[col] = [e * pinv for e in b[col]]
            for r in range(n):
                if r == col or not a[r][col].terms:
                    continue
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                if b is not None:
                    b[r] = [x - f * y for x, y in zip(b[r], b[col])]
        return det, b

    def det(self) -> SuperSeries:
        if self.size == 0:
            return SuperSeries.constant(self.table, 1)
        return self._eliminate()[0]

    def inverse(self) -> "SeriesMatrix":
        ident = SeriesMatrix.identity(self.table, self.size)
        return SeriesMatrix(self._eliminate(ident.rows)[1])

    def solve(self, vector) -> list:
        """M^{-1} v for a vector of series (entries of v may be odd)."""
        _, b = self._eliminate([[v] for v in vector])
        return [row[0] for row in b]


def _series_sum(table, items) -> SuperSeries:
    out = SuperSeries.zero(table)
    for s in items:
        out = out + s
    return out
