"""Fixed point terms and regularized sums over dominant weights.

``pairing_term`` evaluates one summand of the intersection pairing formula
for the moduli space of flat bundles on a genus ``s`` surface with ``r``
marked conjugacy classes; ``sum_pairing`` sums it over all dominant weights
either by truncation (with a tail estimate and Richardson acceleration in
the radius) or with a Gaussian convergence factor extrapolated to zero.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import numeric
from .deformation import (
    BetaSpec,
    DeformedP,
    Handle,
    det_half_pp,
    handle_part,
    rtilde,
    sigma_part,
    solve_xi,
)
from .lie import RootSystem, dominant_weights_in_ball
from .series import GeneratorTable, SeriesError, SuperSeries
from .volumes import Marking, char_ratio, vol_conjugacy_class, vol_G, weyl_dim

DEFAULT_EPSILONS = tuple(0.1 / 2**k for k in range(6))
MAX_EPSILONS = 12


class SpecError(ValueError):
    pass


class DivergenceError(RuntimeError):
    pass


@dataclass
class Summation:
    mode: str = "auto"  # truncate | convergence_factor | auto
    radius: float | None = None
    epsilons: tuple | None = None  # None: default sequence, extended adaptively
    tolerance: float = 1e-10
    max_terms: int = 200_000
    accelerate: bool = True
    levels: int = 5  # nested radii used for the tail estimate and acceleration


@dataclass(eq=False)
class PairingSpec:
    rs: RootSystem
    genus: int
    markings: list
    deformation: DeformedP
    beta: BetaSpec
    table: GeneratorTable
    summation: Summation = field(default_factory=Summation)
    check_regime: bool = True

    def __post_init__(self):
        s, r = self.genus, len(self.markings)
        if s < 0:
            raise SpecError("genus must be non-negative")
        if self.check_regime and not (2 * s + r >= 3 or s >= 2):
            raise SpecError("need 2s + r >= 3 (generic stabilizer equal to the center)")
        if len(self.beta.handles) > s:
            raise SpecError("more handle data than handles")
        even = set(self.table.even)
        odd = set(self.table.odd)
        for name, _ in list(self.deformation.terms) + list(self.beta.sigmas):
            if name not in even:
                raise SpecError(f"{name!r} is not an even generator of the table")
        for h in self.beta.handles:
            for name, _ in h.eps1 + h.eps2:
                if name not in odd:
                    raise SpecError(f"{name!r} is not an odd generator of the table")
        for m in self.markings:
            if not isinstance(m, Marking):
                raise SpecError("markings must be Marking instances")

    @property
    def dim_moduli(self) -> int:
        d = (2 * self.genus - 2) * self.rs.dim + sum(2 * m.half_dim for m in self.markings)
        assert d % 2 == 0
        return d

    def with_marking(self, marking: Marking) -> "PairingSpec":
        return PairingSpec(self.rs, self.genus, list(self.markings) + [marking], self.deformation, self.beta, self.table, self.summation, self.check_regime)

    def growth_free(self) -> bool:
        """True when every marking polynomial is constant."""
        return all(m.Q is None or m.Q.is_constant() for m in self.markings)


@dataclass
class PairingResult:
    coefficients: dict  # monomial string -> complex
    terms_summed: int
    tail_bound: float
    mode: str
    radius: float | None
    status: str  # ok | tolerance_not_met | diverged | budget_exhausted
    regulator_trace: list = field(default_factory=list)  # [(eps, {monomial: complex})]
    extrapolation_residual: float | None = None
    plain_tail_estimate: float | None = None
    accelerated: bool = False
    wallclock: float = 0.0


# ------------------------------------------------------------ per-weight terms


def _xi(P: DeformedP, lam: Sequence, table: GeneratorTable):
    return solve_xi(P, tuple(Fraction(c) + 1 for c in lam), table)


def _q_value(marking: Marking, xi, table):
    if marking.Q is None:
        return SuperSeries.constant(table, 1)
    return marking.Q(xi, table)


def conjugacy_fourier_term(rs: RootSystem, marking: Marking, P: DeformedP, lam: Sequence, table: GeneratorTable) -> SuperSeries:
    """Fourier coefficient <n^beta, conj(chi_lambda)> of a conjugacy class."""
    xi = _xi(P, lam, table)
    ratio = det_half_pp(rs, P, xi, marking.k_roots, "ratio")
    chi_bar = (char_ratio(rs, lam, marking) * weyl_dim(rs, lam)).conjugate()
    scalar = numeric.two_pi_i_power(marking.half_dim) * chi_bar * vol_conjugacy_class(rs, marking)
    return (_q_value(marking, xi, table) * ratio) * scalar


def double_fourier_term(rs: RootSystem, P: DeformedP, beta: BetaSpec, lam: Sequence, table: GeneratorTable) -> SuperSeries:
    """Fourier coefficient of the fused double, with at most one handle of odd data."""
    if len(beta.handles) > 1:
        raise SpecError("the double carries one handle")
    xi = _xi(P, lam, table)
    det = det_half_pp(rs, P, xi, (), "full") ** 2
    expo = rtilde(rs, P, xi, beta)
    scalar = numeric.two_pi_i_power(rs.dim) * vol_G(rs) ** 2 / weyl_dim(rs, lam)
    out = det * scalar
    if expo.terms:
        out = out * expo.exp()
    return out


def pairing_term(spec: PairingSpec, lam: Sequence) -> SuperSeries:
    """One summand (global prefactor included) of the intersection pairing."""
    rs, table, P = spec.rs, spec.table, spec.deformation
    s = spec.genus
    xi = _xi(P, lam, table)
    dim = weyl_dim(rs, lam)
    scalar = rs.center_order * vol_G(rs) ** (2 * s - 2) * numeric.num(Fraction(dim) ** (2 - 2 * s))
    out = SuperSeries.constant(table, scalar)
    if not P.is_quadratic and s != 1:
        out = out * det_half_pp(rs, P, xi, (), "full") ** (2 * s - 2)
    for m in spec.markings:
        factor = char_ratio(rs, lam, m).conjugate() * vol_conjugacy_class(rs, m)
        piece = _q_value(m, xi, table) if m.Q is not None else None
        if not P.is_quadratic:
            ratio = det_half_pp(rs, P, xi, m.k_roots, "ratio")
            piece = ratio if piece is None else piece * ratio
        out = out * factor if piece is None else out * piece * factor
    expo = rtilde(rs, P, xi, spec.beta)
    if expo.terms:
        out = out * expo.exp()
    return out


def fusion_product_check(spec: PairingSpec, weights: Sequence, rtol: float = 1e-12) -> dict:
    """Compare pairing_term with the product of per-factor Fourier coefficients.

    The product is normalized as in the localization formula: each factor
    contributes its coefficient divided by dim V_lambda, and the sum over
    fixed points carries (2 pi i)^(-dim G) dim^2 / (vol_G^2 det p'').
    Differences are reported absolutely and relative to the largest
    coefficient, since the individual factors grow like powers of dim V_lambda.
    """
    rs, table, P = spec.rs, spec.table, spec.deformation
    s = spec.genus
    report = {"max_abs_diff": 0.0, "max_rel_diff": 0.0, "weights": []}
    handles = list(spec.beta.handles) + [Handle() for _ in range(s - len(spec.beta.handles))]
    for lam in weights:
        lam = tuple(lam)
        assembled = pairing_term(spec, lam)
        xi = _xi(P, lam, table)
        dim = weyl_dim(rs, lam)
        det = det_half_pp(rs, P, xi, (), "full") ** 2
        prod = det.inverse() * (
            rs.center_order
            * numeric.two_pi_i_power(-spec.dim_moduli // 2 - rs.dim)
            * numeric.num(dim) ** 2
            / vol_G(rs) ** 2
        )
        sig = sigma_part(xi, spec.beta.sigmas, table)
        if sig.terms:
            prod = prod * sig.exp()
        for h in handles:
            prod = prod * double_fourier_term(rs, P, BetaSpec(handles=[h]), lam, table) * (1 / numeric.num(dim))
        for m in spec.markings:
            prod = prod * conjugacy_fourier_term(rs, m, P, lam, table) * (1 / numeric.num(dim))
        diff = assembled.max_abs_diff(prod)
        rel = diff / max(_majorant(assembled), _majorant(prod), 1e-300)
        report["weights"].append((lam, diff, rel))
        report["max_abs_diff"] = max(report["max_abs_diff"], diff)
        report["max_rel_diff"] = max(report["max_rel_diff"], rel)
    report["passed"] = report["max_rel_diff"] <= rtol
    return report


# ------------------------------------------------------------------ summation


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("WITTEN_THREADS", "1")))
    except ValueError:
        return 1


def _terms(spec: PairingSpec, weights, threads: int) -> list:
    fn = lambda w: pairing_term(spec, w.coords)  # noqa: E731
    if threads <= 1 or len(weights) < 2:
        return [fn(w) for w in weights]
    digits = numeric.precision_digits()

    def run(w):
        with numeric.working_precision(digits):
            return fn(w)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, weights))


def _sum_series(terms: Sequence[SuperSeries], weights=None) -> dict:
    """Coefficientwise compensated sum, keyed by monomial string."""
    by_key: dict = {}
    for i, t in enumerate(terms):
        for k, c in t.terms.items():
            by_key.setdefault(k, []).append(c if weights is None else c * weights[i])
    if not terms:
        return {}
    table = terms[0].table
    return {table.monomial_string(k): numeric.csum(v) for k, v in sorted(by_key.items())}


def _neville(hs: Sequence[float], values: Sequence[dict]):
    """Polynomial extrapolation to h = 0; returns the estimate and the last correction."""
    keys = sorted(set().union(*values)) if values else []
    zero = numeric.cnum(0)
    best, err = {}, 0.0
    for key in keys:
        col = [v.get(key, zero) for v in values]
        tab = list(col)
        prev = tab[-1]
        n = len(hs)
        for m in range(1, n):
            prev = tab[n - 1]
            for i in range(n - 1, m - 1, -1):
                tab[i] = (hs[i - m] * tab[i] - hs[i] * tab[i - 1]) / (hs[i - m] - hs[i])
        best[key] = tab[n - 1]
        err = max(err, abs(complex(tab[n - 1] - prev)))
    return best, err


def _majorant(t: SuperSeries) -> float:
    return max((abs(complex(c)) for c in t.terms.values()), default=0.0)


def _truncated_sum(spec: PairingSpec, threads: int) -> PairingResult:
    rs, cfg = spec.rs, spec.summation
    rho_norm = math.sqrt(float(rs.norm2(rs.rho)))
    radius = cfg.radius if cfg.radius is not None else 16 * rho_norm
    auto = cfg.radius is None
    cache: dict = {}
    while True:
        weights = dominant_weights_in_ball(rs, radius)
        if len(weights) > cfg.max_terms:
            status = "budget_exhausted"
            weights = weights[: cfg.max_terms]
        else:
            status = None
        fresh = [w for w in weights if w.coords not in cache]
        for w, t in zip(fresh, _terms(spec, fresh, threads)):
            cache[w.coords] = t
        terms = [cache[w.coords] for w in weights]
        norms = [math.sqrt(float(rs.norm2(tuple(c + 1 for c in w.coords)))) for w in weights]
        result = _estimate(spec, terms, norms, radius)
        if status:
            result.status = status
        if result.status != "tolerance_not_met" or not auto:
            return result
        radius *= 2


def _estimate(spec: PairingSpec, terms, norms, radius) -> PairingResult:
    cfg = spec.summation
    values = _sum_series(terms)
    n = len(terms)
    res = PairingResult(values, n, math.inf, "truncate", radius, "tolerance_not_met")
    if n == 0:
        return res
    # Dyadic shells, per monomial: a decaying dominant coefficient must not
    # hide a coefficient whose terms stop decaying.
    rmax = norms[-1]
    shells: dict = {}
    for t, r in zip(terms, norms):
        slot = 0 if r > rmax / 2 else 1 if r > rmax / 4 else None
        for k, c in t.terms.items():
            acc = shells.setdefault(k, [[], [], []])
            a = abs(complex(c))
            acc[2].append(a)
            if slot is not None:
                acc[slot].append(a)
    scale = max((math.fsum(acc[2]) for acc in shells.values()), default=0.0)
    tail = 0.0
    for outer_terms, inner_terms, _ in shells.values():
        outer, inner_ = math.fsum(outer_terms), math.fsum(inner_terms)
        if outer + inner_ <= 1e-14 * scale:
            continue  # below rounding level of the dominant coefficient
        if inner_ == 0:
            tail = math.inf
            continue
        q = outer / inner_
        if q >= 1.0:
            res.status = "diverged"
            return res
        tail = max(tail, 2 * outer * q / (1 - q))
    res.plain_tail_estimate = None if math.isinf(tail) else tail
    res.tail_bound = tail
    if cfg.accelerate and n >= 2**cfg.levels:
        cuts, hs, partials = [], [], []
        for k in range(cfg.levels, -1, -1):
            cut = rmax / 2**k
            idx = max(i for i, r in enumerate(norms) if r <= cut * (1 + 1e-12)) + 1 if norms[0] <= cut * (1 + 1e-12) else 0
            if idx == 0 or (cuts and idx == cuts[-1]):
                continue
            cuts.append(idx)
            hs.append(1 / norms[idx - 1])
            partials.append(_sum_series(terms[:idx]))
        if len(hs) >= 3:
            best, err = _neville(hs, partials)
            res.extrapolation_residual = err
            if 10 * err < res.tail_bound:
                res.coefficients = best
                res.tail_bound = 10 * err
                res.accelerated = True
    if res.tail_bound <= cfg.tolerance:
        res.status = "ok"
    return res


def _regularized_sum(spec: PairingSpec, threads: int) -> PairingResult:
    """Gaussian-regulated sums S(eps), extrapolated to eps = 0 in powers of sqrt(eps).

    Without explicit epsilons the default geometric sequence is extended by
    further halvings (up to MAX_EPSILONS points) until the extrapolation
    residual meets the tolerance or the term budget runs out.
    """
    rs, cfg = spec.rs, spec.summation
    adaptive = cfg.epsilons is None
    eps = sorted(DEFAULT_EPSILONS if adaptive else cfg.epsilons, reverse=True)
    if len(eps) < 2:
        raise SpecError("convergence-factor mode needs at least two epsilons")
    cutoff = math.log(1e3 / cfg.tolerance) + 10
    cache: dict = {}
    while True:
        radius = cfg.radius if cfg.radius is not None else math.sqrt(cutoff / eps[-1])
        weights = dominant_weights_in_ball(rs, radius)
        status = None
        if len(weights) > cfg.max_terms:
            weights = weights[: cfg.max_terms]
            status = "budget_exhausted"
        fresh = [w for w in weights if w.coords not in cache]
        for w, t in zip(fresh, _terms(spec, fresh, threads)):
            cache[w.coords] = t
        terms = [cache[w.coords] for w in weights]
        n2 = [float(rs.norm2(tuple(c + 1 for c in w.coords))) for w in weights]
        trace = []
        for e in eps:
            factors = [numeric.exp(numeric.num(-e) * numeric.num(x)) for x in n2]
            trace.append((e, _sum_series(terms, factors)))
        best, err = _neville([math.sqrt(e) for e, _ in trace], [v for _, v in trace])
        # weights beyond the radius, at the smallest epsilon
        maj = max((_majorant(t) for t in terms), default=0.0)
        trunc = maj * math.exp(-eps[-1] * radius**2) * max(len(weights), 1)
        res = PairingResult(best, len(weights), err + trunc, "convergence_factor", radius, status or "ok", trace, err)
        if res.tail_bound > cfg.tolerance and res.status == "ok":
            res.status = "tolerance_not_met"
        if not adaptive or res.status != "tolerance_not_met" or len(eps) >= MAX_EPSILONS or cfg.radius is not None:
            return res
        eps.append(eps[-1] / 2)


def default_mode(spec: PairingSpec) -> str:
    if 2 * spec.genus + len(spec.markings) - 2 >= 2 and spec.growth_free():
        return "truncate"
    return "convergence_factor"


def sum_pairing(spec: PairingSpec, threads: int | None = None, raise_on_divergence: bool = False) -> PairingResult:
    """Sum pairing_term over the dominant weights."""
    threads = default_threads() if threads is None else threads
    start = time.perf_counter()
    mode = spec.summation.mode
    if mode == "auto":
        mode = default_mode(spec)
    if mode == "truncate":
        res = _truncated_sum(spec, threads)
    elif mode == "convergence_factor":
        res = _regularized_sum(spec, threads)
    else:
        raise SpecError(f"unknown summation mode {mode!r}")
    res.wallclock = time.perf_counter() - start
    if res.status == "diverged" and raise_on_divergence:
        raise DivergenceError("term sequence does not decay")
    return res
