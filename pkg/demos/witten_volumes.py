"""Symplectic volumes of SU(2) moduli spaces and a marked example.

Without markings the sum over representations is 2 vol(G)^(2s-2) zeta(2s-2).
With one regular marking the sum becomes a sine series with a Bernoulli
polynomial closed form.

Run: python3 demos/witten_volumes.py
"""
import math
from fractions import Fraction

from witten import BetaSpec, DeformedP, GeneratorTable, PairingSpec, Summation, build_root_system, make_marking, sum_pairing, vol_G
from witten.oracles import clausen_series, zeta_closed_forms

rs = build_root_system("A1")
scalars = GeneratorTable((), (), 0)
for s in (2, 3, 4):
    spec = PairingSpec(rs, s, [], DeformedP(rs, []), BetaSpec(), scalars, Summation(mode="truncate"))
    res = sum_pairing(spec)
    exact = 2 * float(vol_G(rs)) ** (2 * s - 2) * float(zeta_closed_forms(2 * s - 2))
    print(f"genus {s}: {res.coefficients['1'].real:.15g}  closed form {exact:.15g}  tail bound {res.tail_bound:.1e}  ({res.terms_summed} weights)")

for u in (Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)):
    spec = PairingSpec(rs, 2, [make_marking(rs, (u,))], DeformedP(rs, []), BetaSpec(), scalars)
    for mode in ("truncate", "convergence_factor"):
        spec.summation = Summation(mode=mode)
        res = sum_pairing(spec)
        print(f"marked u={u} [{mode}]: {res.coefficients['1'].real:.13g}  tail {res.tail_bound:.1e}")
    print(f"    closed form {float(clausen_series(u / 2, 2)) / math.pi ** 3:.13g}")
