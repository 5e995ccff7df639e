"""A full pairing problem: SU(3), genus 2, one marking, a deformation,
an even class sigma and an odd pair on the first handle.

The same problem is stored in demos/problems/su3_deformed.json and runs from
the command line with
    witten pairing --input demos/problems/su3_deformed.json --out result.json

Run: python3 demos/deformed_pairing.py
"""
import json
from pathlib import Path

from witten.engine import fusion_product_check, sum_pairing
from witten.problem import build_spec, load_problem

problems = Path(__file__).parent / "problems"
spec = build_spec(load_problem((problems / "su3_deformed.json").read_text()))
res = sum_pairing(spec)
print(f"mode {res.mode}, status {res.status}, {res.terms_summed} weights, tail estimate {res.tail_bound:.2e}")
for monomial, value in res.coefficients.items():
    print(f"  {monomial:16s} {value.real:+.10e} {value.imag:+.10e}i")
# The radius is fixed at 20, so the status reports that the tolerance was not
# reached: the deformation coefficients decay slowly and need a larger ball.

# Each summand is a product of local contributions: the marked class and the handle.
report = fusion_product_check(spec, [(0, 0), (1, 0), (2, 3)])
print(f"fusion factorization: max relative difference {report['max_rel_diff']:.1e}")

# Pairing sigma with the cubic power sum makes the sigma^2 coefficient grow
# along the alcove walls.  The summation notices and refuses to return a value.
doc = json.loads((problems / "su3_divergent.json").read_text())
doc["summation"]["radius"] = 30
res = sum_pairing(build_spec(load_problem(json.dumps(doc))))
print(f"cubic sigma class: status {res.status}, tail bound {res.tail_bound}")
