"""Formal change of variables p'(xi) = lambda + rho and the root-product determinant.

For p(xi) = |xi|^2/2 + delta p4(xi) the point xi is a power series in delta.
The square root of the Hessian determinant off the Cartan subalgebra is a
product over positive roots; a finite-difference Hessian of p extended to
Hermitian matrices confirms it.

Run: python3 demos/change_of_variables.py
"""
from fractions import Fraction

from witten import DeformedP, GeneratorTable, InvariantPoly, SuperSeries, build_root_system, det_half_pp, grad, solve_xi
from witten.oracles import sun_eigenvalue_hessian

rs = build_root_system("A2")
p4 = InvariantPoly.parse(rs, "power_sum(4)")
P = DeformedP(rs, [("delta", p4)])
table = GeneratorTable(("delta",), (), 3)

target = (Fraction(2), Fraction(1))  # lambda + rho for lambda = (1, 0)
xi = solve_xi(P, target, table)
for i, x in enumerate(xi):
    print(f"xi_{i + 1} =", x)
print("p'(xi) =", grad(P, xi), "(exactly the target up to rounding)")
print("det^1/2 p''(xi) =", det_half_pp(rs, P, xi))

# Root product at a fixed point against the eigenvalue model.
deep = GeneratorTable(("delta",), (), 10)
point = [SuperSeries.constant(deep, float(c)) for c in target]
ratio = det_half_pp(rs, P, point, variant="ratio")
for delta in (1e-2, 5e-3):
    product = complex(ratio.evaluate({"delta": delta})).real ** 2
    fd, err = sun_eigenvalue_hessian(3, P, [float(x) for x in rs.to_ambient(target)], deltas={"delta": delta})
    print(f"delta={delta}: root product^2 = {product:.12f}, finite differences = {fd:.12f} (+- {err:.1e})")
