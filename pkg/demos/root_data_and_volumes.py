"""Root data, Weyl dimensions and the volumes that enter every fixed point term.

Run: python3 demos/root_data_and_volumes.py
"""
from fractions import Fraction

from witten import build_root_system, make_marking, vol_conjugacy_class, vol_G, vol_G_over_T, weyl_dim, weyl_group

for label in ("A1", "A2", "B2", "G2"):
    rs = build_root_system(label)
    print(f"{label}: rank {rs.rank}, dim G = {rs.dim}, |W| = {len(weyl_group(rs))}, #Z = {rs.center_order}")
    print(f"    rho = {rs.rho}, vol(G/T) = {float(vol_G_over_T(rs)):.6g}, vol(G) = {float(vol_G(rs)):.6g}")

# The adjoint and a few small representations of SU(3).
a2 = build_root_system("A2")
for lam in [(1, 0), (0, 1), (1, 1), (2, 0), (3, 0)]:
    print(f"dim V{lam} = {weyl_dim(a2, lam)}")

# Rescaling the inner product by c rescales vol(G) by c^(dim G / 2).
for scale in (1, 4, Fraction(9, 4)):
    rs = build_root_system("A1", scale=scale)
    print(f"SU(2) at scale {scale}: vol(G) = {float(vol_G(rs)):.10f}")

# A conjugacy class exp(mu): regular classes have dimension dim G - rank.
for mu in [(Fraction(1, 3), Fraction(1, 3)), (Fraction(1, 2), 0), (0, 0)]:
    m = make_marking(a2, mu)
    print(f"SU(3) class at mu={tuple(map(str, mu))}: dim {2 * m.half_dim}, stabilizer roots {m.k_roots}, Vol = {float(vol_conjugacy_class(a2, m)):.6g}")
