"""Truncated series with even and odd (anticommuting) generators.

Run: python3 demos/super_series.py
"""
from witten import GeneratorTable, SeriesMatrix, SuperSeries

table = GeneratorTable(even=("delta", "sigma"), odd=("eps1", "eps2"), truncation=3)
d = SuperSeries.generator(table, "delta")
e1 = SuperSeries.generator(table, "eps1")
e2 = SuperSeries.generator(table, "eps2")

print("eps1*eps2 + eps2*eps1 =", e1 * e2 + e2 * e1)
print("eps1*eps1 =", e1 * e1)
print("1/(1+delta) =", (1 + d).inverse())
print("sqrt(1+2 delta) =", (1 + 2 * d).sqrt())
# The exponential of a nilpotent odd pair stops after the linear term.
print("exp(delta + eps1*eps2) =", (d + e1 * e2).exp())

m = SeriesMatrix([[1 + d, d * 0.5], [d * 0.5, SuperSeries.constant(table, 1)]])
print("det =", m.det())
print("coefficient of delta^2 in det:", m.det().coefficient("delta^2"))
