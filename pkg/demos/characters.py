"""Character values on conjugacy classes, checked against two independent routes.

The library evaluates chi_lambda(exp mu) by a sum over W/W_K, which works on
alcove walls too.  Freudenthal's multiplicity recursion and exact torus
quadrature provide the independent checks.

Run: python3 demos/characters.py
"""
from fractions import Fraction

from witten import build_root_system, char_value, make_marking
from witten.oracles import ClassFunction, freudenthal_character, torus_quadrature_pairing

g2 = build_root_system("G2")
for lam in [(1, 0), (0, 1), (2, 1)]:
    for mu in [(0, 0), (Fraction(1, 6), Fraction(1, 6)), (Fraction(1, 2), 0)]:
        m = make_marking(g2, mu)
        fast = complex(char_value(g2, lam, m))
        slow = complex(freudenthal_character(g2, lam, mu))
        print(f"G2 lambda={lam} mu={tuple(map(str, mu))}: {fast.real:+.12f}  (Freudenthal {slow.real:+.12f})")

# Orthonormality of SU(3) characters through exact trigonometric quadrature.
a2 = build_root_system("A2")
chars = {lam: ClassFunction.character(a2, lam) for lam in [(0, 0), (1, 0), (0, 1), (1, 1)]}
print("Gram matrix of SU(3) characters:")
for a in chars:
    print("   ", " ".join(f"{torus_quadrature_pairing(a2, chars[a], chars[b]).real:6.3f}" for b in chars))
