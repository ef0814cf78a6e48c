"""Independent reference values for the C++ fixtures.

Written without reference to the C++ sources: tables are transcribed straight
from the published 0-bit / 1-bit box listings and every quantity is computed
from its definition with exact fractions (scipy only for the LP checks).
Run once; the printed values are frozen into tests/unit/*.cpp.
"""
from fractions import Fraction as Fr
from itertools import product
import math

import numpy as np
from scipy.optimize import linprog

# rows ab = 00, 01, 10, 11; entries "xy"
ONE_BIT = [
    ["00", "00", "01", "00"], ["11", "11", "01", "00"], ["00", "00", "10", "11"], ["11", "11", "10", "11"],
    ["00", "00", "10", "00"], ["11", "00", "01", "00"], ["00", "11", "10", "11"], ["11", "11", "01", "11"],
]
ZERO_BIT = [
    ["00", "00", "00", "00"], ["00", "00", "10", "10"], ["01", "00", "01", "00"], ["11", "10", "01", "00"],
    ["00", "01", "10", "11"], ["10", "11", "10", "11"], ["11", "11", "01", "01"], ["11", "11", "11", "11"],
]


def det(col):
    p = {}
    for a, b, x, y in product(range(2), repeat=4):
        xy = col[a * 2 + b]
        p[(a, b, x, y)] = Fr(1) if (int(xy[0]), int(xy[1])) == (x, y) else Fr(0)
    return p


def mix(parts):
    out = {k: Fr(0) for k in product(range(2), repeat=4)}
    for w, p in parts:
        for k in out:
            out[k] += w * p[k]
    return out


def E(p, a, b):
    return sum(p[(a, b, x, y)] * (1 if x == y else -1) for x in range(2) for y in range(2))


def lam(p):
    return sum((-1) ** (a * (1 - b)) * E(p, a, b) for a in range(2) for b in range(2))


def marg_x(p, a, b, x):
    return sum(p[(a, b, x, y)] for y in range(2))


def marg_y(p, a, b, y):
    return sum(p[(a, b, x, y)] for x in range(2))


def S(p):
    # largest shift of one party's marginal caused by the other party's input
    a_to_b = max(abs(marg_y(p, 0, b, 0) - marg_y(p, 1, b, 0)) for b in range(2))
    b_to_a = max(abs(marg_x(p, a, 0, 0) - marg_x(p, a, 1, 0)) for a in range(2))
    return max(a_to_b, b_to_a)


def I(p):
    m = Fr(1)
    for a, b in product(range(2), repeat=2):
        m = min(m, min(marg_x(p, a, b, 0), marg_x(p, a, b, 1)), min(marg_y(p, a, b, 0), marg_y(p, a, b, 1)))
    return m


def in_fragment(p, minimize_one_bit=False):
    boxes = [det(c) for c in ZERO_BIT] + [det(c) for c in ONE_BIT]
    keys = list(product(range(2), repeat=4))
    A = np.array([[float(bx[k]) for bx in boxes] for k in keys])
    bvec = np.array([float(p[k]) for k in keys])
    c = np.array([0.0] * 8 + [1.0] * 8) if minimize_one_bit else np.zeros(16)
    res = linprog(c, A_eq=A, b_eq=bvec, bounds=[(0, None)] * 16, method="highs")
    return res.status == 0, (res.fun if res.status == 0 else None)


pr = mix([(Fr(1, 2), det(ONE_BIT[0])), (Fr(1, 2), det(ONE_BIT[3]))])
white = {k: Fr(1, 4) for k in product(range(2), repeat=4)}
uloc = mix([(Fr(1, 8), det(c)) for c in ZERO_BIT])

print("table spot checks: d20 ab=00 ->", ZERO_BIT[2][0], " d01 ab=10 ->", ONE_BIT[0][2])
print("uniform mix of 1-bit boxes: lambda =", lam(mix([(Fr(1, 8), det(c)) for c in ONE_BIT])))
print("3/4 d01 + 1/4 d31: I =", I(mix([(Fr(3, 4), det(ONE_BIT[0])), (Fr(1, 4), det(ONE_BIT[3]))])))
print("uniform 0-bit members: max S =", max(S(det(c)) for c in ZERO_BIT), " max I =", max(I(det(c)) for c in ZERO_BIT))

# Cirelson point: isotropic quantum box and its fragment representative.
v = 1 / math.sqrt(2)
iso = {k: v * float(pr[k]) + (1 - v) * 0.25 for k in pr}
ok, _ = in_fragment(iso)
print("isotropic Tsirelson box (Lambda=2 sqrt2) in fragment:", ok)
iso_r = {k: Fr(99, 140) * pr[k] + Fr(41, 140) * Fr(1, 4) for k in pr}
print("rational isotropic box v=99/140: Lambda =", lam(iso_r), " in fragment:", in_fragment(iso_r, True))
w = math.sqrt(2) - 1
rep = {k: w * float(pr[k]) + (1 - w) * float(uloc[k]) for k in pr}
ok, m = in_fragment(rep, True)
print("C PR + (1-C) uniform-local with C = sqrt2 - 1 in fragment:", ok, " min one-bit weight:", m)

half = mix([(Fr(1, 2), uloc), (Fr(1, 2), pr)])
ok, m = in_fragment(half, True)
print("1/2 uniform-local + 1/2 PR: Lambda =", lam(half), " LP min one-bit =", m)

# Lambda = -4 box: outputs x xor y = 1 xor a*(1-b), uniform
neg = {(a, b, x, y): (Fr(1, 2) if (x ^ y) == 1 ^ (a * (1 - b)) else Fr(0)) for a, b, x, y in product(range(2), repeat=4)}
print("Lambda of anti-pattern box:", lam(neg), " in fragment:", in_fragment(neg)[0])

# PR box with the ab=00 row replaced by the deterministic outcome x=0, y=1.
bent = dict(pr)
for x, y in product(range(2), repeat=2):
    bent[(0, 0, x, y)] = Fr(1) if (x, y) == (0, 1) else Fr(0)
print("PR with ab=00 forced to xy=01: Lambda =", lam(bent), " S =", S(bent), " in fragment:", in_fragment(bent)[0])

# Partial mixing of the first four 0-bit boxes with the biased likelihood.
SUPP = {0: (2, 5), 1: (3, 4), 2: (0, 7), 3: (1, 6)}


def rho(alpha, ab, j):
    beta = (1 - alpha) / 3
    return alpha if j in SUPP[ab] else beta


al = Fr(1, 8)
part = {}
for a, b, x, y in product(range(2), repeat=4):
    part[(a, b, x, y)] = sum(rho(al, a * 2 + b, j) * det(ZERO_BIT[j])[(a, b, x, y)] for j in range(4))
print("partial mix alpha=1/8: S =", S(part), " beta - alpha =", (1 - al) / 3 - al)

# Telepathy at lambda = d^{4_0}, alpha = 0.
al = Fr(0)
joint = {ab: rho(al, ab, 4) for ab in range(4)}
print("P(B=0|A=0) at d40, alpha=0:", joint[0] / (joint[0] + joint[1]))

# LF mode alpha = 0, l = 1/2: F from its definition 1 - |P(a,b) joint - product| style sum.
al, l = Fr(0), Fr(1, 2)
print("LF: F =", 1 - (l / 3) * (1 - 4 * al), " Lambda =", 4 * (1 - 2 * al * l))
print("p_F at F=0.9, C=1:", 1 - 3 * (1 - Fr(9, 10)) / 1)
print("bound at F=1, C=sqrt2-1:", math.sqrt(2) - 1)

# rho0 / rho* split at alpha = 1/8.
al = Fr(1, 8)
wl, ws = 4 * al, 1 - 4 * al
delta = ((1 - al) / 3 - al) / (1 - 4 * al)
print("alpha=1/8 split weights:", wl, ws, " rho* entries:", Fr(0), delta)

# Golden singlet fixture, hand executed.
def sgn(m):
    return 1 if m >= 0 else 0


def unit(v):
    n = math.sqrt(sum(c * c for c in v))
    return [c / n for c in v]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


na, nb = [0, 0, 1], [1, 0, 0]
e1, e2 = [0.6, 0, 0.8], [0, -0.6, -0.8]
ep, em = unit([p + q for p, q in zip(e1, e2)]), unit([p - q for p, q in zip(e1, e2)])
ups_a = sgn(dot(na, e1)) ^ sgn(dot(na, e2))
n_a_out = 1 ^ sgn(dot(na, e1))
ups_b = sgn(dot(nb, ep)) ^ sgn(dot(nb, em))
b_in = ups_b ^ 1
print("golden: eta+ =", ep, " eta- =", em)
print("golden: ups_A =", ups_a, " n_A =", n_a_out, " ups_B =", ups_b, " b =", b_in, " sgn(nb.eta+) =", sgn(dot(nb, ep)))
