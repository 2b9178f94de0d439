#!/usr/bin/env python3
"""Writes data/planted/NN.{curve,variety}: N=3 varieties containing a planted translate H + p."""

import os
import sys
from fractions import Fraction as F

CURVES = {
    "E1": (-43, 42, (-3, 12)),
    "E2": (-21, -20, (-3, 4)),
    "E3": (-31, -30, (-3, 6)),
}

# curve, root e, Q (None: default, "2Q": doubled, or sign of y), permutation, sign s, lambda
INSTANCES = [
    ("E1", 1, None, (1, 2, 3), 1, 2),
    ("E1", -7, None, (2, 3, 1), 1, 1),
    ("E1", 6, 1, (3, 1, 2), -1, -1),
    ("E2", -1, None, (1, 2, 3), -1, 3),
    ("E2", 5, 1, (1, 3, 2), 1, 1),
    ("E2", -4, None, (2, 1, 3), 1, -2),
    ("E3", 6, None, (1, 2, 3), 1, 1),
    ("E3", -5, 1, (3, 2, 1), -1, 2),
    ("E3", -1, None, (2, 3, 1), 1, 1),
    ("E1", 1, "2Q", (1, 2, 3), -1, 1),
]


def add(P, Q, A):
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and y1 == -y2:
        return None
    m = (3 * x1 * x1 + A) / (2 * y1) if P == Q else (y2 - y1) / (x2 - x1)
    x3 = m * m - x1 - x2
    return (x3, m * (x1 - x3) - y1)


def neg(P):
    return None if P is None else (P[0], -P[1])


def on_curve(P, A, B):
    return P is None or P[1] ** 2 == P[0] ** 3 + A * P[0] + B


def fmt(q):
    q = F(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def term(q):
    q = F(q)
    return f"+ {fmt(q)}" if q >= 0 else f"- {fmt(-q)}"


def scaled(k, expr):
    return f"{fmt(k)}*({expr})" if k != 1 else f"({expr})"


def build(inst):
    name, e, qsel, perm, s, lam = inst
    A, B, q0 = CURVES[name]
    Q = (F(q0[0]), F(-q0[1]))
    if qsel == 1:
        Q = (F(q0[0]), F(q0[1]))
    elif qsel == "2Q":
        Q = add((F(q0[0]), F(-q0[1])), (F(q0[0]), F(-q0[1])), A)
    e = F(e)
    assert e ** 3 + A * e + B == 0
    T = (e, F(0))
    c = 3 * e * e + A
    a, b, cc = perm
    xa, ya, xb, yb, xc, yc = f"x{a}", f"y{a}", f"x{b}", f"y{b}", f"x{cc}", f"y{cc}"
    xq, yq = Q
    f1 = f"({xa} {term(-e)})*({xb} {term(-e)}) {term(-c)} {term(lam)}*({xc} {term(-xq)})"
    f2 = (f"({xc} {term(-xq)}) + {xb}*({yc} {term(-yq)}) + {ya}*({xb} {term(-e)})^2 "
          f"{term(s * c)}*{yb}")

    def evaluate(P):
        pts = {a: P, b: add(P, T, A) if s == 1 else neg(add(P, T, A)), cc: Q}
        X = {i: pts[i][0] for i in pts}
        Y = {i: pts[i][1] for i in pts}
        v1 = (X[a] - e) * (X[b] - e) - c + lam * (X[cc] - xq)
        v2 = (X[cc] - xq) + X[b] * (Y[cc] - yq) + Y[a] * (X[b] - e) ** 2 + s * c * Y[b]
        return v1, v2

    G = (F(q0[0]), F(q0[1]))
    P = G
    for _ in range(3):
        assert on_curve(P, A, B)
        assert evaluate(P) == (0, 0), (inst, P)
        P = add(P, G, A)

    hrow = [0, 0, 0]
    hrow[a - 1] = 1
    hrow[b - 1] = s
    crow = [0, 0, 0]
    crow[cc - 1] = 1
    p = {a: "O", b: f"{fmt(e)},0", cc: f"{fmt(xq)},{fmt(yq)}"}
    curve = f"A = {A}\nB = {B}\nN = 3\n"
    variety = (
        "N = 3\n"
        f"f1 = {f1}\n"
        f"f2 = {f2}\n"
        "h_V = 0\n"
        f"planted.H = {','.join(map(str, hrow))}\n"
        f"planted.p = {'; '.join(p[i] for i in (1, 2, 3))}\n"
        f"planted.B = {','.join(map(str, hrow))}; {','.join(map(str, crow))}\n"
    )
    return curve, variety


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data", "planted")
    os.makedirs(out, exist_ok=True)
    for i, inst in enumerate(INSTANCES, 1):
        curve, variety = build(inst)
        header = f"# planted instance {i}: curve {inst[0]}, root {inst[1]}, permutation {inst[3]}, sign {inst[4]}\n"
        with open(os.path.join(out, f"{i:02d}.curve"), "w") as fh:
            fh.write(header + curve)
        with open(os.path.join(out, f"{i:02d}.variety"), "w") as fh:
            fh.write(header + variety)


if __name__ == "__main__":
    main()
