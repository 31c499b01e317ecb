"""Invariant Aeppli and Bott-Chern dimensions of the Iwasawa manifold.

Standalone exterior algebra on generators a1 a2 a3 (type (1,0)) and b1 b2 b3
(their conjugates) with d a3 = -a1 a2, d b3 = -b1 b2; ranks by sympy.
Prints `p q aeppli bottchern` for 0 <= p, q <= 3.
"""
from itertools import combinations

import sympy

GENS = ["a1", "a2", "a3", "b1", "b2", "b3"]
DEL = {"a3": {("a1", "a2"): -1}}
DELBAR = {"b3": {("b1", "b2"): -1}}


def canon(word):
    word = list(word)
    sign = 1
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if GENS.index(word[j]) > GENS.index(word[j + 1]):
                word[j], word[j + 1] = word[j + 1], word[j]
                sign = -sign
    if len(set(word)) < len(word):
        return None, 0
    return tuple(word), sign


def apply(op, form):
    out = {}
    for word, c in form.items():
        for pos, g in enumerate(word):
            for img, k in op.get(g, {}).items():
                new, s = canon(word[:pos] + img + word[pos + 1:])
                if new is None:
                    continue
                coeff = c * k * s * (-1) ** pos
                out[new] = out.get(new, 0) + coeff
    return {w: c for w, c in out.items() if c != 0}


def basis(p, q):
    if p < 0 or q < 0:
        return []
    return [a + b for a in combinations(GENS[:3], p) for b in combinations(GENS[3:], q)]


def matrix(ops, p, q, dp, dq):
    src, dst = basis(p, q), basis(p + dp, q + dq)
    m = sympy.zeros(len(dst), len(src))
    for j, w in enumerate(src):
        img = {w: 1}
        for op in ops:
            img = apply(op, img)
        for word, c in img.items():
            m[dst.index(word), j] += c
    return m


def rank(m):
    return m.rank() if m.shape[0] and m.shape[1] else 0


def main():
    for p in range(4):
        for q in range(4):
            n = len(basis(p, q))
            ddbar = matrix([DELBAR, DEL], p, q, 1, 1)
            im_del = matrix([DEL], p - 1, q, 1, 0) if p > 0 else sympy.zeros(n, 0)
            im_dbar = matrix([DELBAR], p, q - 1, 0, 1) if q > 0 else sympy.zeros(n, 0)
            aeppli = n - rank(ddbar) - rank(im_del.row_join(im_dbar))
            closed = n - rank(matrix([DEL], p, q, 1, 0).col_join(matrix([DELBAR], p, q, 0, 1)))
            below = matrix([DELBAR, DEL], p - 1, q - 1, 1, 1) if p > 0 and q > 0 else sympy.zeros(n, 0)
            print(p, q, aeppli, closed - rank(below))


main()
