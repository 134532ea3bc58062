"""Brute-force reference computations, written without the package's kernels.

Loops over raw ratings and plain Python arithmetic only; slow but obviously
correct at fixture sizes.
"""

import itertools
import math
from fractions import Fraction

TABLE1 = [
    (1, 1, 1, 2, 1, 2),
    (1, 1, 1, 1, 2, 1),
    (2, 3, 2, 2, 3, 2),
    (1, 1, 1, 2, 1, 1),
    (1, 1, 1, 1, 2, 1),
    (1, 1, 1, 1, 1, 2),
    (2, 4, 3, 3, 3, 4),
    (1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1),
    (2, 3, 2, 3, 2, 3),
    (1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1),
    (1, 2, 1, 1, 2, 1),
    (1, 1, 1, 1, 1, 1),
    (2, 1, 2, 2, 1, 2),
    (1, 1, 1, 1, 1, 1),
    (5, 5, 5, 4, 5, 5),
    (2, 4, 3, 3, 3, 4),
]
PAIRS_IN_AGREEMENT = [3, 6, 5, 6, 6, 6, 3, 9, 9, 9, 4, 9, 9, 9, 5, 9, 5, 9, 6, 3]


def tally(x, y, k):
    t = [[0] * k for _ in range(k)]
    for a, b in zip(x, y):
        t[a - 1][b - 1] += 1
    return t


def naive_weighted_kappa(x, y, k, linear=True):
    n = len(x)

    def w(r, c):
        if linear:
            return 1 - abs(r - c) / (k - 1)
        return 1.0 if r == c else 0.0

    po = sum(w(a, b) for a, b in zip(x, y)) / n
    px = [sum(1 for a in x if a == c) / n for c in range(1, k + 1)]
    py = [sum(1 for b in y if b == c) / n for c in range(1, k + 1)]
    pe = sum(w(r, c) * px[r - 1] * py[c - 1] for r in range(1, k + 1) for c in range(1, k + 1))
    return (po - pe) / (1 - pe)


def pair_enumeration_fleiss(rows, k):
    """Fleiss' kappa as mean pairwise agreement over unordered rater pairs."""
    m = len(rows[0])
    agree = []
    for row in rows:
        pairs = list(itertools.combinations(row, 2))
        agree.append(sum(1 for a, b in pairs if a == b) / len(pairs))
    p_bar = sum(agree) / len(rows)
    total = len(rows) * m
    p = [sum(row.count(c) for row in rows) / total for c in range(1, k + 1)]
    pe = sum(q * q for q in p)
    return (p_bar - pe) / (1 - pe)


def coincidence_tally(rows, k):
    m = len(rows[0])
    o = [[Fraction(0)] * k for _ in range(k)]
    for row in rows:
        for i, j in itertools.permutations(range(m), 2):
            o[row[i] - 1][row[j] - 1] += Fraction(1, m - 1)
    return o


def brute_alpha(rows, k, metric):
    o = coincidence_tally(rows, k)
    nc = [sum(r) for r in o]
    total = sum(nc)

    def delta(c, d):
        if metric == "nominal":
            return 0 if c == d else 1
        if metric == "interval":
            return (c - d) ** 2
        lo, hi = min(c, d), max(c, d)
        return (sum(nc[lo : hi + 1]) - (nc[c] + nc[d]) / 2) ** 2

    do = sum(o[c][d] * delta(c, d) for c in range(k) for d in range(k)) / total
    de = sum(nc[c] * nc[d] * delta(c, d) for c in range(k) for d in range(k)) / (total * (total - 1))
    return float(1 - Fraction(do) / Fraction(de))


def brute_diff_vectors(a_rows, b_rows):
    """List of X_jk ordered by subject k then group-B rater j."""
    out = []
    for a, b in zip(a_rows, b_rows):
        for bj in b:
            out.append([ai - bj for ai in a])
    return out


def two_pass_covariance(vectors):
    n = len(vectors)
    d = len(vectors[0])
    mean = [sum(v[p] for v in vectors) / n for p in range(d)]
    return [
        [sum((v[p] - mean[p]) * (v[q] - mean[q]) for v in vectors) / (n - 1) for q in range(d)]
        for p in range(d)
    ]


def eig3_symmetric(s):
    """Eigenvalues of a symmetric 3x3 matrix from its characteristic cubic, descending."""
    p1 = s[0][1] ** 2 + s[0][2] ** 2 + s[1][2] ** 2
    q = (s[0][0] + s[1][1] + s[2][2]) / 3
    if p1 == 0:
        return sorted([s[0][0], s[1][1], s[2][2]], reverse=True)
    p2 = (s[0][0] - q) ** 2 + (s[1][1] - q) ** 2 + (s[2][2] - q) ** 2 + 2 * p1
    p = math.sqrt(p2 / 6)
    b = [[(s[i][j] - (q if i == j else 0)) / p for j in range(3)] for i in range(3)]
    det_b = (
        b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])
    )
    r = max(-1.0, min(1.0, det_b / 2))
    phi = math.acos(r) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    return [e1, 3 * q - e1 - e3, e3]


def triple_loop_proportion(a_rows, b_rows):
    agree = total = 0
    for a, b in zip(a_rows, b_rows):
        for ai in a:
            for bj in b:
                total += 1
                agree += ai == bj
    return Fraction(agree, total)


def jacobi_eigenvalues(s, sweeps=50):
    """Cyclic Jacobi rotations on a symmetric matrix; eigenvalues descending."""
    a = [list(map(float, row)) for row in s]
    d = len(a)
    for _ in range(sweeps):
        off = sum(a[p][q] ** 2 for p in range(d) for q in range(d) if p != q)
        if off < 1e-30:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                if a[p][q] == 0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2 * a[p][q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                sn = t * c
                for r in range(d):
                    arp, arq = a[r][p], a[r][q]
                    a[r][p], a[r][q] = c * arp - sn * arq, sn * arp + c * arq
                for r in range(d):
                    apr, aqr = a[p][r], a[q][r]
                    a[p][r], a[q][r] = c * apr - sn * aqr, sn * apr + c * aqr
    return sorted((a[i][i] for i in range(d)), reverse=True)
