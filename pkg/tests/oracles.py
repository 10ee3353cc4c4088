"""Brute-force reference implementations used as ground truth in tests.

Plain Python loops over lists, written independently of the vectorised
code in the package. Slow on purpose.
"""

import math


def dist(a, b):
    return math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(a, b)))


def nearest(rows, z, k, skip=None):
    """Indices of the k nearest rows to z, ties to the lower index."""
    cand = [(dist(r, z), i) for i, r in enumerate(rows) if i != skip]
    cand.sort()
    return [i for _, i in cand[:k]]


def score(rows, z, J, K):
    """(dbar_j, dbar_k, ratio) for one query."""
    nn = nearest(rows, z, J)
    dj = sum(dist(rows[i], z) for i in nn) / J
    total = 0.0
    for i in nn:
        for m in nearest(rows, rows[i], K, skip=i):
            total += dist(rows[i], rows[m])
    dk = total / (J * K)
    if dk == 0:
        ratio = 0.0 if dj == 0 else math.inf
    else:
        ratio = dj / dk
    return dj, dk, ratio


def accepts(rows, z, J, K, theta):
    return score(rows, z, J, K)[2] < theta


def quantile(values, q):
    v = sorted(float(x) for x in values)
    pos = q * (len(v) - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (pos - lo) * (v[hi] - v[lo])


def gmean(pred, labels):
    pos = [p for p, t in zip(pred, labels) if t]
    neg = [p for p, t in zip(pred, labels) if not t]
    tpr = sum(1 for p in pos if p) / len(pos)
    tnr = sum(1 for p in neg if not p) / len(neg)
    return math.sqrt(tpr * tnr)


def folds(retained, rejected, r_fold, n_fold, G, include_noise=False):
    """(train, val, val_labels) per inner fold from explicit fold ids."""
    out = []
    for g in range(G):
        tr = [int(i) for i, f in zip(retained, r_fold) if f != g]
        if include_noise:
            tr += [int(i) for i, f in zip(rejected, n_fold) if f != g]
        vp = [int(i) for i, f in zip(retained, r_fold) if f == g]
        vn = [int(i) for i, f in zip(rejected, n_fold) if f == g]
        out.append((tr, vp + vn, [True] * len(vp) + [False] * len(vn)))
    return out


def exhaustive_jk(X, fold_list, J_max, K_max):
    """Best (J, K, avg gmean); a cell replaces the incumbent only when
    strictly better, scanning J then K ascending."""
    best = None
    for J in range(1, J_max + 1):
        for K in range(1, K_max + 1):
            total = 0.0
            for tr, val, lab in fold_list:
                rows = [X[i] for i in tr]
                pred = [accepts(rows, X[v], J, K, 1.0) for v in val]
                total += gmean(pred, lab)
            avg = total / len(fold_list)
            if best is None or avg > best[2]:
                best = (J, K, avg)
    return best


def exhaustive_theta(X, fold_list):
    """Best (tau, gmean) over every pooled 11NN ratio, ties to larger tau."""
    ratios, labels = [], []
    for tr, val, lab in fold_list:
        rows = [X[i] for i in tr]
        ratios += [score(rows, X[v], 1, 1)[2] for v in val]
        labels += lab
    best = None
    for tau in sorted(set(ratios)):
        g = gmean([r < tau for r in ratios], labels)
        if best is None or g >= best[1]:
            best = (tau, g)
    return best
