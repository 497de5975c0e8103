"""Independent reference computations used by the tests."""

import itertools


def kappa_direct(v):
    """Pairwise double sum over descending order statistics."""
    s = sorted(v, reverse=True)
    return sum(s[i] - s[j] for i in range(len(s) - 1) for j in range(i + 1, len(s)))


def feasible_by_constraints(x, y, cs, cr):
    """All controls whose withdrawal/insertion indicators satisfy the slot constraints."""
    L, K = len(x) - 1, len(y) - 1
    out = set()
    for u1, u2, u3 in itertools.product(range(L + 1), range(K + 1), range(K + 1)):
        if (u1 == 0) != (u2 == 0):
            continue
        ws = [int(i == u1) for i in range(L + 1)]
        wr = [int(j == u3) for j in range(K + 1)]
        vr = [int(j == u2 and j > 0) for j in range(K + 1)]
        ok = all(ws[i] <= int(x[i] > 0) * cs[i] for i in range(1, L + 1))
        ok &= all(wr[j] <= int(y[j] + vr[j] > 0) * cr[j] for j in range(1, K + 1))
        ok &= sum(ws) == 1 and sum(wr) == 1
        if ok:
            out.add((u1, u2, u3))
    return out


def weakly_submajorized(a, b):
    """Partial sums of the descending rearrangement of ``a`` never exceed those of ``b``."""
    sa, sb = sorted(a, reverse=True), sorted(b, reverse=True)
    pa = pb = 0
    for u, v in zip(sa, sb):
        pa += u
        pb += v
        if pa > pb:
            return False
    return True
