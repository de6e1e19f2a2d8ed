"""Numpy fallback for the strategy enumeration kernels; same layouts as ``_kernels.pyx``."""

import numpy as np


def best_a_first(d):
    ytab = np.arange(1 << (4 * d), dtype=np.int64)
    best, witness = -1, None
    for e0 in range(d):
        for e1 in range(d):
            enc = (e0, e1)
            bob = np.zeros(ytab.shape, dtype=np.int64)
            for a in range(2):
                for b in range(2):
                    bob += ((ytab >> (enc[a] * 4 + b * 2 + 1)) & 1) == a
            top = int(np.argmax(bob))
            for xg in range(4):
                xscore = sum(((xg >> a) & 1) == b for a in range(2) for b in range(2))
                score = xscore + int(bob[top])
                if score > best:
                    best, witness = score, ((e0, e1), xg, top)
    return (best,) + witness


def best_b_first(d):
    xtab = np.arange(1 << (2 * d), dtype=np.int64)
    best, witness = -1, None
    yscores = [sum(((yg >> (b * 2 + 1)) & 1) == a for a in range(2) for b in range(2)) for yg in range(16)]
    for enc in range(d**4):
        m = (enc % d, (enc // (d * d)) % d)
        alice = np.zeros(xtab.shape, dtype=np.int64)
        for b in range(2):
            for a in range(2):
                alice += ((xtab >> (m[b] * 2 + a)) & 1) == b
        top = int(np.argmax(alice))
        for yg in range(16):
            score = yscores[yg] + int(alice[top])
            if score > best:
                best, witness = score, (enc, yg, top)
    return (best,) + witness
