# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration of deterministic one-way strategies for the guessing game.

Scores are integer success counts over the 8 equiprobable (a, b, b') inputs.
Table layouts and enumeration order match ``_kernels_py`` exactly so both
backends return the same witness.
"""


def best_a_first(int d):
    """Alice signals: message enc[a], Alice guesses xg[a], Bob guesses ytab[m, b, b']."""
    cdef long long n_y = 1LL << (4 * d)
    cdef int e0, e1, xg, a, b, bp, score, best = -1
    cdef int xscore
    cdef long long y
    cdef int best_e0 = 0, best_e1 = 0, best_xg = 0
    cdef long long best_y = 0
    cdef int m
    for e0 in range(d):
        for e1 in range(d):
            for xg in range(4):
                xscore = 0
                for a in range(2):
                    for b in range(2):
                        if ((xg >> a) & 1) == b:
                            xscore += 1
                for y in range(n_y):
                    score = xscore
                    for a in range(2):
                        m = e0 if a == 0 else e1
                        for b in range(2):
                            if ((y >> (m * 4 + b * 2 + 1)) & 1) == a:
                                score += 1
                    if score > best:
                        best = score
                        best_e0, best_e1, best_xg, best_y = e0, e1, xg, y
    return best, (best_e0, best_e1), best_xg, best_y


def best_b_first(int d):
    """Bob signals: message enc[b, b'], Alice guesses xtab[m, a], Bob guesses yg[b, b']."""
    cdef long long n_enc = 1
    cdef int k
    for k in range(4):
        n_enc *= d
    cdef long long n_x = 1LL << (2 * d)
    cdef long long enc, best_enc = 0, xt, best_xt = 0
    cdef int yg, best_yg = 0, a, b, score, yscore, best = -1
    cdef int m0, m1, m
    for enc in range(n_enc):
        # enc digit for (b, b') at position b*2 + b', base d, least significant first
        m0 = <int>(enc % d)                       # (b=0, b'=0)
        m1 = <int>((enc // (d * d)) % d)          # (b=1, b'=0)
        for yg in range(16):
            yscore = 0
            for a in range(2):
                for b in range(2):
                    if ((yg >> (b * 2 + 1)) & 1) == a:
                        yscore += 1
            for xt in range(n_x):
                score = yscore
                for b in range(2):
                    m = m0 if b == 0 else m1
                    for a in range(2):
                        if ((xt >> (m * 2 + a)) & 1) == b:
                            score += 1
                if score > best:
                    best = score
                    best_enc, best_yg, best_xt = enc, yg, xt
    return best, best_enc, best_yg, best_xt
