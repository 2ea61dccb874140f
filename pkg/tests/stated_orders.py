"""Cusp orders and spaces asserted for the construction quotients, written
out independently of the library (closed forms in m)."""
from fractions import Fraction as F

B4_PRIMES = (3, 5, 7, 11, 13)
B6_PRIMES = (7, 11, 13)


def b4_expected(m):
    mp = m % 8
    return {
        "reduced": ({4: F((8 - mp) * m + 1, 8), 1: F(m * mp - 1, 8), 2: F(m, 2)}, 3 * m),
        "cusp_factor": ({1: F(1), 2: F(1, 2), 4: F(1)}, 5),
        "level_256": ({**{d: F(8 - mp) for d in (1, 2, 4, 8)},
                       **{d: F(mp) for d in (32, 64, 128, 256)}, 16: F(0)}, 2),
    }


def b6_expected(m):
    mp = m % 24
    f = 5 * m % 24
    rows = {
        (1, 2, 3, 4, 6, 8, 12, 24): 24 - f,
        (9, 18, 27, 36, 54, 72, 108, 216): mp,
        (16, 32, 48, 64, 96, 128, 192, 384): 24 - mp,
        (144, 288, 432, 576, 864, 1152, 1728, 3456): f,
    }
    return {
        "reduced": ({1: F(m * f - 5, 24), 2: F(m * mp - 1, 24), 3: F(m * (24 - mp) + 1, 24),
                     6: F(m * (24 - f) + 5, 24)}, 2 * m),
        "cusp_factor": ({d: F(1) for d in (1, 2, 3, 6)}, 4),
        "level_3456": ({t: F(v) for ts, v in rows.items() for t in ts}, 2),
    }


# only weights and cuspidality are stated for the m = 5 quotients
B6_M5_SPACES = {"reduced": 50, "cusp_factor": 4, "level_3456": 2}


def expected_orders(reg_k, m):
    return b4_expected(m) if reg_k == 4 else b6_expected(m)
