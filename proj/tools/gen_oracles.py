"""Writes tests/oracles/oracles.json: reference values computed with mpmath at 80 digits.

Run from the repository root: python3 tools/gen_oracles.py
"""
import json
from fractions import Fraction

from mpmath import mp, mpf, sqrt, exp, pi, nsum, inf, qp, agm, ellipk, log

mp.dps = 80


def phi(q):
    return 1 + 2 * nsum(lambda n: q ** (n * n), [1, inf])


def psi(q):
    return nsum(lambda n: q ** (n * (n + 1) / 2), [0, inf])


def fneg(q):
    return nsum(lambda n: (-1) ** n * q ** (n * (3 * n - 1) / 2), [-inf, inf])


def nome(k, n, two_pi=False):
    c = 2 if two_pi else 1
    return exp(-c * pi * sqrt(mpf(n) / k))


def family(name, k, n):
    k = mpf(k.numerator) / k.denominator
    n = mpf(n.numerator) / n.denominator
    k4 = k ** mpf(0.25)
    if name == "r":
        q = nome(k, n, True)
        return fneg(q) / (k4 * q ** ((k - 1) / 24) * fneg(q ** k))
    if name == "r_prime":
        q = nome(k, n)
        return fneg(-q) / (k4 * q ** ((k - 1) / 24) * fneg(-(q ** k)))
    if name == "h":
        q = nome(k, n)
        return phi(q) / (k4 * phi(q ** k))
    if name == "h_prime":
        q = nome(k, n, True)
        return phi(-q) / (k4 * phi(-(q ** k)))
    if name == "l":
        q = nome(k, n)
        return psi(-q) / (k4 * q ** ((k - 1) / 8) * psi(-(q ** k)))
    if name == "l_prime":
        q = nome(k, n)
        return psi(q) / (k4 * q ** ((k - 1) / 8) * psi(q ** k))
    if name in ("A", "A_prime"):
        q = nome(k, n)
        top = phi(-q) if name == "A" else phi(q)
        return top / (2 * k4 * q ** (k / 4) * psi(q ** (2 * k)))
    if name == "h16":
        q = nome(k, n)
        return q * psi(q ** 8) / phi(-q)
    raise ValueError(name)


def s(x):
    return mp.nstr(x, 75, strip_zeros=False, min_fixed=-30, max_fixed=30)


out = {"theta": [], "params": [], "constants": {}}
for q in ["0.05", "0.1", "0.3", "0.5", "-0.3", "0.9"]:
    x = mpf(q)
    out["theta"].append({"q": q, "phi": s(phi(x)), "psi": s(psi(x)), "fneg": s(fneg(x)),
                         "qpoch_q_q": s(qp(x, x))})

cases = [
    ("r", "2", "2"), ("r", "2", "5"), ("r", "3", "1/2"), ("r_prime", "2", "3"),
    ("h", "2", "1"), ("h", "3", "2"), ("h_prime", "2", "1/8"), ("h_prime", "2", "3"),
    ("l", "2", "1"), ("l_prime", "3", "2"),
    ("A", "4", "1"), ("A", "4", "2"), ("A", "4", "7"), ("A", "1/2", "3"), ("A", "2", "5/3"),
    ("A_prime", "4", "1"), ("A_prime", "1", "2"), ("h16", "8", "1"), ("h16", "4", "3"),
]
for fam, k, n in cases:
    out["params"].append({"family": fam, "k": k, "n": n,
                          "value": s(family(fam, Fraction(k), Fraction(n)))})

c = out["constants"]
c["agm_1_sqrt2"] = s(agm(1, sqrt(2)))
c["K_inv_sqrt2"] = s(ellipk(mpf(1) / 2))
c["K_0_6"] = s(ellipk(mpf("0.36")))
c["qpoch_half_half"] = s(qp(mpf("0.5"), mpf("0.5")))
c["alpha_e_minus_pi"] = s(1 - (phi(-exp(-pi)) / phi(exp(-pi))) ** 4)
c["log_2"] = s(log(2))

with open("tests/oracles/oracles.json", "w") as fh:
    json.dump(out, fh, indent=1)
    fh.write("\n")
