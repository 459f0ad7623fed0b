"""Closed-form checks of the two worked Du-vs-Banach examples.

Minimizes the closed-form B(p)(1 - eps(p)) expressions at high precision.
"""
from mpmath import mp, mpf, sqrt, findroot, diff

mp.dps = 40


def eps1(y):
    return 1 - sqrt((1 + mpf("0.9") * y) / (1 + y))


def b1(y):
    return sqrt(10 + 10 * y) + 2 * (sqrt(10) - 3) * sqrt(1 + y) / eps1(y) ** 2


def prod1(y):
    return b1(y) * (1 - eps1(y))


y0 = findroot(lambda y: diff(prod1, y), mpf(4))
print("ex1 y0 =", mp.nstr(y0, 12), "product =", mp.nstr(prod1(y0), 12),
      "rate =", mp.nstr(1 - eps1(y0), 12), "L =", mp.nstr(1 / (1 - sqrt(mpf("0.9"))), 12))


def eps2(x):
    return (1 + 18 * x - 19 * x**2) / (100 * (25 - x**2))


def b2(x):
    return 100 * (25 - x**2) + 2 * 100**2 * (25 - x**2) ** 2 * (9 + 54 * x - 19 * x**2) / (1 + 18 * x - 19 * x**2) ** 2


def prod2(x):
    return b2(x) * (1 - eps2(x))


x0 = findroot(lambda x: diff(prod2, x), mpf("0.38"))
x1 = (79 - 8 * sqrt(94)) / 3
print("ex2 x0 =", mp.nstr(x0, 12), "product =", mp.nstr(prod2(x0), 12),
      "rate =", mp.nstr(1 - eps2(x0), 12))
print("ex2 x1 =", mp.nstr(x1, 12), "B(x1) =", mp.nstr(b2(x1), 12),
      "deps(x1) =", mp.nstr(diff(eps2, x1), 5))
