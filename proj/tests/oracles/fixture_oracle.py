"""High-precision oracle for the 2-state / 2-action Case 1 fixture.

Iterates the w-space operator 10,000 times from zero at 60 digits and
checks the v-space Bellman defect directly on the raw aggregator.
The printed values are frozen into tests/test_solver.cpp.
"""
from mpmath import mp, mpf

mp.dps = 60

u = [[mpf(1), mpf(2)], [mpf(3), mpf(4)]]
q = {
    (0, 0): [mpf("0.7"), mpf("0.3")],
    (1, 0): [mpf("0.4"), mpf("0.6")],
    (0, 1): [mpf("0.2"), mpf("0.8")],
    (1, 1): [mpf("0.5"), mpf("0.5")],
}
beta, rho, gamma = mpf("0.9"), mpf("0.5"), mpf("0.75")
theta = (1 - gamma) / (1 - rho)
r = [[(1 - beta) * u[s][a] ** (1 - rho) for a in range(2)] for s in range(2)]


def h1(s, a, w):
    inner = sum(q[s, a][t] * w[t] for t in range(2))
    return (r[s][a] + beta * inner ** (1 / theta)) ** theta


w = [mpf(0), mpf(0)]
for _ in range(10000):
    w = [max(h1(s, a, w) for a in range(2)) for s in range(2)]

v = [x ** (1 / (1 - gamma)) for x in w]


def raw_h(s, a, v):
    inner = sum(q[s, a][t] * v[t] ** (1 - gamma) for t in range(2))
    return (r[s][a] + beta * inner ** ((1 - rho) / (1 - gamma))) ** (1 / (1 - rho))


residual = max(abs(v[s] - max(raw_h(s, a, v) for a in range(2))) for s in range(2))
policy = [max(range(2), key=lambda a: (h1(s, a, w), -a)) for s in range(2)]
gaps = [abs(h1(s, 0, w) - h1(s, 1, w)) for s in range(2)]

print("w* =", [mp.nstr(x, 20) for x in w])
print("v* =", [mp.nstr(x, 20) for x in v])
print("policy =", policy, "action gaps =", [mp.nstr(g, 5) for g in gaps])
print("residual =", mp.nstr(residual, 5))
