"""Reference values frozen into the unit tests, computed from first
definitions with mpmath (quadrature and root finding, no shared code).

Run: python3 tests/oracles/oracles.py
"""
from mpmath import mp, mpf, quad, exp, sin, findroot, diff, sqrt, log

mp.dps = 60

EPS, ETA = mpf(1) / 8, mpf(1) / 16


def rho_raw(t):
    return exp(-1 / (1 - t * t)) if abs(t) < 1 else mpf(0)


NORM = 1 / quad(rho_raw, [-1, 0, 1])


def rho(t):
    return NORM * rho_raw(t)


def clamp_ramp(y):
    return min(max((y - EPS) / (1 - 2 * EPS), mpf(0)), mpf(1))


def g(x):
    # mollified clamp: integral of rho_eta(x - y) * clamp(y) dy
    x = mpf(x)
    f = lambda t: rho(t) * clamp_ramp(x - ETA * t)
    pts = [-1, 1]
    for knot in (EPS, 1 - EPS):
        t0 = (x - knot) / ETA
        if -1 < t0 < 1:
            pts.insert(-1, t0)
    return quad(f, sorted(pts))


def left(t, s, d):
    return t + (s - 2 * d) * g(t / d)


def staircase(t, s, d):
    t = mpf(t)
    if t <= d:
        return left(t, s, d)
    y = s - t
    G = findroot(lambda u: left(u, s, d) - y, (mpf(0), d), solver="anderson")
    return s - G


def show(name, v):
    print(f"{name} = {mp.nstr(v, 50)}")


show("C", NORM)
for x in ["0.1", "0.15", "0.5", "0.88", "0.9"]:
    show(f"g({x})", g(mpf(x)))
show("g'(0.1)", diff(g, mpf("0.1")))
s, d = mpf(1) / 4, mpf(1) / 32
for t in ["0.003125", "0.0296875", "0.1", "0.2", "0.24"]:
    show(f"A_(1/4,1/32)({t})", staircase(mpf(t), s, d))
show("A'(0.2)", diff(lambda t: staircase(t, s, d), mpf("0.2")))
# sin(exp(x)) derivatives at 0
for k in range(7):
    show(f"d{k} sin(exp x) at 0", diff(lambda x: sin(exp(x)), 0, k))
show("|sqrt2 - 3/2|", abs(sqrt(2) - mpf(3) / 2))
