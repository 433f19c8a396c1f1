"""Independent high-precision oracle for the frozen constants used in tests.

Run with `python3 oracle_values.py`; values are pasted into tests/*.cpp.
Uses mpmath only (no code shared with the C++ implementation).
"""
from mpmath import mp, mpf, quad, sqrt, pi, exp, log, gamma, erf, erfc, inf, ncdf

mp.dps = 15

def p0(z):
    return sqrt(2 / pi) * z**2 * exp(-z**2 / 2)

def ER(F):
    return quad(lambda z: F(z) * p0(z), [0, 1, 4, inf])

def H(F, u):
    if u >= 1:
        return -ER(F)
    return quad(lambda z: (F(sqrt(1 - u) * z) - F(z)) * p0(z), [0, 1, 4, inf])

def head(g):
    # integral over (0,1) of g(u) u^{-3/2}, split to tame both endpoints
    return quad(lambda u: g(u) * u**mpf(-1.5), [0, mpf(1) / 4, mpf(3) / 4, 1])

cat = {
    "x": (lambda z: z, lambda z: 1),
    "x2": (lambda z: z**2, lambda z: 2 * z),
    "exp_neg": (lambda z: exp(-z), lambda z: -exp(-z)),
    "exp_half": (lambda z: exp(z / 2), lambda z: exp(z / 2) / 2),
    "inv_x": (lambda z: 1 / z, lambda z: -1 / z**2),
    "pow_neg_0.5": (lambda z: z**mpf(-0.5), lambda z: mpf(-0.5) * z**mpf(-1.5)),
    "pow_neg_1.5": (lambda z: z**mpf(-1.5), lambda z: mpf(-1.5) * z**mpf(-2.5)),
}

for name, (F, dF) in cat.items():
    e = ER(F)
    c1_int = head(lambda u: H(F, u))
    c1 = c1_int / sqrt(2 * pi)
    c2 = mpf(0.5) * sqrt(pi / 2) * head(lambda u: abs(H(F, u)))
    def hl(u):
        h = H(F, u)
        return 0 if h == 0 else h * log(abs(h))
    c3 = head(hl) / sqrt(2 * pi)
    rhs = 2 * e - sqrt(2 * pi) * ER(lambda z: dF(z) + F(z) / z)
    logt = sqrt(2 / pi) * (mpf(0.5) * c1_int - e)
    print(f"{name}: E={e} c1={c1} c2={c2} c3(mu=0)={c3} lhs={c1_int} rhs={rhs} logt={logt}")

# G-expansion residuals, E - E[F] - eps*G
def Ey_time(F, y, s):
    if y == 0:
        return quad(lambda z: F(z) * sqrt(2 / pi) * z**2 * s**mpf(-1.5) * exp(-z**2 / (2 * s)), [0, 1, 4, inf])
    dens = lambda z: (z / y) * (exp(-(z - y)**2 / (2 * s)) - exp(-(z + y)**2 / (2 * s))) / sqrt(2 * pi * s)
    return quad(lambda z: F(z) * dens(z), [0, 1, 4, inf])

for name in ("x", "x2"):
    F = cat[name][0]
    e = ER(F)
    e2 = ER(lambda z: z**2 * F(z))
    for x in (0, 1):
        G = e * (mpf(1.5) - mpf(x)**2 / 2) + e2 * (mpf(x)**2 / 6 - mpf(0.5))
        res = []
        for eps in (mpf("0.01"), mpf("0.005")):
            r = Ey_time(F, x * sqrt(eps), 1 - eps) - e - eps * G
            res.append(abs(r))
        print(f"G[{name}] x={x}: G={G} res={res[0]} res_half={res[1]} ratio={res[0]/res[1]}")

print("E[R^4]", ER(lambda z: z**4))
print("q_1(1,1)", (1 - exp(-2)) / sqrt(2 * pi))
print("bessel density x=0 z=1", sqrt(2 / pi) * exp(mpf(-0.5)))
print("stopping line x=1 s=4 tail", exp(-1) * erf(1 / sqrt(8)))
print("stopping line x=1 [1,2]", exp(-1) * (erfc(1 / sqrt(4)) - erfc(1 / sqrt(2))))

# many-to-two at t=2, x=1, phi = 1_[0.5,2.5]; K = 1 for binary branching
a, b, t, x0 = mpf("0.5"), mpf("2.5"), mpf(2), mpf(1)
def q(r, x, y):
    return (exp(-(x - y)**2 / (2 * r)) - exp(-(x + y)**2 / (2 * r))) / sqrt(2 * pi * r)
def kill_mass(s, y):
    # integral of q_s(y, z) over z in [a, b]
    sd = sqrt(s)
    return (ncdf((b - y) / sd) - ncdf((a - y) / sd)) - (ncdf((b + y) / sd) - ncdf((a + y) / sd))
def m(s, y):
    return exp(-y) * kill_mass(s, y)
first = exp(-x0) * kill_mass(t, x0)
diag = exp(-x0) * quad(lambda y: exp(-y) * q(t, x0, y), [a, b])
branch = exp(-x0) * quad(lambda r: quad(lambda y: m(t - r, y)**2 * exp(y) * q(r, x0, y), [0, 1, 3, 6, inf]), [0, 1, t])
print("many-to-two first moment", first, "second moment", branch + diag)
