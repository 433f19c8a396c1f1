"""Closed-form oracle for F(x) = x^{-a}: H(u) = E[R^{-a}] ((1-u)^{-a/2} - 1) on [0, 1)."""
from mpmath import mp, mpf, quad, sqrt, pi, gamma, log, fabs

mp.dps = 40

for a in (mpf("0.5"), mpf(1), mpf("1.5")):
    e = sqrt(2 / pi) * 2 ** ((1 - a) / 2) * gamma((3 - a) / 2)
    h = lambda u: e * ((1 - u) ** (-a / 2) - 1)
    w = lambda u: u ** mpf(-1.5)
    pts = [0, mpf(1) / 2, 1]
    i_h = quad(lambda u: h(u) * w(u), pts)
    i_abs = quad(lambda u: fabs(h(u)) * w(u), pts)
    i_hlog = quad(lambda u: h(u) * log(fabs(h(u))) * w(u) if h(u) != 0 else 0, pts)
    c1 = i_h / sqrt(2 * pi)
    c2 = sqrt(pi / 2) / 2 * i_abs
    c3 = i_hlog / sqrt(2 * pi)
    logt = sqrt(2 / pi) * (i_h / 2 - e)
    print(f"a={a}: E={mp.nstr(e, 20)} lhs={mp.nstr(i_h, 20)} c1={mp.nstr(c1, 20)} c2={mp.nstr(c2, 20)} "
          f"c3={mp.nstr(c3, 20)} logt={mp.nstr(logt, 20)}")
