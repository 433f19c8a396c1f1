"""Constants for F in {x, x^2, e^{-x}, e^{x/2}} from closed-form profiles.

For R the 3d Bessel process at time 1 from 0:
  E[R] = 2 sqrt(2/pi), E[R^2] = 3,
  E[e^{sR}] = s sqrt(2/pi) + (1 + s^2) e^{s^2/2} (1 + erf(s/sqrt 2)).
With these H(u) = E[F(sqrt(1-u) R)] - E[F(R)] is explicit, so only the
outer u-integrals need quadrature. mpmath at 40 digits.
"""
from mpmath import mp, mpf, quad, sqrt, pi, exp, log, erf, fabs

mp.dps = 40


def mgf(s):
    return s * sqrt(2 / pi) + (1 + s**2) * exp(s**2 / 2) * (1 + erf(s / sqrt(2)))


profiles = {
    "x": (lambda u: 2 * sqrt(2 / pi) * (sqrt(1 - u) - 1), 2 * sqrt(2 / pi)),
    "x2": (lambda u: -3 * u, mpf(3)),
    "exp_neg": (lambda u: mgf(-sqrt(1 - u)) - mgf(-1), mgf(-1)),
    "exp_half": (lambda u: mgf(sqrt(1 - u) / 2) - mgf(mpf(1) / 2), mgf(mpf(1) / 2)),
}


def head(g):
    return quad(lambda u: g(u) * u ** mpf(-1.5), [0, mpf(1) / 4, mpf(1) / 2, mpf(3) / 4, 1])


def xlogx(h):
    return h * log(fabs(h)) if h != 0 else mpf(0)


for key, (H, mean) in profiles.items():
    h = head(H)
    c1 = h / sqrt(2 * pi)
    c2 = sqrt(pi / 2) / 2 * head(lambda u: fabs(H(u)))
    c3 = head(lambda u: xlogx(H(u))) / sqrt(2 * pi)
    logt = sqrt(2 / pi) * (h / 2 - mean)
    print(f"{key}: E={mp.nstr(mean, 20)} c1={mp.nstr(c1, 20)} c2={mp.nstr(c2, 20)} "
          f"c3={mp.nstr(c3, 20)} logt={mp.nstr(logt, 20)}")
