"""High-precision reference values for the special-function tests.

Every value is produced by summing the defining power series in mpmath
with enough working digits to absorb the cancellation of the alternating
terms. Output is written as CSV fixtures consumed by the Rust tests.

    python3 tools/oracles/special_values.py
"""

from fractions import Fraction
import math
import os

import mpmath as mp

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "..", "crates", "core", "tests", "fixtures")


def peak_log10_term(alpha, beta, gamma, z):
    """Largest log10 |term| of the three-parameter series (float scan)."""
    if z == 0:
        return 0.0
    best = -math.inf
    lz = math.log(abs(z))
    r = 0
    lpoch = 0.0
    lfact = 0.0
    while True:
        lt = lpoch - lfact + r * lz - math.lgamma(alpha * r + beta)
        best = max(best, lt)
        if r > 50 and lt < best - 200:
            break
        lpoch += math.log(gamma + r)
        lfact += math.log(r + 1)
        r += 1
    return best / math.log(10)


def to_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def ml3(alpha, beta, gamma, z, digits=40):
    """E^gamma_{alpha,beta}(z) by direct summation in extended precision.

    alpha must be rational with a small denominator: Gamma(alpha*r+beta) is
    advanced through Gamma(x+p) = Gamma(x) * x (x+1) ... (x+p-1) with
    alpha = p/q, so only q gamma values are computed directly.
    """
    frac = Fraction(alpha).limit_denominator(1000)
    p, q = frac.numerator, frac.denominator
    peak = max(peak_log10_term(float(alpha), float(beta), float(gamma), float(z)), 0.0)
    mp.mp.dps = int(peak) + digits + 30
    a = mp.mpf(p) / q
    b = to_mpf(beta)
    g = to_mpf(gamma)
    zz = to_mpf(z)
    # rg[j] holds 1/Gamma(alpha*r + beta) for the most recent r with r % q == j
    base = [mp.rgamma(a * j + b) for j in range(q)]
    rg = list(base)
    coef = mp.mpf(1)  # (gamma)_r z^r / r!
    total = mp.mpf(0)
    tiny = mp.mpf(10) ** (-(digits + 20))
    r = 0
    seen_peak = False
    lz = math.log(abs(z)) if z != 0 else 0.0
    while True:
        j = r % q
        if r >= q:
            x = a * (r - q) + b
            prod = mp.mpf(1)
            for i in range(p):
                prod *= x + i
            rg[j] = rg[j] / prod
        term = coef * rg[j]
        total += term
        if z == 0:
            break
        # mag is a cheap upper bound on log2 |term|
        lt = mp.mag(term) * math.log10(2) if term != 0 else -math.inf
        if lt >= peak - 1:
            seen_peak = True
        if seen_peak and r > 10 and abs(term) < tiny * max(abs(total), mp.mpf(10) ** -300):
            break
        coef = coef * (g + r) / (r + 1) * zz
        r += 1
    mp.mp.dps = digits
    return +total


def bessel_i(order, z, digits=40):
    mp.mp.dps = digits + 10
    half = mp.mpf(z) / 2
    total = mp.mpf(0)
    k = 0
    while True:
        term = half ** (2 * k + order) / (mp.factorial(k) * mp.factorial(k + order))
        total += term
        if k > 5 and term < total * mp.mpf(10) ** (-(digits + 5)):
            return total
        k += 1


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    alphas = [Fraction(3, 10), Fraction(1, 2), Fraction(7, 10), Fraction(1)]
    zs = [-20, -10, -5, -2, -1, Fraction(-1, 2), Fraction(1, 2), 1, 2, 5]
    rows = []
    for al in alphas:
        pairs = [
            (Fraction(1), 1),
            (al, 1),
            (2 * al, 2),
            (al + 1, 2),
            (3 * al, 3),
            (2 * al + 1, 3),
        ]
        for be, ga in pairs:
            for z in zs:
                v = ml3(al, be, ga, z)
                rows.append((float(al), float(be), ga, float(z), mp.nstr(v, 25, min_fixed=-1000, max_fixed=1000)))
                print(rows[-1], flush=True)
    extra = [
        (Fraction(7, 10), Fraction(1), 1, -2 * 0.5**0.7),
    ]
    for al, be, ga, z in extra:
        mp.mp.dps = 60
        zhp = -2 * mp.power(mp.mpf("0.5"), mp.mpf("0.7"))
        # irrational argument: evaluate the series directly at 60 digits (loss is tiny here)
        total = mp.mpf(0)
        coef = mp.mpf(1)
        for r in range(400):
            total += coef * mp.rgamma(mp.mpf("0.7") * r + 1)
            coef *= zhp * (ga + r) / (r + 1)
        rows.append((float(al), float(be), ga, float(zhp), mp.nstr(total, 25)))
    with open(os.path.join(FIXTURES, "ml3_reference.csv"), "w") as fh:
        fh.write("alpha,beta,gamma,z,value\n")
        for al, be, ga, z, v in rows:
            fh.write(f"{al!r},{be!r},{ga},{z!r},{v}\n")

    with open(os.path.join(FIXTURES, "bessel_reference.csv"), "w") as fh:
        fh.write("order,z,value\n")
        for order in range(0, 7):
            for z in [0.5, 1.0, 2.0, 5.0, 20.0, 40.0]:
                fh.write(f"{order},{z!r},{mp.nstr(bessel_i(order, z), 25)}\n")


if __name__ == "__main__":
    main()
