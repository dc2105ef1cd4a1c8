"""Reference values of E^{k+1}_{nu, nu k + 1}(-z) for large k.

Parameters are the exact binary64 values the library forms, so the
reference is the function at the same point the Rust code evaluates.
"""

import os

import mpmath as mp

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "..", "crates", "core", "tests", "fixtures")


def ml3(alpha, beta, gamma, z):
    total = mp.mpf(0)
    coef = mp.mpf(1)
    r = 0
    while True:
        term = coef * mp.rgamma(alpha * r + beta)
        total += term
        r += 1
        if r > 50 and abs(term) < mp.mpf(10) ** -120 * abs(total):
            return total
        coef *= z * (gamma + r - 1) / r


def stable_ml3(alpha, beta, gamma, z):
    """Raise the working precision until two evaluations agree to 30 digits."""
    dps = 100
    prev = None
    while True:
        with mp.workdps(dps):
            v = ml3(mp.mpf(alpha), mp.mpf(beta), gamma, -mp.mpf(z))
        if prev is not None and abs(v - prev) <= mp.mpf(10) ** -30 * abs(v):
            return v
        prev = v
        dps *= 2


def main():
    rows = []
    for nu in [0.3, 0.35, 0.5, 0.8, 0.95]:
        for z in [0.5, 2.0, 5.0]:
            for k in [10, 20, 30, 45, 60, 100, 160]:
                beta = nu * k + 1.0
                v = stable_ml3(nu, beta, k + 1, z)
                rows.append((nu, beta, k + 1, -z, mp.nstr(v, 25)))
    with open(os.path.join(FIXTURES, "ml3_large_gamma.csv"), "w") as fh:
        fh.write("alpha,beta,gamma,z,value\n")
        for al, be, ga, z, v in rows:
            fh.write(f"{al!r},{be!r},{ga},{z!r},{v}\n")


if __name__ == "__main__":
    main()
