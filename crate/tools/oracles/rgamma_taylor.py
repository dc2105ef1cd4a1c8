"""Taylor coefficients of 1/Gamma(1.5 + h), used for Gamma on [1, 2].

Prints Rust literals for the coefficients c_n with 1/Gamma(1.5 + h) = sum c_n h^n,
keeping terms until c_n * 0.5**n drops below 1e-20.
"""
import mpmath as mp

mp.mp.dps = 60
coeffs = mp.taylor(mp.rgamma, mp.mpf("1.5"), 40)
kept = []
for n, c in enumerate(coeffs):
    kept.append(c)
    if n > 4 and abs(c) * mp.mpf("0.5") ** n < mp.mpf("1e-20"):
        break
for c in kept:
    print(f"    {mp.nstr(c, 20, min_fixed=-1, max_fixed=1)},")

# worst relative error of the truncated double-precision series on [1, 2]
worst = 0
for i in range(2001):
    x = mp.mpf(1) + mp.mpf(i) / 2000
    h = x - mp.mpf("1.5")
    approx = sum(mp.mpf(float(c)) * h**n for n, c in enumerate(kept))
    worst = max(worst, abs(approx * mp.gamma(x) - 1))
print(f"# terms {len(kept)}, truncation+rounding bound {mp.nstr(worst, 3)}")
