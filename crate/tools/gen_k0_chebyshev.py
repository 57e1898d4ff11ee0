"""Chebyshev coefficients for the x > 2 branch of K0.

Expands f(s) = sqrt(x) * exp(x) * K0(x) with s = 4/x - 1, so x in (2, inf)
maps onto s in (-1, 1). Coefficients are printed as a Rust array literal.

    python3 tools/gen_k0_chebyshev.py
"""
import mpmath as mp

mp.mp.dps = 60
N = 80


def f(s):
    x = 4 / (s + 1)
    return mp.sqrt(x) * mp.exp(x) * mp.besselk(0, x)


def main():
    nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / N) for k in range(N)]
    values = [f(s) for s in nodes]
    coeffs = []
    for j in range(N):
        c = mp.fsum(values[k] * mp.cos(mp.pi * j * (k + mp.mpf(1) / 2) / N) for k in range(N))
        coeffs.append(2 * c / N)
    coeffs[0] /= 2
    last = max(j for j, c in enumerate(coeffs) if abs(c) > mp.mpf("1e-19"))
    print(f"const K0_LARGE_CHEBYSHEV: [f64; {last + 1}] = [")
    for c in coeffs[: last + 1]:
        print(f"    {mp.nstr(c, 20, min_fixed=-1, max_fixed=-1)},")
    print("];")


if __name__ == "__main__":
    main()
