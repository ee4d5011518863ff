"""Independent oracle for the Whitham-density tables.

Evaluates the KdV and NLS single-well integrals with mpmath at 40 digits,
after the substitution x = X - s^2 that removes the inverse-square-root
singularity at the turning point X. Output is pasted into oracle_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 40


def phi_kdv(beta, eta):
    beta, eta = mp.mpf(beta), mp.mpf(eta)
    xb = 2 * mp.log(1 / eta)          # X^beta
    X = xb ** (1 / beta)

    def f(s):
        x = X - s * s
        gap = eta**2 * mp.expm1(xb - x**beta)
        return 2 * s * eta / mp.sqrt(gap)

    return 2 * mp.quad(f, [0, mp.sqrt(X) / 2, mp.sqrt(X)], method="gauss-legendre")


def g_nls(beta, lam):
    beta, lam = mp.mpf(beta), mp.mpf(lam)
    xb = -mp.log(2 * (1 - lam))
    if xb <= 0:
        return mp.mpf(0)
    X = xb ** (1 / beta)

    def f(s):
        x = X - s * s
        rp = 1 - mp.e ** (-x**beta) / 2
        diff = mp.e ** (-xb) / 2 * mp.expm1(xb - x**beta)   # lam - r_plus
        return 2 * s * lam**2 * mp.sqrt(1 - lam**2) / mp.sqrt(diff * (lam + rp))

    return 2 * mp.quad(f, [0, mp.sqrt(X) / 2, mp.sqrt(X)], method="gauss-legendre")


if __name__ == "__main__":
    print("// Table 1: beta in {1, 1.5, 2, 4}, eta = 0.1 .. 0.9")
    for b in ["1", "1.5", "2", "4"]:
        print("{" + ", ".join(mp.nstr(phi_kdv(b, mp.mpf(k) / 10), 15) for k in range(1, 10)) + "},")
    print("// Table 2: beta in {1.5, 2, 3, 3.5}, lambda = 0.5 .. 0.9")
    for b in ["1.5", "2", "3", "3.5"]:
        print("{" + ", ".join(mp.nstr(g_nls(b, mp.mpf(k) / 10), 15) for k in range(5, 10)) + "},")
    print("// phi_kdv(2, 0.999) =", mp.nstr(phi_kdv(2, "0.999"), 15))
    print("// phi_kdv(2, 0.5) =", mp.nstr(phi_kdv(2, "0.5"), 15))
    for b in ["1.5", "2", "3", "3.5"]:
        h = mp.mpf("1e-6")
        print("// dg/dlambda beta", b, [mp.nstr((g_nls(b, l + h) - g_nls(b, l - h)) / (2 * h), 8)
                                         for l in [mp.mpf("0.6"), mp.mpf("0.7"), mp.mpf("0.8"), mp.mpf("0.9")]])
