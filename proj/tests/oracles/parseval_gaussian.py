"""Reference Parseval defects for Gaussian data e^{-|x-x0|^2} (a = 1).

Run with mpmath; the printed values are frozen in test_evolve.cpp.

Angular modes: e^{-|x-x0|^2} = e^{-1-r^2} sum_k I_k(2r) e^{ik theta} for x0 = (1, 0)
(only k = 0, f_0 = e^{-r^2}, for x0 = 0). Radial moments of f_k against
r^nu e^{-b0 r^2/4} u^n, u = b0 r^2/2, reduce to Gamma functions and 1F1.
"""
import sys
from mpmath import mp, mpf, gamma, hyp1f1, rf, factorial, pi, exp, binomial

mp.dps = 60


def defect(alpha, b0, shifted, K, M):
    alpha, b0 = mpf(alpha), mpf(b0)
    beta = 1 + b0 / 4
    total = mpf(0)
    ks = range(-K, K + 1) if shifted else [0]
    for k in ks:
        nu = abs(k + alpha)
        ak = abs(k)
        mom = []
        for n in range(M + 1):
            if shifted:
                # e^{-1} sum_j int r^{2j+|k|+nu+2n+1} e^{-beta r^2} dr / (j! (j+|k|)!)
                s = (ak + nu) / 2 + n + 1
                val = exp(-1) * gamma(s) / (2 * beta**s * factorial(ak)) * hyp1f1(s, ak + 1, 1 / beta)
            else:
                s = nu / 2 + n + 1
                val = gamma(s) / (2 * beta**s)
            mom.append(val * (b0 / 2) ** n)
        norm_base = pi * (2 / b0) ** (1 + nu) * gamma(1 + nu)
        for m in range(M + 1):
            A = sum(rf(-m, n) / (rf(1 + nu, n) * factorial(n)) * mom[n] for n in range(m + 1))
            N = norm_base / binomial(m + nu, m)
            total += 4 * pi**2 * A**2 / N
    fnorm = pi / 2
    return 1 - total / fnorm


if __name__ == "__main__":
    for M in (16, 32, 64, 128, 256):
        print("centered alpha=0.5 b0=1 M=%d defect=%s" % (M, mp.nstr(defect(0.5, 1, False, 0, M), 12)))
    for M in (64, 128):
        print("shifted alpha=0.5 b0=1 K=32 M=%d defect=%s" % (M, mp.nstr(defect(0.5, 1, True, 32, M), 12)))
    print("shifted alpha=0.3 b0=2 K=32 M=64 defect=%s" % mp.nstr(defect(0.3, 2, True, 32, 64), 12))
