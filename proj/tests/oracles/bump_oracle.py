"""Independent high-precision reference values for the bump-calculus tests.

Uses mpmath (tanh-sinh quadrature, arbitrary precision exp) and is not
linked to the C++ implementation. Values printed here are frozen into
tests/test_bump.cpp and tests/acceptance.cpp.
"""
import mpmath as mp

mp.mp.dps = 60


def psi(x):
    x = mp.mpf(x)
    return mp.e ** (-1 / (1 - x * x))


def main():
    ipsi = mp.quad(psi, [-1, 0, 1])
    print("I_psi", mp.nstr(ipsi, 40))
    print("psi(0)", mp.nstr(psi(0), 30))
    print("psi(1/2)", mp.nstr(psi(mp.mpf(1) / 2), 30))
    print("psi(9/10)", mp.nstr(psi(mp.mpf(9) / 10), 30))
    # a few derivative values
    print("psi2(1/2)", mp.nstr(mp.diff(psi, mp.mpf(1) / 2, 2), 30))
    print("psi4(3/10)", mp.nstr(mp.diff(psi, mp.mpf(3) / 10, 4), 30))
    print("psi3(-7/10)", mp.nstr(mp.diff(psi, mp.mpf(-7) / 10, 3), 30))
    # sup |psi^(n)| by dense sampling + local maximisation
    for n in range(0, 5):
        d = lambda x: abs(mp.diff(psi, x, n))
        best = max((d(mp.mpf(i) / 2000), mp.mpf(i) / 2000) for i in range(0, 2000))
        x0 = best[1]
        xs = mp.findroot(lambda x: mp.diff(psi, x, n + 1), x0) if n > 0 and x0 != 0 else x0
        print("M%d" % n, mp.nstr(max(best[0], d(xs)), 30), "at", mp.nstr(xs, 15))
    # gap integrals for the default schedule r_k = 4^-k
    def gap_integral(k):
        r = mp.mpf(4) ** (-k)
        return mp.mpf(2) ** (-1 / r) * r / 2 * ipsi
    for n in range(0, 4):
        tail = mp.fsum(2 ** (k - 1) * gap_integral(k) for k in range(n + 1, 12))
        print("image_measure stage", n, mp.nstr(tail, 30))
    print("f(1) stage1 truncated", mp.nstr(gap_integral(1), 30))
    # h at 1/2 for the generation-1 gap (3/8,5/8)
    print("h(1/2)", mp.nstr(mp.mpf(2) ** -4 * psi(0), 30))
    # partial integral: f(1/2) at stage 1 = gap1 integral / 2
    print("f(1/2) stage1", mp.nstr(gap_integral(1) / 2, 30))
    # stage 2: f(1/2) = G_2 + G_1/2 and f(3/16) = G_2/2
    print("f(1/2) stage2", mp.nstr(gap_integral(2) + gap_integral(1) / 2, 30))
    print("f(3/16) stage2", mp.nstr(gap_integral(2) / 2, 30))
    # f(7/16) at stage 1: 2^-4 * (1/8) * int_{-1}^{-1/2} psi
    print("f(7/16) stage1", mp.nstr(mp.mpf(2) ** -4 * mp.mpf(1) / 8 * mp.quad(psi, [-1, -0.5]), 30))


if __name__ == "__main__":
    main()
