"""Independent high-precision oracles for values frozen into the C++ tests.

Run: python3 tests/oracles/freeze_values.py
Uses mpmath/sympy only; shares no code with the library.
"""
import mpmath as mp
from sympy import bell as sympy_bell, exp as sexp, symbols, series, factorial, Rational

mp.mp.dps = 60


def bell_triangle(n_max):
    row, out = [1], [1]
    for _ in range(n_max):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
        out.append(row[0])
    return out


def egf_coeffs(expr, z, n_max):
    s = series(expr, z, 0, n_max + 1).removeO()
    return [int(s.coeff(z, n) * factorial(n)) for n in range(n_max + 1)]


def main():
    z = symbols("z")
    print("bell triangle 0..6:", bell_triangle(6))
    print("egf exp(e^z-1) 0..6:", egf_coeffs(sexp(sexp(z) - 1), z, 6))
    print("egf exp(exp(e^z-1)-1) 0..5:", egf_coeffs(sexp(sexp(sexp(z) - 1) - 1), z, 5))

    # BellSeries k=2 (classical Bell numbers), r=10: log sum r^n/(B_n n!)
    r = mp.mpf(10)
    s = mp.nsum(lambda n: r**n / (sympy_bell(int(n)) * mp.factorial(n)), [0, 400])
    print("log u_2(10) =", mp.nstr(mp.log(s), 20))

    # BellSeries k=2 far out, where the library leaves its exact table:
    # log-sum over a window around the peak with mpmath's Bell numbers.
    mp.mp.dps = 40
    for r in [mp.mpf(10) ** 4, mp.mpf(10) ** 6, mp.mpf(10) ** 8]:
        lt = lambda n: n * mp.log(r) - mp.log(mp.bell(n)) - mp.loggamma(n + 1)
        lo, hi = 1, 200000
        while hi - lo > 2:
            m1, m2 = lo + (hi - lo) // 3, hi - (hi - lo) // 3
            if lt(m1) < lt(m2):
                lo = m1
            else:
                hi = m2
        peak = lt(lo)
        acc, n = mp.mpf(0), lo
        while True:
            v = lt(n)
            acc += mp.exp(v - peak)
            if v < peak - 60:
                break
            n += 1
        n = lo - 1
        while n >= 0:
            v = lt(n)
            acc += mp.exp(v - peak)
            if v < peak - 60:
                break
            n -= 1
        print("log u_2(%s) =" % mp.nstr(r, 3), mp.nstr(peak + mp.log(acc), 25), " peak n =", lo)
    mp.mp.dps = 60

    # L_u(1) for u=e^r: sum (e/n)^n
    L1 = 1 + mp.nsum(lambda n: (mp.e / n) ** n, [1, mp.inf])
    print("L_u(1) beta=0 =", mp.nstr(L1, 20), " log =", mp.nstr(mp.log(L1), 20), " sqrt =", mp.nstr(mp.sqrt(L1), 20))

    # test norm of exponential vector |xi|=1, beta=0: sum (1/n!)^2 / (e/n)^n
    tn = 1 + mp.nsum(lambda n: (1 / mp.factorial(n)) ** 2 / (mp.e / n) ** n, [1, mp.inf])
    print("test_norm expvec beta=0 =", mp.nstr(mp.sqrt(tn), 20))

    # A-norm of He_3 for beta=0, p=0: sup |x^3-3x| e^{-x^2/2}
    f = lambda x: abs(x**3 - 3 * x) * mp.exp(-x * x / 2)
    # stationary points of (x^3-3x)e^{-x^2/2}: derivative (3x^2-3) - x(x^3-3x) = -x^4+6x^2-3
    roots = [mp.sqrt(3 - mp.sqrt(6)), mp.sqrt(3 + mp.sqrt(6))]
    a3 = max(f(x) for x in roots)
    print("A-norm He_3 =", mp.nstr(a3, 20), " at x in", [mp.nstr(x, 12) for x in roots])
    print("growth-bound C He_3 =", mp.nstr(a3 * mp.sqrt((mp.e / 3) ** 3), 20))
    a2 = max(abs(x**2 - 1) * mp.exp(-x * x / 2) for x in [mp.mpf(0), mp.sqrt(3)])
    print("A-norm He_2 =", mp.nstr(a2, 20))

    # Fernique product rho=0.5, q=1, c2=0.1
    fp = mp.nprod(lambda k: (1 - 4 * mp.mpf("0.1") * mp.mpf("0.25") ** (k + 1)) ** (-0.5), [0, mp.inf])
    print("fernique(0.5,1,0.1) =", mp.nstr(fp, 20))

    # Poisson theta=1, g(k)=exp(k sqrt(log(max(e,k))))
    log1 = lambda k: mp.log(max(mp.e, k))
    ps = mp.fsum(mp.exp(k * mp.sqrt(log1(k)) - 1) / mp.factorial(k) for k in range(0, 300))
    print("poisson example 4.5 theta=1 =", mp.nstr(ps, 20))

    # Mittag-Leffler E_{1/2}(-1) = e erfc(1)
    print("E_0.5(-1) =", mp.nstr(mp.e * mp.erfc(1), 20))
    for t in [0.5, 2, 5]:
        print("E_0.5(-%g) =" % t, mp.nstr(mp.exp(t * t) * mp.erfc(t), 20),
              " series check", mp.nstr(mp.nsum(lambda n: (-t) ** n / mp.gamma(1 + n / 2), [0, mp.inf]), 20))
    for lam in [0.3, 0.7]:
        for t in [0.25, 1, 4]:
            v = mp.nsum(lambda n: (-mp.mpf(t)) ** n / mp.gamma(1 + lam * n), [0, mp.inf])
            print("E_%g(-%g) =" % (lam, t), mp.nstr(v, 20))

    # grey integrability at lambda=1: X ~ N(0,2), E exp(0.05 X^2) = (1 - 2*0.05*2)^{-1/2}
    print("grey lambda=1 w=0.1 closed form =", mp.nstr((1 - 2 * mp.mpf("0.05") * 2) ** -0.5, 20))

    # Legendre closed forms
    for beta, t in [(0, 1), (0.5, 2)]:
        print("ell beta=%g t=%g =" % (beta, t), mp.nstr((mp.e / t) ** ((1 + beta) * t), 20))


if __name__ == "__main__":
    main()
