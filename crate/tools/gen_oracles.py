#!/usr/bin/env python3
"""Regenerate the high-precision reference values frozen into the Rust tests.

Uses mpmath at 60 significant digits. Every constant printed here is pasted
verbatim (rounded to f64) into the test suites; the test comments cite this
script. Run: python3 tools/gen_oracles.py
"""
import mpmath as mp

mp.mp.dps = 60


def show(label, value, digits=25):
    print(f"{label:44s} = {mp.nstr(value, digits)}")
    print(f"{'':44s}   f64: {float(value)!r}")


pi2 = mp.pi / 2

print("# tanh-sinh transform values")
show("phi(1) = tanh(pi/2 sinh 1)", mp.tanh(pi2 * mp.sinh(1)))
show("phi_prime(3)", pi2 * mp.cosh(3) / mp.cosh(pi2 * mp.sinh(3)) ** 2)
show("sech^2(pi/2 sinh 4)  [one_minus_x2 at t=4]", mp.sech(pi2 * mp.sinh(4)) ** 2)
show("phi_prime(0.5)", pi2 * mp.cosh(mp.mpf(1) / 2) / mp.cosh(pi2 * mp.sinh(mp.mpf(1) / 2)) ** 2)

print("\n# expression evaluation fixture")
show("exp(-10)*sin(128)", mp.exp(-10) * mp.sin(128))

print("\n# reference integrals (closed forms)")
i1 = (20 * mp.sin(256) - 256 * mp.cos(256) + 256 * mp.exp(-20)) / 65936
show("I1 = int_0^1 exp(20(x-1)) sin(256 x) dx", i1)
show("pi", mp.pi)
show("pi/2", pi2)

print("\n# registry cross-check: independent DE quadrature vs closed form")
checks = [
    ("const2", lambda x: mp.mpf(1), -1, 1, mp.mpf(2)),
    ("invsqrt", lambda x: 1 / mp.sqrt(1 - x * x), -1, 1, mp.pi),
    ("sqrt_sing", lambda x: mp.sqrt(1 - x * x), -1, 1, pi2),
    ("log_sing", lambda x: mp.log(1 / x), 0, 1, mp.mpf(1)),
    ("I1", lambda x: mp.exp(20 * (x - 1)) * mp.sin(256 * x), 0, 1, i1),
]
for name, f, a, b, exact in checks:
    q = mp.quad(f, [a, b], maxdegree=12)
    rel = abs(q - exact) / abs(exact)
    print(f"  {name:10s} quad={mp.nstr(q, 25)}  rel dev={mp.nstr(rel, 3)}  "
          f"{'OK(<1e-25)' if rel < mp.mpf('1e-25') else 'CHECK'}")

print("\n# error model values")
h = mp.mpf(1) / 129
c = mp.mpf(2)
gerr = h ** 2 / 3 * (1 + c) * (mp.exp(-4 - c / 2) + c / 4)
show("global_bound(1/129, 2)", gerr)
show("case1_term(1/129, 2) = e^-5/16641", mp.exp(-4) * (1 + c) / 3 * mp.exp(-c / 2) * h ** 2)
show("case2_term(1/129, 2)", h ** 2 * (c + c * c) / 12)
show("global_bound(0.1, 1)", mp.mpf("0.01") / 3 * 2 * (mp.exp(mp.mpf("-4.5")) + mp.mpf("0.25")))

print("\n# Lemma 3.3 scale-invariant root u* of exp(-u/2) = 1 - u/4")
u = mp.findroot(lambda u: mp.exp(-u / 2) - (1 - u / 4), 3.2)
show("u*", u)

print("\n# second-difference fixture: F(t)=exp(-2 e^|t|), t=1, delta=1e-3")
F = lambda t: mp.exp(-2 * mp.exp(abs(t)))
d = mp.mpf(1) / 1000
sd = (F(1 + d) - 2 * F(1) + F(1 - d)) / d ** 2
show("second difference", sd)
show("envelope (c+c^2) e^{2-2e} at t=1, c=2", 6 * mp.exp(2 - 2 * mp.e))
show("|F''(1)| exact", abs(mp.diff(F, 1, 2)))

print("\n# decay envelope sample fixture")
show("exp(-2 e^3)", mp.exp(-2 * mp.exp(3)))
show("exp(-2)", mp.exp(-2))
