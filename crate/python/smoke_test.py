"""Smoke test for the sieved_pollaczek extension module.

Build and install first:
    pip install --no-build-isolation ./crates/python
"""

import math

import sieved_pollaczek as sp


def check(cond, msg):
    if not cond:
        raise SystemExit(f"FAIL: {msg}")
    print(f"ok: {msg}")


def main():
    fam = sp.Family(1.0)
    check(complex(fam.eval(0, 0.3)) == 1.0, "p_0 is one")
    check(fam.symmetry_residual(7, 0.4 + 0.2j) < 2**-40, "reflection symmetry")
    seq = fam.sequence(3, 0.5)
    check(len(seq) == 4, "sequence holds p_0..p_3")

    m = sp.mrs(1.0, 100)
    check(abs(m["alpha"] + 0.989999854361772) < 1e-11, "left soft edge at n=100")
    check(abs(m["beta"] - 1.00994211588278) < 1e-11, "right soft edge at n=100")

    eq = sp.Equilibrium(1.0, 100)
    check(eq.region(0.0) == "B", "x=0 lies in the band region")
    approx, region = eq.asymptotic(0.0)
    exact = fam.eval(100, 0.0)
    check(region == "B" and approx.rel_diff(exact) < 0.05, "band formula within 5% at n=100")

    big = fam.eval(1500, 2.5)
    ln_abs, _ = big.log()
    check(ln_abs > 709.0, "large values kept in scaled form")
    try:
        big.to_complex()
        check(False, "overflow raises")
    except OverflowError:
        check(True, "overflow raises")

    ai, aip = sp.airy_ai(0.0)
    check(abs(ai - 0.3550280538878172) < 1e-14, "Ai(0)")
    check(abs(aip + 0.2588194037928068) < 1e-14, "Ai'(0)")

    passed, worst, tol, _ = sp.verify("airy")
    check(passed and worst <= tol, "airy identities")

    csv = sp.sweep(1.0, [50, 100], "line -0.5 0 0.5 0 3\n")
    lines = csv.strip().splitlines()
    check(lines[0].startswith("b,n,re_z,im_z,region"), "csv header")
    check(len(lines) == 7, "one row per (n, z)")
    check(csv == sp.sweep(1.0, [50, 100], "line -0.5 0 0.5 0 3\n"), "sweep is deterministic")

    rep = sp.convergence("lagrange-l", 1.0, [50, 100, 200])
    check(math.isfinite(rep["fitted_order"]), "convergence report")

    try:
        sp.Family(-1.0)
        check(False, "negative b rejected")
    except ValueError:
        check(True, "negative b rejected")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
