#!/usr/bin/env python3
"""Generate the bundled parton-luminosity fixture table.

The library ingests luminosities as data; this script produces the
checked-in fixture.  It evaluates an analytic LO-style proton
parametrization (valence + SU(2)-ish sea + gluon, momentum sum rule
enforced, single frozen effective scale) and convolves it into the two
channel luminosities

    L_gg(M)  = (2M/s) * int_tau^1 dx/x g(x) g(tau/x)
    L_qq(M)  = (2M/s) * sum_q int_tau^1 dx/x [q(x) qbar(tau/x) + qbar(x) q(tau/x)]

with tau = M^2/s and q running over u, d, s, c.  The parametrization is
a stand-in calibrated to the qualitative LO features that matter for
spin observables (gluon-fusion dominance near threshold, falling
spectrum with a peak near 400 GeV); it is NOT a fitted PDF set and the
absolute normalization is indicative only.  To regenerate the table
from a real PDF set, replace `xpdf` below with LHAPDF calls, e.g.

    import lhapdf; p = lhapdf.mkPDF("NNPDF30_lo_as_0118", 0)
    xpdf = lambda pid, x: p.xfxQ(pid, x, 400.0)

and rerun; the output format is unchanged.

Usage:
    python scripts/make_lumi_table.py --out src/ttspin/data/lumi_13tev.csv
"""

import argparse
import math

import numpy as np
from scipy import integrate, special

SQRT_S_DEFAULT = 13000.0

# Exponents of the frozen-scale parametrization x f(x) = A x^a (1-x)^b.
GLUON = (-0.36, 9.5)
SEA = (-0.26, 9.0)
U_VALENCE = (0.50, 3.2)
D_VALENCE = (0.55, 4.2)

SEA_MOMENTUM = 0.17  # total momentum fraction carried by the sea
STRANGE_SUPPRESSION = 0.55
CHARM_SUPPRESSION = 0.25


def _norm_count(a, b, count):
    """A such that int f dx = count for x f = A x^a (1-x)^b."""
    return count / special.beta(a, b + 1.0)


def _momentum(a, b, amplitude):
    """int x f dx for x f = A x^a (1-x)^b."""
    return amplitude * special.beta(a + 1.0, b + 1.0)


def build_proton():
    """Amplitudes of each parton species, with the momentum sum closed
    by the gluon."""
    a_uv = _norm_count(*U_VALENCE, 2.0)
    a_dv = _norm_count(*D_VALENCE, 1.0)
    # sea: ubar = dbar, sbar/cbar suppressed; 2*(sum of qbar) carries SEA_MOMENTUM
    unit_sea_mom = _momentum(*SEA, 1.0)
    flavor_sum = 2.0 * (1.0 + 1.0 + STRANGE_SUPPRESSION + CHARM_SUPPRESSION)
    a_sea = SEA_MOMENTUM / (flavor_sum * unit_sea_mom)
    valence_mom = _momentum(*U_VALENCE, a_uv) + _momentum(*D_VALENCE, a_dv)
    a_g = (1.0 - SEA_MOMENTUM - valence_mom) / _momentum(*GLUON, 1.0)
    if a_g <= 0.0:
        raise RuntimeError("momentum sum rule cannot be closed; reduce sea/valence")
    return {
        "uv": a_uv,
        "dv": a_dv,
        "sea_u": a_sea,
        "sea_d": a_sea,
        "sea_s": a_sea * STRANGE_SUPPRESSION,
        "sea_c": a_sea * CHARM_SUPPRESSION,
        "g": a_g,
    }


AMPL = build_proton()


def _shape(x, a, b, amplitude):
    return amplitude * x**a * (1.0 - x) ** b


def xpdf(species, x):
    """x f(x) for one species; quark flavors return (q, qbar) pairs."""
    if species == "g":
        return _shape(x, *GLUON, AMPL["g"])
    if species == "u":
        sea = _shape(x, *SEA, AMPL["sea_u"])
        return _shape(x, *U_VALENCE, AMPL["uv"]) + sea, sea
    if species == "d":
        sea = _shape(x, *SEA, AMPL["sea_d"])
        return _shape(x, *D_VALENCE, AMPL["dv"]) + sea, sea
    if species == "s":
        sea = _shape(x, *SEA, AMPL["sea_s"])
        return sea, sea
    if species == "c":
        sea = _shape(x, *SEA, AMPL["sea_c"])
        return sea, sea
    raise ValueError(species)


def luminosities(m, sqrt_s):
    """(L_qq, L_gg) in 1/GeV at invariant mass m."""
    s = sqrt_s * sqrt_s
    tau = m * m / s
    half_log = -0.5 * math.log(tau)

    def integrand_gg(t):
        # x = sqrt(tau) e^t, partner sqrt(tau) e^-t; dx/x = dt
        x1 = math.sqrt(tau) * math.exp(t)
        x2 = tau / x1
        return xpdf("g", x1) * xpdf("g", x2) / (x1 * x2)

    def integrand_qq(t):
        x1 = math.sqrt(tau) * math.exp(t)
        x2 = tau / x1
        total = 0.0
        for flavor in ("u", "d", "s", "c"):
            q1, qb1 = xpdf(flavor, x1)
            q2, qb2 = xpdf(flavor, x2)
            total += q1 * qb2 + qb1 * q2
        return total / (x1 * x2)

    kwargs = dict(epsabs=0.0, epsrel=1e-9, limit=200)
    l_gg = integrate.quad(integrand_gg, -half_log, half_log, **kwargs)[0]
    l_qq = integrate.quad(integrand_qq, -half_log, half_log, **kwargs)[0]
    jac = 2.0 * m / s
    return jac * l_qq, jac * l_gg


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sqrt-s", type=float, default=SQRT_S_DEFAULT)
    parser.add_argument("--m-min", type=float, default=346.0)
    parser.add_argument("--m-max", type=float, default=3000.0)
    parser.add_argument("--step-fine", type=float, default=2.0, help="grid step below --split")
    parser.add_argument("--step-coarse", type=float, default=10.0, help="grid step above --split")
    parser.add_argument("--split", type=float, default=1000.0)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    fine = np.arange(args.m_min, args.split, args.step_fine)
    coarse = np.arange(args.split, args.m_max + 0.5 * args.step_coarse, args.step_coarse)
    grid = np.concatenate([fine, coarse])

    lines = [
        f"# sqrt_s={args.sqrt_s:g} source=analytic-lo-parametrization-v1",
        "# generated by scripts/make_lumi_table.py (see its docstring); units 1/GeV",
        "# M_GeV,L_qqbar,L_gg",
    ]
    for m in grid:
        l_qq, l_gg = luminosities(float(m), args.sqrt_s)
        lines.append(f"{m:.1f},{l_qq:.8e},{l_gg:.8e}")
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
    print(f"wrote {len(grid)} rows to {args.out}")


if __name__ == "__main__":
    main()
