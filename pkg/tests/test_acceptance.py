"""Acceptance criteria, one test per criterion at the stated tolerance.

A pass/fail line per criterion is printed in the pytest terminal summary;
``python tests/test_acceptance.py`` runs just this module and prints the same lines.
"""

import io
import json
import math
import random
import time

import pytest

from intdeform.cli import run
from intdeform.cohomology import FactoredFiber, decompose
from intdeform.deformation import DeformationSeries
from intdeform.errors import FiberError
from intdeform.forms import LogForm, PForm, d
from intdeform.integrator import (
    ExactCase,
    FirstIntegralSeries,
    Obstructed,
    PullbackCase,
    classify_degree_one,
    reconstruct_first_integral,
    rescale_deformation,
    scale_pullback,
)
from intdeform.periods import log_period_exact, period, standard_torus_cycle, winding_number
from intdeform.polynomial import Polynomial, parse_polynomial
from intdeform.scalars import ZERO, GaussianRational, as_scalar

from randgen import rand_form, rand_poly, rand_scalar

TWO_PI_I = 2j * math.pi


def P(s, vars):
    return parse_polynomial(s, vars)


def variables(vars):
    return [Polynomial.variable(i, vars) for i in range(len(vars))]


# -- 1 ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "Example reproduction: order-1 period -2 pi i (1+lambda), lambda = -1 exact")
def test_criterion_1_example_periods():
    V = ("x", "y")
    x, y = variables(V)
    f = x * y
    fiber = FactoredFiber((x, y))
    worst = 0.0
    for lam in ("0", "2", "3+I", "-1"):
        lam_s = as_scalar(lam)
        w1 = PForm.one_form([y.scale(-lam_s), x])
        for c in (1, 4, 2 - 1j):
            gamma = standard_torus_cycle(fiber, c)
            got = period(w1, gamma, f).value_over_f
            expected = -TWO_PI_I * (1 + complex(lam_s))
            worst = max(worst, abs(got - expected))
            assert abs(got - expected) < 1e-9, (lam, c, got, expected)
            if lam == "-1":
                assert abs(got) < 1e-9
    w = DeformationSeries([d(f), PForm.one_form([y, x])])
    F = reconstruct_first_integral(w, fiber)
    assert isinstance(F, FirstIntegralSeries)
    assert F.coeffs == (f, f)
    print(f"criterion 1: max |error| = {worst:.2e}")


# -- 2 ---------------------------------------------------------------------------


def _exact_fibers():
    out = []
    for n in (3, 4):
        V = ("x", "y", "z", "w")[:n]
        xs = variables(V)
        out.append(FactoredFiber((xs[0], xs[1])))  # xy, padded with unused variables
        out.append(FactoredFiber((xs[0], xs[1], xs[2])))
    V = ("x", "y", "z", "w")
    out.append(FactoredFiber((P("x^2+y^2+z^2", V), P("w", V))))
    return out


@pytest.mark.criterion(2, "Exact families: 50 reconstructions with d F_t = w_t, < 10 s each")
def test_criterion_2_exact_reconstruction():
    rng = random.Random(2024)
    fibers = _exact_fibers()
    slowest = 0.0
    for k in range(50):
        fiber = fibers[k % len(fibers)]
        V = fiber.vars
        hs = [rand_poly(rng, V, fiber.nu + 1, rng.randint(1, 6), min_deg=1) for _ in range(3)]
        w = DeformationSeries([d(fiber.f)] + [d(h) for h in hs])
        t0 = time.perf_counter()
        F = reconstruct_first_integral(w, fiber)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        assert isinstance(F, FirstIntegralSeries)
        defect = F.d() - w
        assert defect.is_zero()
        assert all(c.degree <= fiber.nu + 1 for c in F.coeffs)
        assert elapsed < 10.0
    print(f"criterion 2: slowest family {slowest:.3f} s")


# -- 3 ---------------------------------------------------------------------------


@pytest.mark.criterion(3, "xyz family (1,2,3): nonzero lambdas, obstructed at order 1, periods 2 pi i * integer combos")
def test_criterion_3_obstruction_equivalence():
    V = ("x", "y", "z")
    x, y, z = variables(V)
    a, b, c = 1, 2, 3
    fiber = FactoredFiber((x, y, z))
    w1 = PForm.one_form([(y * z).scale(as_scalar(a)), (x * z).scale(as_scalar(b)), (x * y).scale(as_scalar(c))])
    w = DeformationSeries([d(x * y * z), w1])

    dec = decompose(w1, fiber)
    assert dec.obstructed
    assert all(dec.lambdas)

    cycles = [
        (standard_torus_cycle(fiber, 1, ("x", "y"), (0, 0, 1)), a - b),
        (standard_torus_cycle(fiber, 1, ("y", "z"), (1, 0, 0)), b - c),
        (standard_torus_cycle(fiber, 1, ("x", "z"), (0, 1, 0)), a - c),
    ]
    out = reconstruct_first_integral(w, fiber, [g for g, _ in cycles])
    assert isinstance(out, Obstructed) and out.order == 1
    for (gamma, combo), cross in zip(cycles, out.periods):
        measured = period(w1, gamma).value
        assert abs(measured) > 1e-6
        assert abs(measured - TWO_PI_I * combo) < 1e-9
        assert abs(complex(*cross["measured"]) - complex(*cross["predicted"])) < 1e-9


# -- 4 ---------------------------------------------------------------------------


def _sigmas():
    V2 = ("x", "y")
    V4 = ("x", "y", "z", "w")
    return [
        (P("x", V2), P("y", V2)),
        (P("x^2+y*z", V4), P("w", V4)),
        (P("x*y+z^2", V4), P("w", V4)),
    ]


def _random_univariate(rng, var_index, max_deg):
    XY = ("x", "y")
    terms = {}
    for k in range(1, max_deg + 1):
        if rng.random() < 0.7:
            e = [0, 0]
            e[var_index] = k
            terms[tuple(e)] = rand_scalar(rng)
    return Polynomial(XY, terms)


@pytest.mark.criterion(4, "Degree-one round trip: 25 pullbacks re-emit exactly; lambda = 0 gives ExactCase")
def test_criterion_4_pullback_roundtrip():
    rng = random.Random(77)
    XY = ("x", "y")
    X, Y = variables(XY)
    sigmas = _sigmas()
    for k in range(25 + 6):
        f1, f2 = sigmas[k % len(sigmas)]
        fiber = FactoredFiber((f1, f2))
        bound = fiber.nu + 1
        Pp = _random_univariate(rng, 0, bound // f1.degree)
        Qp = _random_univariate(rng, 1, bound // f2.degree)
        mu = rand_scalar(rng)
        lam = ZERO if k >= 25 else rand_scalar(rng)
        while k < 25 and not lam:
            lam = rand_scalar(rng)
        alpha1 = d(X * Y) * mu + d(Pp + Qp) + PForm.one_form([Y.scale(lam), Polynomial.zero(XY)])
        w1 = alpha1.pullback([f1, f2])
        out = classify_degree_one(fiber, w1)
        if lam:
            assert isinstance(out, PullbackCase) and out.verified
            assert out.emitted() == DeformationSeries([d(f1 * f2), w1])
            assert (out.mu, out.lam, out.P, out.Q) == (mu, lam, Pp, Qp)
        else:
            assert isinstance(out, ExactCase) and out.verified
            assert out.first_integral.d() == DeformationSeries([d(f1 * f2), w1])


# -- 5 ---------------------------------------------------------------------------


@pytest.mark.criterion(5, "Counterexample guards: dy + t y dx exits 2; d(x^2 y) + t xy dy fails fiber validation")
def test_criterion_5_guards():
    doc = {
        "vars": ["x", "y"],
        "family": {"coeffs": [{"d": "y"}, {"p": 1, "components": {"dx": "y"}}]},
        "fiber": {"factors": ["y"]},
    }
    code, report, _ = run(["first-integral"], stdin=io.StringIO(json.dumps(doc)))
    assert code == 2
    assert report["error"]["type"] == "DegreeBoundError"

    V = ("x", "y")
    with pytest.raises(FiberError):
        FactoredFiber((P("x^2*y", V),))
    with pytest.raises(FiberError):
        FactoredFiber((P("x^2", V), P("y", V)))
    doc = {
        "vars": ["x", "y"],
        "family": {"coeffs": [{"d": "x^2*y"}, {"p": 1, "components": {"dy": "x*y"}}]},
        "fiber": {"factors": ["x^2*y"]},
    }
    code, report, _ = run(["first-integral"], stdin=io.StringIO(json.dumps(doc)))
    assert code == 2 and report["error"]["type"] == "FiberError"


# -- 6 ---------------------------------------------------------------------------


@pytest.mark.criterion(6, "Exterior algebra: d^2 = 0, Leibniz, anticommutativity, Euler, pullback functoriality; 1000 cases each, < 60 s")
def test_criterion_6_exterior_algebra_properties():
    rng = random.Random(6)
    V3 = ("x", "y", "z")
    V2 = ("u", "v")
    cases = 1000
    t0 = time.perf_counter()
    counts = dict.fromkeys(("dd", "leibniz", "anti", "euler", "functorial"), 0)
    for _ in range(cases):
        # d o d = 0 on 0- and 1-forms
        f = rand_poly(rng, V3, 4, 5)
        a = rand_form(rng, V3, 1, 3, 3)
        assert not d(d(f)) and not d(d(a))
        counts["dd"] += 1

        # Leibniz: d(a ^ b) = da ^ b + (-1)^p a ^ db
        p = rng.randint(0, 1)
        a = rand_form(rng, V3, p, 2, 2) if p else PForm.function(rand_poly(rng, V3, 2, 3))
        b = rand_form(rng, V3, 1, 2, 2)
        sign = -1 if p % 2 else 1
        assert d(a.wedge(b)) == d(a).wedge(b) + a.wedge(d(b)) * as_scalar(sign)
        counts["leibniz"] += 1

        # a ^ b = (-1)^{pq} b ^ a
        q = rng.randint(1, 2)
        c = rand_form(rng, V3, q, 2, 2)
        assert b.wedge(c) == c.wedge(b) * as_scalar((-1) ** q)
        counts["anti"] += 1

        # Euler: (dh)(R) = m h for homogeneous h of degree m
        m = rng.randint(1, 4)
        h = rand_poly(rng, V3, m, 4, homogeneous=m)
        assert d(h).interior_radial() == h.scale(as_scalar(m))
        counts["euler"] += 1

        # (sigma o tau)^* = tau^* sigma^*, and pullback commutes with d
        sigma = [rand_poly(rng, V2, 2, 2) for _ in V3]  # V2 -> V3
        tau = [rand_poly(rng, V2, 1, 2, min_deg=1) for _ in V2]  # V2 -> V2
        alpha = rand_form(rng, V3, rng.randint(1, 2), 1, 2)
        composed = [s.compose(tau) for s in sigma]
        assert alpha.pullback(composed) == alpha.pullback(sigma).pullback(tau)
        assert d(alpha).pullback(sigma) == d(alpha.pullback(sigma))
        counts["functorial"] += 1
    elapsed = time.perf_counter() - t0
    assert all(v >= 1000 for v in counts.values())
    print(f"criterion 6: {sum(counts.values())} checks in {elapsed:.1f} s")
    assert elapsed < 60.0


# -- 7 ---------------------------------------------------------------------------


def _builtin_cycles():
    V2 = ("x", "y")
    V3 = ("x", "y", "z")
    out = []
    xy = FactoredFiber((P("x", V2), P("y", V2)))
    for c in (1, 4, 2 - 1j):
        out.append((xy, standard_torus_cycle(xy, c)))
    xyz = FactoredFiber(tuple(P(v, V3) for v in V3))
    for plane, anchor in ((("x", "y"), (0, 0, 1)), (("y", "z"), (1, 0, 0)), (("x", "z"), (0, 1, 0))):
        out.append((xyz, standard_torus_cycle(xyz, 1, plane, anchor)))
        out.append((xyz, standard_torus_cycle(xyz, 2 - 1j, plane, (2j if anchor[0] else 0, 3 if anchor[1] else 0, -1 if anchor[2] else 0))))
    return out


@pytest.mark.criterion(7, "Period engine: exact periods < 1e-10, windings within 1e-6 at N >= 256, quadrature vs residue 1e-9 relative")
def test_criterion_7_period_engine():
    rng = random.Random(7)
    cycles = _builtin_cycles()
    worst_exact = worst_wind = worst_rel = 0.0
    for fiber, gamma in cycles:
        V = fiber.vars
        for _ in range(10):
            h = rand_poly(rng, V, 5, 6)
            worst_exact = max(worst_exact, abs(period(d(h), gamma).value))
        for g in fiber.factors:
            w, _ = winding_number(g, gamma, n_start=256)
            worst_wind = max(worst_wind, abs(w - round(w.real)))
        for _ in range(5):
            lams = [rand_scalar(rng) for _ in fiber.factors]
            theta = LogForm(tuple(zip(lams, fiber.factors)))
            exact = log_period_exact(theta, gamma).value
            quad = period(theta.cleared(), gamma, theta.product()).value_over_f
            if abs(exact) > 0:
                worst_rel = max(worst_rel, abs(quad - exact) / abs(exact))
            else:
                worst_rel = max(worst_rel, abs(quad))
    print(f"criterion 7: exact {worst_exact:.1e}, winding {worst_wind:.1e}, relative {worst_rel:.1e}")
    assert worst_exact < 1e-10
    assert worst_wind < 1e-6
    assert worst_rel < 1e-9


# -- 8 ---------------------------------------------------------------------------


@pytest.mark.criterion(8, "Rescaling: 20 random Omega reproduced at t = 1; scaling identity at t in {2, -1, 1+i}")
def test_criterion_8_rescaling():
    rng = random.Random(8)
    for k in range(20):
        n = rng.randint(2, 4)
        V = ("x", "y", "z", "w")[:n]
        nu = rng.randint(1, 3)
        Pot = rand_poly(rng, V, nu + 1, 4, homogeneous=nu + 1)
        while not Pot:
            Pot = rand_poly(rng, V, nu + 1, 4, homogeneous=nu + 1)
        Omega = d(Pot)
        top = nu + rng.randint(0, 3)
        for j in range(nu + 1, top + 1):
            Omega = Omega + PForm.one_form([rand_poly(rng, V, j, 2, homogeneous=j) for _ in V])
        K = Omega.degree - nu
        w = rescale_deformation(Omega, nu, K)
        assert w.at(1) == Omega
        for j, part in Omega.homogeneous_components().items():
            for t in (as_scalar(2), as_scalar(-1), GaussianRational(1, 1)):
                assert scale_pullback(part, t) == part * t ** (j + 1)


if __name__ == "__main__":
    import subprocess
    import sys

    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q", "-p", "no:cacheprovider"]))
