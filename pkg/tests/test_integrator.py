import math
import random

import pytest

from intdeform.cohomology import FactoredFiber
from intdeform.deformation import DeformationSeries
from intdeform.errors import (
    AnsatzFailure,
    DecompositionFailure,
    DegreeBoundError,
    HypothesisError,
    NotExactError,
    NotIntegrableError,
)
from intdeform.forms import PForm, d
from intdeform.integrator import (
    ClosedQuotient,
    ExactCase,
    FirstIntegralSeries,
    Obstructed,
    PullbackCase,
    ZeroContraction,
    _solve_ansatz,
    classify_degree_one,
    radial_test,
    reconstruct_first_integral,
    rescale_deformation,
    rescaling_potential,
    scale_pullback,
)
from intdeform.periods import standard_torus_cycle
from intdeform.polynomial import parse_polynomial
from intdeform.scalars import ONE, GaussianRational, as_scalar

from randgen import rand_poly

V2 = ("x", "y")
V3 = ("x", "y", "z")


def P(s, vars=V2):
    return parse_polynomial(s, vars)


def example_w1(lam):
    return PForm.one_form([P("y").scale(-as_scalar(lam)), P("x")])


def xy_fiber():
    return FactoredFiber((P("x"), P("y")))


# -- reconstruction --------------------------------------------------------------


def test_exact_family_reconstructed():
    rng = random.Random(2)
    fb = FactoredFiber(tuple(P(v, V3) for v in V3))
    for _ in range(5):
        hs = [rand_poly(rng, V3, fb.nu + 1, 4, min_deg=1) for _ in range(2)]
        w = DeformationSeries([d(fb.f)] + [d(h) for h in hs])
        F = reconstruct_first_integral(w, fb)
        assert isinstance(F, FirstIntegralSeries)
        assert F.d() == w
        # F_j and h_j differ by a multiple of f at most
        for Fj, hj in zip(F.coeffs[1:], hs):
            assert (Fj - hj).divides_by(fb.f)[0]
        assert all(c.degree <= fb.nu + 1 for c in F.coeffs)


def test_example_with_lambda_minus_one():
    w = DeformationSeries([d(P("x*y")), example_w1(-1)])
    F = reconstruct_first_integral(w, xy_fiber())
    assert F.coeffs == (P("x*y"), P("x*y"))
    assert F.at(1) == P("2*x*y")


def test_example_with_lambda_two_is_obstructed():
    w = DeformationSeries([d(P("x*y")), example_w1(2)])
    out = reconstruct_first_integral(w, xy_fiber(), [standard_torus_cycle(xy_fiber(), 1)])
    assert isinstance(out, Obstructed)
    assert out.order == 1
    assert out.lambdas == (GaussianRational(-3),)
    (p,) = out.periods
    measured, predicted = complex(*p["measured"]), complex(*p["predicted"])
    assert abs(measured - (-3) * 2j * math.pi) < 1e-9
    assert abs(measured - predicted) < 1e-9


def test_reconstruct_preconditions():
    fb = FactoredFiber((P("y"),))
    with pytest.raises(DegreeBoundError):
        reconstruct_first_integral(DeformationSeries([d(P("y")), PForm.one_form([P("y"), P("0")])]), fb)
    with pytest.raises(HypothesisError):
        reconstruct_first_integral(DeformationSeries([d(P("x")), d(P("y"))]), fb)


def test_reconstruct_not_relatively_closed():
    fb = FactoredFiber((P("x", V3), P("y", V3)))
    w = DeformationSeries([d(fb.f), PForm.one_form([P("z", V3), P("0", V3), P("0", V3)])])
    with pytest.raises(DecompositionFailure) as info:
        reconstruct_first_integral(w, fb)
    assert info.value.order == 1


# -- degree-one classification ---------------------------------------------------


def test_classify_example_pullback():
    for lam in (0, 2, "3+I"):
        out = classify_degree_one(xy_fiber(), example_w1(lam))
        assert isinstance(out, PullbackCase) and out.verified
        assert out.mu == ONE
        assert out.lam == -(ONE + as_scalar(lam))
        assert not out.P and not out.Q
        assert out.emitted() == DeformationSeries([d(P("x*y")), example_w1(lam)])


def test_classify_example_exact():
    out = classify_degree_one(xy_fiber(), example_w1(-1))
    assert isinstance(out, ExactCase) and out.verified
    assert out.first_integral.coeffs == (P("x*y"), P("x*y"))


def _alpha1(mu, lam, Pc, Qc):
    X, Y = P("x"), P("y")
    return d(X * Y) * as_scalar(mu) + d(P(Pc) + P(Qc)) + PForm.one_form([Y.scale(as_scalar(lam)), P("0")])


def test_classify_cubic_quadratic_roundtrip():
    f1, f2 = P("x^3+y^3+z^3", V3), P("x*y+z^2", V3)
    fb = FactoredFiber((f1, f2))
    # admissible supports: deg f1 = 3 allows P linear, deg f2 = 2 allows Q up to y^2
    w1 = _alpha1(3, 5, "x", "y^2").pullback([f1, f2])
    out = classify_degree_one(fb, w1)
    assert isinstance(out, PullbackCase)
    assert (out.mu, out.lam) == (GaussianRational(3), GaussianRational(5))
    assert out.P == P("x") and out.Q == P("y^2")
    assert out.emitted().coeffs[1] == w1


def test_classify_rejects_degree_growth():
    # P = x^2, Q = y^3 over deg f1 = 3, deg f2 = 2 gives deg w1 = 5 > deg df = 4
    f1, f2 = P("x^3+y^3+z^3", V3), P("x*y+z^2", V3)
    w1 = _alpha1(1, 2, "x^2", "y^3").pullback([f1, f2])
    with pytest.raises(DegreeBoundError):
        classify_degree_one(FactoredFiber((f1, f2)), w1)


def test_classify_preconditions():
    fb = FactoredFiber((P("x", V3), P("y", V3)))
    with pytest.raises(NotIntegrableError):
        classify_degree_one(fb, PForm.one_form([P("z", V3), P("0", V3), P("0", V3)]))
    with pytest.raises(HypothesisError):
        classify_degree_one(FactoredFiber((P("x", V3),)), d(P("x", V3)))


def test_ansatz_failure_reported():
    with pytest.raises(AnsatzFailure):
        _solve_ansatz(P("x", V3), P("x*y+z^2", V3), P("z", V3), 3)


# -- rescaling -------------------------------------------------------------------


def test_rescale_examples():
    Pq = P("x^2+y^2+z^2", V3)
    w = rescale_deformation(d(Pq), 1, 0)
    assert w.coeffs == (d(Pq),) and not w.truncated
    O2 = PForm.one_form([P("y*z", V3), P("x^2", V3), P("0", V3)])
    w = rescale_deformation(d(Pq) + O2, 1, 1)
    assert w.coeffs == (d(Pq), O2)
    assert rescaling_potential(d(Pq) + O2, 1) == Pq
    assert w.at(1) == d(Pq) + O2


def test_scaling_identity_at_three():
    xdy = PForm.one_form([P("0"), P("x")])
    assert scale_pullback(xdy, 3) == xdy * as_scalar(9)


def test_rescale_rejects_bad_lowest_part():
    with pytest.raises(NotExactError):
        rescale_deformation(PForm.one_form([P("-y"), P("x")]), 1, 2)
    with pytest.raises(NotExactError):
        rescale_deformation(d(P("x^2")) + PForm.one_form([P("1"), P("0")]), 1, 2)


# -- radial test -----------------------------------------------------------------


def test_radial_examples():
    f = P("x^3 + x*y*z", V3)
    assert radial_test(d(f)) == ClosedQuotient(f.scale(as_scalar(3)))
    assert radial_test(PForm.one_form([P("-y"), P("x")])) == ZeroContraction()
    a, b, c = 1, 2, 4
    w = PForm.one_form([P(f"{a}*y*z", V3), P(f"{b}*x*z", V3), P(f"{c}*x*y", V3)])
    assert radial_test(w) == ClosedQuotient(P(f"{a + b + c}*x*y*z", V3))


def test_radial_rejects_nonhomogeneous():
    with pytest.raises(HypothesisError):
        radial_test(PForm.one_form([P("x + x^2"), P("0")]))
