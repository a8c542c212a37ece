"""First integrals of deformations of ``df`` and the degree-one normal forms.

* :func:`reconstruct_first_integral` walks the orders of ``w_t`` and either
  returns ``F_t = f + sum_j t^j (a_j f + h_j)`` with ``d_x F_t = w_t`` or stops
  at the first order whose decomposition has a nonzero logarithmic part.
* :func:`classify_degree_one` sorts ``df + t w_1`` into the exact case or the
  pullback ``sigma^*(alpha_t)`` of a two-variable family along
  ``sigma = (f_1, f_2)``.
* :func:`rescale_deformation` turns a form ``Omega = dP + higher order`` into
  the family ``t^{-(nu+1)} sigma_t^*(Omega)`` for ``sigma_t(z) = t z``.
* :func:`radial_test` checks the homogeneous dichotomy through ``w(R)``.

Every positive result is re-verified with an exact identity before it is
returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .cohomology import Decomposition, FactoredFiber, decompose, relatively_closed
from .deformation import DeformationSeries
from .errors import (
    AnsatzFailure,
    ContextError,
    DecompositionFailure,
    DegreeBoundError,
    FactorizationFailure,
    HypothesisError,
    NoSolutionError,
    NotExactError,
    NotIntegrableError,
)
from .forms import PForm, d, scaling_map
from .linalg import solve_exact
from .periods import Cycle, log_period_exact, period
from .polynomial import Polynomial, grlex_key
from .scalars import ONE, ZERO, GaussianRational, as_scalar

__all__ = [
    "FirstIntegralSeries",
    "Obstructed",
    "ExactCase",
    "PullbackCase",
    "ClassificationResult",
    "ZeroContraction",
    "ClosedQuotient",
    "Neither",
    "reconstruct_first_integral",
    "classify_degree_one",
    "rescale_deformation",
    "rescaling_potential",
    "scale_pullback",
    "radial_test",
]


# -- result types ----------------------------------------------------------------


@dataclass(frozen=True)
class FirstIntegralSeries:
    """``F_t = sum_j t^j F_j`` with polynomial coefficients."""

    coeffs: tuple[Polynomial, ...]
    truncated: bool = False

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @property
    def vars(self) -> tuple[str, ...]:
        return self.coeffs[0].vars

    def d(self) -> DeformationSeries:
        return DeformationSeries([d(c) for c in self.coeffs], truncated=self.truncated)

    def at(self, t) -> Polynomial:
        t = as_scalar(t)
        acc, power = Polynomial.zero(self.vars), ONE
        for c in self.coeffs:
            acc = acc + c.scale(power)
            power = power * t
        return acc

    def to_json(self) -> dict:
        return {"K": self.K, "truncated": self.truncated, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data, vars=None) -> "FirstIntegralSeries":
        return cls(tuple(Polynomial.from_json(c, vars) for c in data["coeffs"]), bool(data.get("truncated", False)))


@dataclass(frozen=True)
class Obstructed:
    """Exact witness (nonzero logarithmic coefficients) plus optional numeric periods."""

    order: int
    lambdas: tuple[GaussianRational, ...]
    decomposition: Decomposition
    periods: tuple[dict, ...] = ()
    kind: str = field(default="Obstructed", init=False)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "lambda": [v.to_pair() for v in self.lambdas],
            "decomposition": self.decomposition.to_json(),
            "periods": [dict(p) for p in self.periods],
        }


@dataclass(frozen=True)
class ExactCase:
    """``w_t = d(f + t h)``."""

    h: Polynomial
    first_integral: FirstIntegralSeries
    verified: bool
    kind: str = field(default="ExactCase", init=False)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "h": self.h.to_json(),
            "F_t": self.first_integral.to_json(),
            "verified": self.verified,
        }


@dataclass(frozen=True)
class PullbackCase:
    """``w_t = sigma^*(alpha_t)``, ``alpha_t = (1 + t mu) d(xy) + t d(P(x) + Q(y)) + t lam y dx``."""

    mu: GaussianRational
    lam: GaussianRational
    P: Polynomial
    Q: Polynomial
    sigma: tuple[Polynomial, Polynomial]
    alpha: DeformationSeries
    verified: bool
    kind: str = field(default="PullbackCase", init=False)

    def emitted(self) -> DeformationSeries:
        """``sigma^*(alpha_t)`` recomputed from the stored normal form."""
        return DeformationSeries([c.pullback(list(self.sigma)) for c in self.alpha.coeffs])

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "mu": self.mu.to_pair(),
            "lambda": self.lam.to_pair(),
            "P": self.P.to_json(),
            "Q": self.Q.to_json(),
            "sigma": [s.to_json() for s in self.sigma],
            "alpha_t": self.alpha.to_json(),
            "verified": self.verified,
        }


ClassificationResult = Union[ExactCase, PullbackCase, Obstructed]


# -- first-integral reconstruction ----------------------------------------------


def _check_base(w: DeformationSeries, fiber: FactoredFiber) -> None:
    if w.vars != fiber.vars:
        raise ContextError(f"deformation over {w.vars}, fiber over {fiber.vars}")
    if w.p != 1:
        raise ContextError(f"expected a series of 1-forms, got p={w.p}")
    df = d(fiber.f)
    if w.coeffs[0] != df:
        raise HypothesisError("order-0 coefficient is not df", witness=w.coeffs[0] - df)
    nu = fiber.nu
    for j, c in enumerate(w.coeffs):
        if c.degree > nu:
            raise DegreeBoundError(
                f"deg(w_{j}) = {c.degree} exceeds deg(w_0) = {nu}", order=j, degree=c.degree, bound=nu
            )


def _period_crosscheck(wj: PForm, dec: Decomposition, fiber: FactoredFiber, cycles: Sequence[Cycle], **kw) -> tuple[dict, ...]:
    thetas = fiber.thetas()
    out = []
    for idx, gamma in enumerate(cycles):
        measured = period(wj, gamma, fiber.f, **kw)
        predicted = 0j
        for lam, theta in zip(dec.lambdas, thetas):
            if lam:
                predicted += complex(lam) * log_period_exact(theta, gamma).value
        predicted *= gamma.c
        out.append({
            "cycle": idx,
            "measured": [measured.value.real, measured.value.imag],
            "predicted": [predicted.real, predicted.imag],
            "err": measured.err,
        })
    return tuple(out)


def reconstruct_first_integral(
    w: DeformationSeries,
    fiber: FactoredFiber,
    cycles: Sequence[Cycle] = (),
    **period_options,
) -> FirstIntegralSeries | Obstructed:
    """Order-by-order ``w_j = a_j df + dh_j + sum_k lam_jk f theta_k``; exact iff all ``lam = 0``."""
    _check_base(w, fiber)
    f = fiber.f
    coeffs = [f]
    for j in range(1, w.K + 1):
        wj = w.coeffs[j]
        check = relatively_closed(wj, f)
        if not check.closed:
            # lower orders are exact here, so the order-j equation reduces to df^d(w_j) = 0
            raise DecompositionFailure(
                f"order {j}: d(w_{j})^df != 0, the family is not integrable at this order",
                order=j,
                witness=check.defect,
            )
        try:
            dec = decompose(wj, fiber)
        except NoSolutionError as exc:
            raise DecompositionFailure(f"order {j}: {exc}", order=j, cause=exc) from None
        if dec.obstructed:
            periods = _period_crosscheck(wj, dec, fiber, cycles, **period_options) if cycles else ()
            return Obstructed(j, dec.lambdas, dec, periods)
        coeffs.append(f.scale(dec.a) + dec.h)
    result = FirstIntegralSeries(tuple(coeffs), truncated=w.truncated)
    if result.d() != w:  # pragma: no cover - guards solver bugs
        raise AssertionError("reconstructed first integral fails d_x F_t = w_t")
    return result


# -- degree-one classification ---------------------------------------------------


def _solve_ansatz(h: Polynomial, f1: Polynomial, f2: Polynomial, bound: int):
    """Write ``h = sum c_ij f1^i f2^j`` over ``i deg f1 + j deg f2 <= bound``."""
    n1, n2 = f1.degree, f2.degree
    exps = [
        (i, j)
        for i in range(bound // n1 + 1)
        for j in range(bound // n2 + 1)
        if (i, j) != (0, 0) and i * n1 + j * n2 <= bound
    ]
    columns = [(f1 ** i) * (f2 ** j) for i, j in exps]
    keys: dict = {}
    for col, poly in enumerate(columns):
        for e, c in poly.terms.items():
            keys.setdefault(e, {})[col] = c
    for e in h.terms:
        keys.setdefault(e, {})
    order = sorted(keys, key=grlex_key)
    try:
        sol = solve_exact(
            [keys[e] for e in order], [h.coefficient(e) for e in order], len(columns), [str(e) for e in order]
        )
    except NoSolutionError as exc:
        raise AnsatzFailure(
            f"h = {h} is not a polynomial in (f1, f2) within degree {bound}"
        ) from exc
    return dict(zip(exps, sol.particular))


def classify_degree_one(fiber: FactoredFiber, omega1: PForm) -> ExactCase | PullbackCase:
    """Normal form of the degree-one deformation ``df + t w_1`` for ``f = f_1 f_2``."""
    if fiber.r != 1:
        raise HypothesisError(f"degree-one classification needs exactly two factors, got {fiber.r + 1}")
    if omega1.vars != fiber.vars or omega1.p != 1:
        raise ContextError("w_1 must be a 1-form over the fiber's variables")
    if not fiber.default_generators:
        fiber = FactoredFiber(fiber.factors, seed=fiber.seed)
    f = fiber.f
    f1, f2 = fiber.factors
    nu = fiber.nu
    df = d(f)
    if omega1.degree > nu:
        raise DegreeBoundError(f"deg(w_1) = {omega1.degree} exceeds deg(df) = {nu}", order=1, degree=omega1.degree, bound=nu)
    first = df.wedge(omega1.d())
    if first:
        raise NotIntegrableError("df ^ d(w_1) != 0", witness=first)
    second = omega1.wedge(omega1.d())
    if second:
        raise NotIntegrableError("w_1 ^ d(w_1) != 0", witness=second)

    dec = decompose(omega1, fiber)
    lam = dec.lambdas[0]
    if not lam:
        h_tilde = f.scale(dec.a) + dec.h
        F = FirstIntegralSeries((f, h_tilde))
        verified = F.d() == DeformationSeries([df, omega1])
        if not verified:  # pragma: no cover
            raise AssertionError("exact case failed d(f + t h) = w_t")
        return ExactCase(h_tilde, F, verified)

    triple = d(dec.h).wedge(d(f1)).wedge(d(f2))
    if triple:
        raise FactorizationFailure("dh ^ df1 ^ df2 != 0", witness=triple)
    coeffs = _solve_ansatz(dec.h, f1, f2, nu + 1)

    xy = ("x", "y")
    X, Y = Polynomial.variable(0, xy), Polynomial.variable(1, xy)
    mu = dec.a + coeffs.get((1, 1), ZERO)
    P = Polynomial(xy, {(i, 0): c for (i, j), c in coeffs.items() if j == 0})
    Q = Polynomial(xy, {(0, j): c for (i, j), c in coeffs.items() if i == 0})
    leftover = {k: c for k, c in coeffs.items() if k[0] and k[1] and k != (1, 1) and c}
    if leftover:  # pragma: no cover - excluded by the degree count
        raise AnsatzFailure(f"mixed terms {sorted(leftover)} outside the normal form")
    alpha0 = d(X * Y)
    alpha1 = d(X * Y) * mu + d(P + Q) + PForm.one_form([Y.scale(lam), Polynomial.zero(xy)])
    alpha = DeformationSeries([alpha0, alpha1])
    sigma = (f1, f2)
    verified = alpha0.pullback(list(sigma)) == df and alpha1.pullback(list(sigma)) == omega1
    if not verified:  # pragma: no cover
        raise AssertionError("pullback case failed sigma^*(alpha_t) = w_t")
    return PullbackCase(mu, lam, P, Q, sigma, alpha, verified)


# -- rescaling -------------------------------------------------------------------


def scale_pullback(form: PForm, t) -> PForm:
    """``sigma_t^*(form)`` for ``sigma_t(z) = t z``."""
    return form.pullback(scaling_map(t, form.vars))


def _lowest_part(Omega: PForm, nu: int) -> tuple[dict[int, PForm], PForm]:
    if Omega.p != 1:
        raise ContextError(f"rescaling needs a 1-form, got p={Omega.p}")
    parts = Omega.homogeneous_components()
    below = [k for k in parts if k < nu]
    if below:
        raise NotExactError(f"Omega has terms of degree {below} below nu = {nu}", witness=parts[below[0]])
    low = parts.get(nu)
    if low is None:
        raise NotExactError(f"Omega has no degree-{nu} part dP")
    if low.d():
        raise NotExactError(f"degree-{nu} part of Omega is not closed, hence not dP", witness=low.d())
    return parts, low


def rescaling_potential(Omega: PForm, nu: int) -> Polynomial:
    """``P`` with ``dP = Omega_nu``, via the Euler identity ``P = Omega_nu(R)/(nu+1)``."""
    _, low = _lowest_part(Omega, nu)
    return low.interior_radial().scale(as_scalar(Fraction(1, nu + 1)))


def rescale_deformation(Omega: PForm, nu: int, K: int) -> DeformationSeries:
    """``w_t = t^{-(nu+1)} sigma_t^*(Omega) = dP + sum_{j>nu} t^{j-nu} Omega_j``, truncated at ``K``."""
    if K < 0:
        raise ValueError("truncation order must be non-negative")
    parts, low = _lowest_part(Omega, nu)
    probe = as_scalar(2)
    for j, part in parts.items():
        if scale_pullback(part, probe) != part * probe ** (j + 1):  # pragma: no cover
            raise AssertionError(f"scaling identity failed in degree {j}")
    vars = Omega.vars
    coeffs = [parts.get(nu + k, PForm.zero(vars, 1)) for k in range(K + 1)]
    truncated = max(parts) > nu + K
    return DeformationSeries(coeffs, truncated=truncated)


# -- homogeneous radial test -----------------------------------------------------


@dataclass(frozen=True)
class ZeroContraction:
    kind: str = field(default="ZeroContraction", init=False)

    def to_json(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class ClosedQuotient:
    """``w / w(R)`` is closed; ``g = w(R)``."""

    g: Polynomial
    kind: str = field(default="ClosedQuotient", init=False)

    def to_json(self) -> dict:
        return {"kind": self.kind, "g": self.g.to_json()}


@dataclass(frozen=True)
class Neither:
    g: Polynomial
    defect: PForm
    kind: str = field(default="Neither", init=False)

    def to_json(self) -> dict:
        return {"kind": self.kind, "g": self.g.to_json(), "defect": self.defect.to_json()}


def radial_test(omega: PForm) -> ZeroContraction | ClosedQuotient | Neither:
    if omega.p != 1:
        raise ContextError(f"radial test needs a 1-form, got p={omega.p}")
    if not omega.is_homogeneous():
        raise HypothesisError("radial test needs a homogeneous 1-form", witness=omega)
    dw = omega.d()
    integ = omega.wedge(dw)
    if integ:
        raise NotIntegrableError("w ^ dw != 0", witness=integ)
    g = omega.interior_radial()
    if not g:
        return ZeroContraction()
    # d(w/g) = (g dw - dg ^ w) / g^2
    defect = dw * g - d(g).wedge(omega)
    if not defect:
        return ClosedQuotient(g)
    return Neither(g, defect)
