"""Relative closedness and the polynomial decomposition ``w = a df + dh + f sum lam_j theta_j``.

The fiber ``f = f_1 ... f_{r+1}`` is described by a :class:`FactoredFiber`.
Generators ``theta_j = sum_k L[j][k] df_k/f_k`` default to ``df_j/f_j``
for ``j = 1..r``.  :func:`decompose` solves for ``(a, h, lam)`` by exact
linear algebra over the monomial coefficients and returns the canonical
representative whose ``h`` is Hermitian-orthogonal to ``f`` in the monomial
basis (the solution set always contains the line ``(-c, c f, 0)``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    ContextError,
    DegreeBoundError,
    FiberError,
    NoSolutionError,
    SamplingFailure,
)
from .forms import LogForm, PForm, d
from .linalg import determinant, solve_exact
from .polynomial import Polynomial, grlex_key, monomials_up_to
from .scalars import ONE, ZERO, GaussianRational, as_scalar

__all__ = [
    "FactoredFiber",
    "Decomposition",
    "ClosednessCheck",
    "Multiple",
    "NotInvariant",
    "ProbeReport",
    "relatively_closed",
    "decompose",
    "divisibility_lemma_check",
    "transversality_probe",
    "is_squarefree",
]


# -- reducedness probe ---------------------------------------------------------


def _trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def _urem(a: list, b: list) -> list:
    a = list(a)
    lead_inv = b[-1].inverse()
    while len(a) >= len(b) and a:
        q = a[-1] * lead_inv
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[i + shift] = a[i + shift] - q * bi
        a.pop()
        _trim(a)
    return a


def _ugcd_degree(a: list, b: list) -> int:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _urem(a, b)
    return len(a) - 1


def _restrict_to_line(f: Polynomial, base: Sequence[int], direction: Sequence[int]) -> list:
    s = Polynomial.variable(0, ("s",))
    subs = [Polynomial.constant(b, ("s",)) + s.scale(v) for b, v in zip(base, direction)]
    g = f.compose(subs)
    coeffs = [ZERO] * (g.max_degree_in(0) + 1)
    for (k,), c in g.terms.items():
        coeffs[k] = c
    return coeffs


def is_squarefree(f: Polynomial, *, lines: int = 3, seed: int = 0) -> bool:
    """Probabilistic squarefreeness test via restrictions to random lines.

    A squarefree restriction certifies ``f`` squarefree whenever the line is
    generic for ``f``; a repeated factor ``u^2`` always survives restriction
    unless the line direction is a zero of ``u``'s top form.
    """
    if f.is_constant():
        return True
    rng = random.Random(seed)
    n = f.nvars
    tried = 0
    while tried < lines:
        base = [rng.randint(-7, 7) for _ in range(n)]
        direction = [rng.randint(-7, 7) for _ in range(n)]
        g = _restrict_to_line(f, base, direction)
        if len(g) - 1 != f.degree:
            continue  # direction is a zero of the top form
        tried += 1
        dg = [g[k] * k for k in range(1, len(g))]
        if _ugcd_degree(g, dg) == 0:
            return True
    return False


# -- fibers --------------------------------------------------------------------


@dataclass(frozen=True)
class FactoredFiber:
    """``f = prod(factors)`` with user-asserted irreducible, pairwise coprime factors."""

    factors: tuple[Polynomial, ...]
    lambda_matrix: tuple[tuple[GaussianRational, ...], ...] | None = None
    seed: int = 0

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise FiberError("a fiber needs at least one factor")
        vars = factors[0].vars
        for k, g in enumerate(factors):
            if not isinstance(g, Polynomial):
                raise FiberError(f"factor {k} is not a polynomial")
            if g.vars != vars:
                raise FiberError("factors must share one variable context")
            if not g or g.is_constant():
                raise FiberError(f"factor {k} ({g}) must be non-constant")
            if not g.is_homogeneous():
                raise FiberError(f"factor {k} ({g}) is not homogeneous")
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                a, b = factors[i], factors[j]
                if a.degree == b.degree and a * b.leading_term()[1] == b * a.leading_term()[1]:
                    raise FiberError(f"factors {i} and {j} are proportional: f is not reduced")
        object.__setattr__(self, "factors", factors)
        if not is_squarefree(self.f, seed=self.seed):
            raise FiberError(f"f = {self.f} has a repeated factor (not reduced or factors not coprime)")
        r = len(factors) - 1
        if self.lambda_matrix is None:
            matrix = tuple(
                tuple(ONE if k == j else ZERO for k in range(r + 1)) for j in range(r)
            )
        else:
            matrix = tuple(tuple(as_scalar(v) for v in row) for row in self.lambda_matrix)
            if len(matrix) != r or any(len(row) != r + 1 for row in matrix):
                raise FiberError(f"lambda_matrix must be {r} x {r + 1}")
        object.__setattr__(self, "lambda_matrix", matrix)
        square = [tuple(ONE for _ in range(r + 1))] + list(matrix)
        if not determinant(square):
            raise FiberError("generators are not independent of df/f: (P-1) determinant vanishes")

    @property
    def vars(self) -> tuple[str, ...]:
        return self.factors[0].vars

    @property
    def r(self) -> int:
        return len(self.factors) - 1

    @cached_property
    def f(self) -> Polynomial:
        out = Polynomial.constant(ONE, self.vars)
        for g in self.factors:
            out = out * g
        return out

    @property
    def nu(self) -> int:
        """``deg f - 1`` (so ``deg df = nu``)."""
        return self.f.degree - 1

    @property
    def default_generators(self) -> bool:
        r = self.r
        return self.lambda_matrix == tuple(
            tuple(ONE if k == j else ZERO for k in range(r + 1)) for j in range(r)
        )

    def thetas(self) -> list[LogForm]:
        return [LogForm(tuple(zip(row, self.factors))) for row in self.lambda_matrix]

    def cofactor(self, k: int) -> Polynomial:
        """``f / f_k``."""
        out = Polynomial.constant(ONE, self.vars)
        for l, g in enumerate(self.factors):
            if l != k:
                out = out * g
        return out

    def generator_forms(self) -> tuple[PForm, ...]:
        """Cleared generators ``f * theta_j = sum_k L[j][k] (f/f_k) df_k``."""
        return self._generator_forms

    @cached_property
    def _generator_forms(self) -> tuple[PForm, ...]:
        dfs = [d(g) for g in self.factors]
        cof = [self.cofactor(k) for k in range(len(self.factors))]
        out = []
        for row in self.lambda_matrix:
            acc = PForm.zero(self.vars, 1)
            for k, lam in enumerate(row):
                if lam:
                    acc = acc + dfs[k] * cof[k].scale(lam)
            out.append(acc)
        return tuple(out)

    def to_json(self) -> dict:
        out = {"factors": [g.to_json() for g in self.factors]}
        if not self.default_generators:
            out["lambda_matrix"] = [[v.to_pair() for v in row] for row in self.lambda_matrix]
        return out

    @classmethod
    def from_json(cls, data, vars: Sequence[str] | None = None, *, seed: int = 0) -> "FactoredFiber":
        factors = tuple(Polynomial.from_json(g, vars) for g in data["factors"])
        matrix = data.get("lambda_matrix")
        if matrix is not None:
            matrix = tuple(tuple(_scalar_from_json(v) for v in row) for row in matrix)
        return cls(factors, matrix, seed=seed)


def _scalar_from_json(v) -> GaussianRational:
    if isinstance(v, (list, tuple)):
        return GaussianRational.from_pair(v)
    return as_scalar(str(v) if isinstance(v, float) else v)


# -- relative closedness -------------------------------------------------------


class ClosednessCheck(NamedTuple):
    closed: bool
    defect: PForm


def relatively_closed(omega: PForm, f: Polynomial) -> ClosednessCheck:
    """Exact test of ``d(omega) ^ df = 0``."""
    if omega.p != 1:
        raise ContextError(f"expected a 1-form, got p={omega.p}")
    defect = omega.d().wedge(d(f))
    return ClosednessCheck(not defect, defect)


# -- decomposition -------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    a: GaussianRational
    h: Polynomial
    lambdas: tuple[GaussianRational, ...]
    kernel_dim: int

    @property
    def obstructed(self) -> bool:
        return any(self.lambdas)

    def reconstruct(self, fiber: FactoredFiber) -> PForm:
        out = d(fiber.f) * self.a + d(self.h)
        for lam, g in zip(self.lambdas, fiber.generator_forms()):
            out = out + g * lam
        return out

    def to_json(self) -> dict:
        return {
            "a": self.a.to_pair(),
            "h": self.h.to_json(),
            "lambda": [v.to_pair() for v in self.lambdas],
            "kernel_dim": self.kernel_dim,
        }


def _row_label(vars, comp: int, exps) -> str:
    mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(vars, exps) if k) or "1"
    return f"coeff of {mono} in d{vars[comp]}"


def decompose(omega: PForm, fiber: FactoredFiber) -> Decomposition:
    """Solve ``omega = a df + dh + sum_j lam_j f theta_j`` with ``deg h <= nu + 1``."""
    if omega.p != 1:
        raise ContextError(f"expected a 1-form, got p={omega.p}")
    if omega.vars != fiber.vars:
        raise ContextError(f"form over {omega.vars}, fiber over {fiber.vars}")
    nu = fiber.nu
    if omega.degree > nu:
        raise DegreeBoundError(
            f"deg(omega) = {omega.degree} exceeds deg(df) = {nu}", degree=omega.degree, bound=nu
        )
    f = fiber.f
    n = omega.nvars
    h_monos = monomials_up_to(n, nu + 1, start=1)
    columns: list[PForm] = [d(f), *fiber.generator_forms()]
    columns += [d(Polynomial.monomial(m, omega.vars)) for m in h_monos]
    r = fiber.r

    keys: dict[tuple, dict[int, GaussianRational]] = {}
    for col, form in enumerate(columns):
        for (i,), poly in form.components.items():
            for e, c in poly.terms.items():
                keys.setdefault((i, e), {})[col] = c
    rhs_map: dict[tuple, GaussianRational] = {}
    for (i,), poly in omega.components.items():
        for e, c in poly.terms.items():
            keys.setdefault((i, e), {})
            rhs_map[(i, e)] = c
    order = sorted(keys, key=lambda k: (k[0], grlex_key(k[1])))
    rows = [keys[k] for k in order]
    rhs = [rhs_map.get(k, ZERO) for k in order]
    labels = [_row_label(omega.vars, i, e) for i, e in order]

    try:
        sol = solve_exact(rows, rhs, len(columns), labels)
    except NoSolutionError as exc:
        raise NoSolutionError(
            "no decomposition a*df + dh + f*sum(lam*theta): omega is not relatively closed "
            "or the fiber hypotheses fail",
            first_row=exc.first_row,
            certificate=exc.certificate,
            residual=exc.residual,
        ) from None

    u = sol.particular
    a = u[0]
    lambdas = tuple(u[1:1 + r])
    h = Polynomial(omega.vars, {m: u[1 + r + k] for k, m in enumerate(h_monos) if u[1 + r + k]})
    # canonical representative: remove the component of h along f
    c = h.hermitian_dot(f) / f.hermitian_dot(f)
    if c:
        h = h - f.scale(c)
        a = a + c
    result = Decomposition(a, h, lambdas, sol.kernel_dim)
    if result.reconstruct(fiber) != omega:  # pragma: no cover - guards solver bugs
        raise AssertionError("decomposition failed its reconstruction identity")
    return result


# -- divisibility lemma --------------------------------------------------------


@dataclass(frozen=True)
class Multiple:
    lam: GaussianRational

    def to_json(self) -> dict:
        return {"kind": "Multiple", "lambda": self.lam.to_pair()}


@dataclass(frozen=True)
class NotInvariant:
    component: str
    remainder: Polynomial

    def to_json(self) -> dict:
        return {"kind": "NotInvariant", "component": self.component, "remainder": self.remainder.to_json()}


def divisibility_lemma_check(h: Polynomial, f: Polynomial) -> Multiple | NotInvariant:
    """Decide ``f | dh ^ df``; for reduced homogeneous ``f`` this means ``h = lam f``."""
    if h.vars != f.vars:
        raise ContextError("h and f live over different variables")
    if not f.is_homogeneous() or not h.is_homogeneous(f.degree):
        raise DegreeBoundError(
            "h and f must be homogeneous of the same degree", degree=h.degree, bound=f.degree
        )
    form = d(h).wedge(d(f))
    for idx in sorted(form.components):
        q, rem = form.components[idx].divmod(f)
        if rem:
            return NotInvariant(form.key_name(idx), rem)
    if not h:
        return Multiple(ZERO)
    m, c = f.leading_term()
    lam = h.coefficient(m) / c
    if h != f.scale(lam):
        raise FiberError(
            "f divides dh^df but h is not a multiple of f: f is not reduced or not a product of coprime irreducibles"
        )
    return Multiple(lam)


# -- transversality probe ------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    """Heuristic only: pointwise rank checks, never a proof of normal crossings."""

    pairs: tuple[dict, ...]
    samples: int
    seed: int
    heuristic: bool = field(default=True)

    @property
    def passed(self) -> bool:
        return all(p["failed"] == 0 for p in self.pairs)

    def to_json(self) -> dict:
        return {
            "heuristic": True,
            "passed": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "pairs": [dict(p) for p in self.pairs],
        }


def _project_to_intersection(funcs, grads, z, iters=60):
    for _ in range(iters):
        F = np.array([g(z) for g in funcs], dtype=complex)
        J = np.array([[gi(z) for gi in grad] for grad in grads], dtype=complex)
        if np.linalg.norm(F) < 1e-13:
            return z, J
        step, *_ = np.linalg.lstsq(J, F, rcond=None)
        z = z - step
        norm = np.linalg.norm(z)
        if norm < 1e-12:
            return None, None
        z = z / norm  # zero sets of homogeneous factors are cones
    return None, None


def transversality_probe(
    fiber: FactoredFiber,
    samples: int = 16,
    seed: int = 0,
    *,
    rank_tol: float = 1e-6,
    max_retries: int = 20,
) -> ProbeReport:
    """Sample points on ``f_i = f_j = 0`` and test independence of ``df_i, df_j`` there."""
    rng = np.random.default_rng(seed)
    n = len(fiber.vars)
    evals = [lambda z, g=g: g.evaluate(list(z)) for g in fiber.factors]
    grads = [
        [lambda z, p=g.diff(k): p.evaluate(list(z)) for k in range(n)] for g in fiber.factors
    ]
    pairs = []
    for i in range(len(fiber.factors)):
        for j in range(i + 1, len(fiber.factors)):
            if n < 3:
                # two coprime homogeneous factors in the plane meet only at 0
                pairs.append({"pair": [i, j], "passed": 0, "failed": 0, "vacuous": True})
                continue
            passed = failed = 0
            retries = 0
            while passed + failed < samples:
                z0 = rng.normal(size=n) + 1j * rng.normal(size=n)
                z, J = _project_to_intersection([evals[i], evals[j]], [grads[i], grads[j]], z0 / np.linalg.norm(z0))
                if z is None:
                    retries += 1
                    if retries > max_retries * samples:
                        raise SamplingFailure(f"could not sample the intersection of factors {i} and {j}")
                    continue
                sv = np.linalg.svd(J, compute_uv=False)
                if sv[-1] > rank_tol * max(sv[0], 1e-300):
                    passed += 1
                else:
                    failed += 1
            pairs.append({"pair": [i, j], "passed": passed, "failed": failed, "vacuous": False})
    return ProbeReport(tuple(pairs), samples, seed)
