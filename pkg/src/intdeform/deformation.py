"""Deformations ``w_t = w_0 + t w_1 + ... + t^K w_K`` and their integrability defects.

A :class:`DeformationSeries` is either *terminating* (the family is a
polynomial in ``t`` and every coefficient past ``K`` is zero, so statements
hold for all ``t``) or *truncated* (only orders ``<= K`` are known).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ContextError, HypothesisError
from .forms import PForm, d
from .polynomial import Polynomial
from .scalars import ONE, as_scalar

__all__ = [
    "DeformationSeries",
    "IntegrabilityReport",
    "DeformationEquation",
    "integrability_defects",
    "deformation_equations",
]


class DeformationSeries:
    __slots__ = ("vars", "coeffs", "truncated")

    def __init__(self, coeffs: Sequence[PForm], *, truncated: bool = False):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a deformation series needs at least the order-0 coefficient")
        vars = coeffs[0].vars
        ps = {c.p for c in coeffs if c}
        for c in coeffs:
            if not isinstance(c, PForm):
                raise TypeError(f"series coefficients must be PForm, got {type(c).__name__}")
            if c.vars != vars:
                raise ContextError("series coefficients must share one variable context")
        if len(ps) > 1:
            raise ContextError(f"series mixes form degrees {sorted(ps)}")
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "truncated", bool(truncated))

    def __setattr__(self, name, value):
        raise AttributeError("DeformationSeries is immutable")

    @classmethod
    def polynomial_family(cls, *coeffs: PForm) -> "DeformationSeries":
        return cls(coeffs, truncated=False)

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @property
    def p(self) -> int:
        return next((c.p for c in self.coeffs if c), self.coeffs[0].p)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, j: int) -> PForm:
        return self.coeffs[j]

    def coeff(self, j: int) -> PForm:
        if j <= self.K:
            return self.coeffs[j]
        if self.truncated:
            raise IndexError(f"order {j} is beyond the truncation order {self.K}")
        return PForm.zero(self.vars, self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeformationSeries):
            return NotImplemented
        return (self.vars, self.coeffs, self.truncated) == (other.vars, other.coeffs, other.truncated)

    def __hash__(self) -> int:
        return hash((self.vars, self.coeffs, self.truncated))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, K: int) -> "DeformationSeries":
        if K >= self.K:
            return self
        return DeformationSeries(self.coeffs[: K + 1], truncated=True)

    # -- series arithmetic --------------------------------------------------

    def _check(self, other: "DeformationSeries") -> None:
        if not isinstance(other, DeformationSeries):
            raise TypeError(f"expected DeformationSeries, got {type(other).__name__}")
        if other.vars != self.vars:
            raise ContextError(f"variable context mismatch: {self.vars} vs {other.vars}")

    def _sum_order(self, other: "DeformationSeries") -> tuple[int, bool]:
        known = [s.K for s in (self, other) if s.truncated]
        if known:
            return min(known), True
        return max(self.K, other.K), False

    def __add__(self, other: "DeformationSeries") -> "DeformationSeries":
        self._check(other)
        K, truncated = self._sum_order(other)
        return DeformationSeries(
            [self.coeff(j) + other.coeff(j) for j in range(K + 1)], truncated=truncated
        )

    def __neg__(self) -> "DeformationSeries":
        return DeformationSeries([-c for c in self.coeffs], truncated=self.truncated)

    def __sub__(self, other: "DeformationSeries") -> "DeformationSeries":
        return self + (-other)

    def scale(self, c) -> "DeformationSeries":
        return DeformationSeries([w * c for w in self.coeffs], truncated=self.truncated)

    def wedge(self, other: "DeformationSeries") -> "DeformationSeries":
        """Cauchy product; exact through the last order both factors determine."""
        self._check(other)
        known = [s.K for s in (self, other) if s.truncated]
        K = min(known) if known else self.K + other.K
        p = self.p + other.p
        out = []
        for k in range(K + 1):
            acc = PForm.zero(self.vars, min(p, len(self.vars)))
            for i in range(max(0, k - other.K), min(k, self.K) + 1):
                acc = acc + self.coeffs[i].wedge(other.coeffs[k - i])
            out.append(acc)
        return DeformationSeries(out, truncated=bool(known))

    def d(self) -> "DeformationSeries":
        return DeformationSeries([c.d() for c in self.coeffs], truncated=self.truncated)

    def at(self, t) -> PForm:
        """Sum ``sum_j t^j w_j`` exactly for a scalar ``t``."""
        t = as_scalar(t)
        acc = PForm.zero(self.vars, self.p)
        power = ONE
        for c in self.coeffs:
            acc = acc + c * power
            power = power * t
        return acc

    def degree_violations(self) -> list[int]:
        """Orders ``j`` with ``deg w_j > deg w_0`` (the degree-bound hypothesis)."""
        bound = self.coeffs[0].degree
        return [j for j, c in enumerate(self.coeffs) if j and c.degree > bound]

    # -- JSON ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "truncated": self.truncated,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data, vars: Sequence[str] | None = None) -> "DeformationSeries":
        coeffs = [PForm.from_json(c, vars) for c in data["coeffs"]]
        if "K" in data and int(data["K"]) != len(coeffs) - 1:
            raise ValueError(f"K={data['K']} but {len(coeffs)} coefficients given")
        return cls(coeffs, truncated=bool(data.get("truncated", False)))

    def __repr__(self) -> str:
        kind = "truncated" if self.truncated else "terminating"
        body = " + ".join(f"t^{j}[{c}]" for j, c in enumerate(self.coeffs))
        return f"DeformationSeries({kind}, K={self.K}: {body})"


@dataclass(frozen=True)
class IntegrabilityReport:
    defects: tuple[tuple[int, PForm], ...]
    exhaustive: bool  # True when the listed orders cover every power of t
    degree_violations: tuple[int, ...] = ()

    @property
    def first_nonzero(self) -> int | None:
        return next((k for k, D in self.defects if D), None)

    @property
    def integrable(self) -> bool:
        return self.first_nonzero is None

    def defect(self, k: int) -> PForm:
        return dict(self.defects)[k]

    def to_json(self) -> dict:
        orders = []
        for k, D in self.defects:
            entry = {"k": k, "vanishes": not D}
            if D:
                entry["defect"] = D.to_json()
            orders.append(entry)
        return {
            "orders": orders,
            "first_nonzero": self.first_nonzero,
            "exhaustive": self.exhaustive,
            "degree_violations": list(self.degree_violations),
        }


def _defect_orders(w: DeformationSeries) -> range:
    return range(w.K + 1) if w.truncated else range(2 * w.K + 1)


def integrability_defects(w: DeformationSeries) -> IntegrabilityReport:
    """``D_k = sum_{i+l=k} w_i ^ d(w_l)``: the t^k coefficient of ``w_t ^ d(w_t)``.

    Terminating families are expanded through order ``2K`` so that a clean
    report proves integrability for every ``t``.
    """
    if w.p != 1:
        raise ContextError(f"integrability is defined for 1-forms, got p={w.p}")
    dw = [c.d() for c in w.coeffs]
    n = len(w.vars)
    out = []
    for k in _defect_orders(w):
        acc = PForm.zero(w.vars, min(3, n))
        for i in range(max(0, k - w.K), min(k, w.K) + 1):
            acc = acc + w.coeffs[i].wedge(dw[k - i])
        out.append((k, acc))
    return IntegrabilityReport(tuple(out), not w.truncated, tuple(w.degree_violations()))


@dataclass(frozen=True)
class DeformationEquation:
    k: int
    terms: tuple[tuple[int, int], ...]  # pairs (i, l) contributing w_i ^ d(w_l)
    lhs: PForm
    labels: tuple[str, ...] = field(default=())

    @property
    def holds(self) -> bool:
        return not self.lhs

    def text(self) -> str:
        return " + ".join(self.labels) + " = 0"

    def to_json(self) -> dict:
        out = {"k": self.k, "equation": self.text(), "holds": self.holds}
        if self.lhs:
            out["defect"] = self.lhs.to_json()
        return out


def _term_label(i: int, l: int) -> str:
    left = "df" if i == 0 else f"w{i}"
    return f"{left}^d(w{l})"


def deformation_equations(w: DeformationSeries, f: Polynomial) -> list[DeformationEquation]:
    """Order-by-order equations of a deformation of ``w_0 = df``.

    Terms ``w_i ^ d(w_0)`` vanish identically since ``d(df) = 0`` and are
    omitted, so order 1 reads ``df ^ d(w1) = 0`` and order 2 reads
    ``w1 ^ d(w1) + df ^ d(w2) = 0``.
    """
    if f.vars != w.vars:
        raise ContextError("f and the deformation live over different variables")
    df = d(f)
    if w.coeffs[0] != df:
        raise HypothesisError("order-0 coefficient is not df", witness=w.coeffs[0] - df)
    dw = [c.d() for c in w.coeffs]
    n = len(w.vars)
    equations = []
    for k in _defect_orders(w):
        if k == 0:
            continue
        pairs = tuple(
            (i, k - i) for i in range(max(0, k - w.K), min(k, w.K) + 1) if k - i >= 1
        )
        if not pairs:
            continue
        acc = PForm.zero(w.vars, min(3, n))
        for i, l in pairs:
            acc = acc + w.coeffs[i].wedge(dw[l])
        labels = tuple(_term_label(i, l) for i, l in pairs)
        equations.append(DeformationEquation(k, pairs, acc, labels))
    return equations
