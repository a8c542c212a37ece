"""Polynomial differential forms: wedge, exterior derivative, pullback.

A p-form is stored as a map from strictly increasing index tuples
``(i1 < ... < ip)`` to nonzero polynomial coefficients, so
``{(0, 2): x*y}`` is ``x*y dx0^dx2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import ContextError, FiberError
from .polynomial import NEG_INF, Polynomial
from .scalars import ONE, GaussianRational, as_scalar

__all__ = [
    "PForm",
    "LogForm",
    "d",
    "wedge",
    "pullback",
    "radial_contraction",
    "evaluate",
    "homogeneous_components",
    "scaling_map",
]


def _merge_sign(a: tuple, b: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted index tuple of ``dx_a ^ dx_b``; None when they share an index."""
    if set(a) & set(b):
        return None
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1 if inversions & 1 else 1), tuple(sorted(a + b))


class PForm:
    __slots__ = ("vars", "p", "components")

    def __init__(self, vars: Sequence[str], p: int, components: Mapping[tuple, Polynomial] | None = None):
        vars = tuple(vars)
        n = len(vars)
        if not 0 <= p <= n:
            raise ContextError(f"form degree {p} outside 0..{n}")
        clean: dict[tuple, Polynomial] = {}
        for idx, coeff in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != p or any(not 0 <= i < n for i in idx):
                raise ContextError(f"bad index tuple {idx} for a {p}-form in {n} variables")
            if not isinstance(coeff, Polynomial):
                coeff = Polynomial.constant(coeff, vars)
            if coeff.vars != vars:
                raise ContextError(f"component lives over {coeff.vars}, form over {vars}")
            if len(set(idx)) < p:
                continue
            order = sorted(range(p), key=lambda k: idx[k])
            key = tuple(idx[k] for k in order)
            if key != idx:
                coeff = -coeff if _perm_parity(order) else coeff
            if key in clean:
                coeff = clean[key] + coeff
            if coeff:
                clean[key] = coeff
            else:
                clean.pop(key, None)
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "components", clean)

    @classmethod
    def _make(cls, vars, p, components) -> "PForm":
        obj = object.__new__(cls)
        object.__setattr__(obj, "vars", vars)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "components", components)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("PForm is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str], p: int) -> "PForm":
        return cls(vars, p)

    @classmethod
    def function(cls, f: Polynomial) -> "PForm":
        return cls._make(f.vars, 0, {(): f} if f else {})

    @classmethod
    def one_form(cls, coeffs: Sequence[Polynomial], vars: Sequence[str] | None = None) -> "PForm":
        """``sum_i coeffs[i] dx_i``."""
        if vars is None:
            vars = next(c.vars for c in coeffs if isinstance(c, Polynomial))
        return cls(vars, 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def basis(cls, idx: Sequence[int], vars: Sequence[str]) -> "PForm":
        return cls(vars, len(idx), {tuple(idx): Polynomial.constant(ONE, vars)})

    # -- structure ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def __bool__(self) -> bool:
        return bool(self.components)

    def is_zero(self) -> bool:
        return not self.components

    @property
    def degree(self):
        """Largest total degree among the coefficients (``deg d(f) = deg f - 1``)."""
        return max((c.degree for c in self.components.values()), default=NEG_INF)

    deg = degree

    def is_homogeneous(self, m: int | None = None) -> bool:
        degrees = {sum(e) for c in self.components.values() for e in c.terms}
        if not degrees:
            return True
        return len(degrees) == 1 and (m is None or degrees.pop() == m)

    def homogeneous_components(self) -> dict[int, "PForm"]:
        parts: dict[int, dict] = {}
        for idx, c in self.components.items():
            for deg, piece in c.homogeneous_components().items():
                parts.setdefault(deg, {})[idx] = piece
        return {deg: PForm._make(self.vars, self.p, parts[deg]) for deg in sorted(parts)}

    def component(self, idx: Sequence[int]) -> Polynomial:
        return self.components.get(tuple(idx), Polynomial.zero(self.vars))

    def coefficients(self) -> list[Polynomial]:
        """Dense coefficient list of a 1-form, ``[A_0, ..., A_{n-1}]``."""
        if self.p != 1:
            raise ContextError("coefficients() is defined for 1-forms only")
        return [self.component((i,)) for i in range(self.nvars)]

    def as_function(self) -> Polynomial:
        if self.p != 0:
            raise ContextError("not a 0-form")
        return self.component(())

    # -- linear structure ---------------------------------------------------

    def _check(self, other: "PForm") -> None:
        if not isinstance(other, PForm):
            raise TypeError(f"expected PForm, got {type(other).__name__}")
        if other.vars != self.vars:
            raise ContextError(f"variable context mismatch: {self.vars} vs {other.vars}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PForm):
            return NotImplemented
        if self.vars != other.vars:
            return False
        if not self.components and not other.components:
            return True
        return self.p == other.p and self.components == other.components

    def __hash__(self) -> int:
        if not self.components:
            return hash((self.vars, "zero-form"))
        return hash((self.vars, self.p, frozenset(self.components.items())))

    def __add__(self, other: "PForm") -> "PForm":
        if not isinstance(other, PForm):
            return NotImplemented
        self._check(other)
        if not other.components:
            return self
        if not self.components:
            return other
        if other.p != self.p:
            raise ContextError(f"cannot add a {self.p}-form and a {other.p}-form")
        out = dict(self.components)
        for idx, c in other.components.items():
            s = out[idx] + c if idx in out else c
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        return PForm._make(self.vars, self.p, out)

    def __neg__(self) -> "PForm":
        return PForm._make(self.vars, self.p, {k: -c for k, c in self.components.items()})

    def __sub__(self, other: "PForm") -> "PForm":
        if not isinstance(other, PForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "PForm":
        """Multiply by a polynomial function or a scalar."""
        if isinstance(other, PForm):
            return NotImplemented
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise ContextError(f"variable context mismatch: {self.vars} vs {other.vars}")
            out = {k: c * other for k, c in self.components.items()}
        else:
            try:
                s = as_scalar(other)
            except TypeError:
                return NotImplemented
            out = {k: c.scale(s) for k, c in self.components.items()}
        return PForm._make(self.vars, self.p, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    # -- exterior algebra ---------------------------------------------------

    def wedge(self, other: "PForm") -> "PForm":
        self._check(other)
        p = self.p + other.p
        if p > self.nvars:
            return PForm._make(self.vars, min(p, self.nvars), {})
        out: dict[tuple, Polynomial] = {}
        for a, ca in self.components.items():
            for b, cb in other.components.items():
                merged = _merge_sign(a, b)
                if merged is None:
                    continue
                sign, key = merged
                prod = ca * cb
                if sign < 0:
                    prod = -prod
                out[key] = out[key] + prod if key in out else prod
        return PForm._make(self.vars, p, {k: c for k, c in out.items() if c})

    __xor__ = wedge

    def d(self) -> "PForm":
        """Exterior derivative; the top-degree case returns the zero form."""
        n = self.nvars
        if self.p >= n:
            return PForm._make(self.vars, n, {})
        out: dict[tuple, Polynomial] = {}
        for idx, c in self.components.items():
            for i in range(n):
                if i in idx:
                    continue
                dc = c.diff(i)
                if not dc:
                    continue
                before = sum(1 for j in idx if j < i)
                key = tuple(sorted(idx + (i,)))
                term = -dc if before & 1 else dc
                out[key] = out[key] + term if key in out else term
        return PForm._make(self.vars, self.p + 1, {k: v for k, v in out.items() if v})

    def interior_radial(self) -> Polynomial:
        """Contraction with the Euler field ``R = sum x_i d/dx_i`` (1-forms only)."""
        if self.p != 1:
            raise ContextError(f"radial contraction is implemented for 1-forms, got p={self.p}")
        acc = Polynomial.zero(self.vars)
        for (i,), c in self.components.items():
            acc = acc + c * Polynomial.variable(i, self.vars)
        return acc

    def pullback(self, sigma: Sequence[Polynomial]) -> "PForm":
        """Pull back along the polynomial map ``sigma``: target variables of ``self`` -> ``sigma[k]``."""
        if len(sigma) != self.nvars:
            raise ContextError(f"map has {len(sigma)} components, form lives in {self.nvars} variables")
        if not sigma:
            raise ContextError("empty map")
        src = sigma[0].vars
        if any(s.vars != src for s in sigma):
            raise ContextError("map components must share one variable context")
        dsigma = [PForm.function(s).d() for s in sigma]
        if self.p > len(src):
            return PForm._make(src, len(src), {})
        result = PForm._make(src, self.p, {})
        for idx, c in self.components.items():
            term = PForm.function(c.compose(sigma))
            for k in idx:
                term = term.wedge(dsigma[k])
            result = result + term
        return result

    # -- numerics -----------------------------------------------------------

    def evaluate(self, point: Sequence) -> dict[tuple, complex]:
        return {k: c.evaluate(point) for k, c in self.components.items()}

    # -- text / JSON --------------------------------------------------------

    def key_name(self, idx: tuple) -> str:
        if not idx:
            return "1"
        return "^".join("d" + self.vars[i] for i in idx)

    def parse_key(self, key: str) -> tuple:
        if key in ("1", ""):
            return ()
        names = key.split("^")
        idx = []
        for name in names:
            if not name.startswith("d") or name[1:] not in self.vars:
                raise ContextError(f"bad component key {key!r} for variables {self.vars}")
            idx.append(self.vars.index(name[1:]))
        return tuple(idx)

    def __str__(self) -> str:
        if not self.components:
            return "0"
        parts = []
        for idx in sorted(self.components):
            c = self.components[idx]
            key = self.key_name(idx)
            parts.append(f"({c})" if not idx else f"({c}) {key}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PForm(p={self.p}, {str(self)!r})"

    def to_json(self) -> dict:
        comps = {}
        for idx in sorted(self.components):
            comps[self.key_name(idx)] = self.components[idx].to_json()
        return {"vars": list(self.vars), "p": self.p, "components": comps}

    @classmethod
    def from_json(cls, data, vars: Sequence[str] | None = None) -> "PForm":
        if vars is None:
            vars = data.get("vars")
            if vars is None:
                raise ContextError("form JSON needs 'vars' or an explicit context")
        elif "vars" in data and tuple(data["vars"]) != tuple(vars):
            raise ContextError(f"form variables {data['vars']} do not match context {list(vars)}")
        vars = tuple(vars)
        p = int(data["p"])
        shell = cls._make(vars, p, {})
        comps = {}
        for key, poly in data.get("components", {}).items():
            idx = shell.parse_key(key)
            if len(idx) != p:
                raise ContextError(f"component {key!r} is not a {p}-form key")
            if idx in comps:
                raise ValueError(f"duplicate component {key!r}")
            comps[idx] = Polynomial.from_json(poly, vars)
        return cls(vars, p, comps)


def _perm_parity(order: list[int]) -> int:
    seen = [False] * len(order)
    parity = 0
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


# -- functional API -----------------------------------------------------------


def d(obj) -> PForm:
    """Exterior derivative of a polynomial (as a 0-form) or of a form."""
    if isinstance(obj, Polynomial):
        return PForm.function(obj).d()
    return obj.d()


def wedge(*forms: PForm) -> PForm:
    result = forms[0]
    for f in forms[1:]:
        result = result.wedge(f)
    return result


def pullback(sigma: Sequence[Polynomial], alpha: PForm) -> PForm:
    return alpha.pullback(sigma)


def radial_contraction(omega: PForm) -> Polynomial:
    return omega.interior_radial()


def evaluate(obj, point: Sequence):
    return obj.evaluate(point)


def homogeneous_components(p: Polynomial) -> dict[int, Polynomial]:
    return p.homogeneous_components()


def scaling_map(t, vars: Sequence[str]) -> list[Polynomial]:
    """Components of ``z -> t*z`` as polynomials over ``vars``."""
    t = as_scalar(t)
    return [Polynomial.variable(i, vars).scale(t) for i in range(len(vars))]


@dataclass(frozen=True)
class LogForm:
    """``sum_k lam_k df_k/f_k``; only the cleared form ``f * (...)`` is polynomial."""

    pairs: tuple[tuple[GaussianRational, Polynomial], ...]

    def __post_init__(self):
        pairs = tuple((as_scalar(lam), f) for lam, f in self.pairs)
        if not pairs:
            raise ValueError("a logarithmic form needs at least one pole")
        vars = pairs[0][1].vars
        for _, f in pairs:
            if f.vars != vars:
                raise ContextError("all poles must share one variable context")
            if not f or f.is_constant():
                raise FiberError(f"pole polynomial {f} must be non-constant")
        object.__setattr__(self, "pairs", pairs)

    @property
    def vars(self) -> tuple[str, ...]:
        return self.pairs[0][1].vars

    @property
    def lambdas(self) -> list[GaussianRational]:
        return [lam for lam, _ in self.pairs]

    @property
    def poles(self) -> list[Polynomial]:
        return [f for _, f in self.pairs]

    def product(self) -> Polynomial:
        out = Polynomial.constant(ONE, self.vars)
        for f in self.poles:
            out = out * f
        return out

    def cleared(self) -> PForm:
        """``prod(f_k) * sum_k lam_k df_k/f_k = sum_k lam_k (prod_{l != k} f_l) df_k``."""
        total = PForm.zero(self.vars, 1)
        poles = self.poles
        for k, (lam, fk) in enumerate(self.pairs):
            if not lam:
                continue
            others = Polynomial.constant(lam, self.vars)
            for l, fl in enumerate(poles):
                if l != k:
                    others = others * fl
            total = total + d(fk) * others
        return total

    def to_json(self) -> dict:
        return {"pairs": [{"lambda": lam.to_pair(), "f": f.to_json()} for lam, f in self.pairs]}

    @classmethod
    def from_json(cls, data, vars=None) -> "LogForm":
        return cls(tuple(
            (GaussianRational.from_pair(p["lambda"]), Polynomial.from_json(p["f"], vars)) for p in data["pairs"]
        ))


def all_index_tuples(n: int, p: int):
    return combinations(range(n), p)
