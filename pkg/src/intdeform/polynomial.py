"""Sparse multivariate polynomials over the Gaussian rationals.

A polynomial is a map from exponent tuples (monomials) to nonzero
:class:`GaussianRational` coefficients, together with the ordered variable
names it lives over.  Values are immutable; every operation returns a new
polynomial.

The term order used for division and for canonical serialization is graded
lexicographic: monomials are compared by total degree first, then
lexicographically on the exponent tuple (``x1 > x2 > ... > xn``).
"""

from __future__ import annotations

import ast
import re
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ContextError
from .scalars import ONE, ZERO, GaussianRational, I, as_scalar

__all__ = [
    "Monomial",
    "NEG_INF",
    "Polynomial",
    "ring",
    "grlex_key",
    "monomials_up_to",
    "parse_polynomial",
]

Monomial = tuple  # tuple[int, ...], one exponent per variable

NEG_INF = float("-inf")  # degree of the zero polynomial


def grlex_key(exps: Monomial):
    return (sum(exps), exps)


def monomials_of_degree(n: int, d: int) -> list[Monomial]:
    """All exponent tuples of length ``n`` and total degree ``d``, grlex-descending."""
    if n == 0:
        return [()] if d == 0 else []
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


def monomials_up_to(n: int, d: int, *, start: int = 0) -> list[Monomial]:
    """Monomials of total degree ``start..d`` in ``n`` variables, by increasing degree."""
    out = []
    for k in range(start, d + 1):
        out.extend(monomials_of_degree(n, k))
    return out


class Polynomial:
    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[Monomial, object] | None = None):
        vars = tuple(vars)
        clean: dict[Monomial, GaussianRational] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(vars):
                raise ContextError(f"monomial {exps} does not match {len(vars)} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = as_scalar(c)
            if c:
                if exps in clean:
                    c = clean[exps] + c
                    if not c:
                        del clean[exps]
                        continue
                clean[exps] = c
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _make(cls, vars: tuple, terms: dict) -> "Polynomial":
        obj = object.__new__(cls)
        object.__setattr__(obj, "vars", vars)
        object.__setattr__(obj, "terms", terms)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Polynomial":
        return cls._make(tuple(vars), {})

    @classmethod
    def constant(cls, c, vars: Sequence[str]) -> "Polynomial":
        vars = tuple(vars)
        c = as_scalar(c)
        return cls._make(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def variable(cls, name_or_index, vars: Sequence[str]) -> "Polynomial":
        vars = tuple(vars)
        i = vars.index(name_or_index) if isinstance(name_or_index, str) else int(name_or_index)
        exps = tuple(1 if k == i else 0 for k in range(len(vars)))
        return cls._make(vars, {exps: ONE})

    @classmethod
    def monomial(cls, exps: Monomial, vars: Sequence[str], coeff=ONE) -> "Polynomial":
        return cls(vars, {tuple(exps): coeff})

    # -- structure ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self):
        """Total degree; ``NEG_INF`` for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    deg = degree

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_homogeneous(self, m: int | None = None) -> bool:
        degrees = {sum(e) for e in self.terms}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return m is None or degrees.pop() == m

    def homogeneous_components(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = defaultdict(dict)
        for e, c in self.terms.items():
            parts[sum(e)][e] = c
        return {d: Polynomial._make(self.vars, parts[d]) for d in sorted(parts)}

    def homogeneous_part(self, m: int) -> "Polynomial":
        return Polynomial._make(self.vars, {e: c for e, c in self.terms.items() if sum(e) == m})

    def coefficient(self, exps: Monomial) -> GaussianRational:
        return self.terms.get(tuple(exps), ZERO)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * self.nvars, ZERO)

    def sorted_terms(self) -> list[tuple[Monomial, GaussianRational]]:
        """Terms in canonical (grlex-descending) order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, GaussianRational]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def max_degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise ContextError(f"variable context mismatch: {self.vars} vs {other.vars}")
            return other
        return Polynomial.constant(as_scalar(other), self.vars)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.terms == other.terms
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.nvars: other} if other else {})

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def __neg__(self) -> "Polynomial":
        return Polynomial._make(self.vars, {e: -c for e, c in self.terms.items()})

    def __pos__(self) -> "Polynomial":
        return self

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._make(self.vars, out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = as_scalar(c)
        if not c:
            return Polynomial._make(self.vars, {})
        return Polynomial._make(self.vars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._coerce(other)
        if len(self.terms) > len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: dict = {}
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._make(self.vars, {e: c for e, c in out.items() if c})

    def __rmul__(self, other) -> "Polynomial":
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            ok, q = self.divides_by(other)
            if not ok:
                raise ValueError("polynomial division is not exact")
            return q
        return self.scale(as_scalar(other).inverse())

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Polynomial.constant(ONE, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "Polynomial":
        return Polynomial._make(self.vars, {e: c.conjugate() for e, c in self.terms.items()})

    def hermitian_dot(self, other: "Polynomial") -> GaussianRational:
        """``sum_m self[m] * conj(other[m])`` in the monomial basis."""
        other = self._coerce(other)
        acc = ZERO
        for e, c in self.terms.items():
            d = other.terms.get(e)
            if d is not None:
                acc = acc + c * d.conjugate()
        return acc

    # -- calculus and substitution -----------------------------------------

    def diff(self, var) -> "Polynomial":
        i = self.vars.index(var) if isinstance(var, str) else int(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return Polynomial._make(self.vars, out)

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``subs[i]`` for the i-th variable; result lives in ``subs``' context."""
        if len(subs) != self.nvars:
            raise ContextError(f"expected {self.nvars} substitutions, got {len(subs)}")
        if not subs:
            raise ContextError("cannot compose a polynomial in zero variables without a target context")
        target = subs[0].vars
        for s in subs:
            if not isinstance(s, Polynomial) or s.vars != target:
                raise ContextError("substitutions must share one variable context")
        powers: list[list[Polynomial]] = [[Polynomial.constant(ONE, target)] for _ in subs]

        def power(i: int, k: int) -> Polynomial:
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * subs[i])
            return cache[k]

        result = Polynomial.zero(target)
        for e, c in self.terms.items():
            term = Polynomial.constant(c, target)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def evaluate(self, point: Sequence):
        """Horner evaluation at a complex point (entries may be numpy arrays)."""
        if len(point) != self.nvars:
            raise ContextError(f"point has {len(point)} coordinates, expected {self.nvars}")
        if not self.terms:
            return 0j * (point[0] if self.nvars else 1)
        items = [(e, complex(c)) for e, c in self.terms.items()]
        return _horner(items, point, 0)

    __call__ = evaluate

    # -- division -----------------------------------------------------------

    def divmod(self, f: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Grlex long division ``self = q*f + r``; no term of ``r`` is divisible by lm(f)."""
        f = self._coerce(f)
        if not f:
            raise ZeroDivisionError("division by the zero polynomial")
        lm, lc = f.leading_term()
        inv_lc = lc.inverse()
        ftail = [(e, c) for e, c in f.terms.items() if e != lm]
        p = dict(self.terms)
        q: dict = {}
        r: dict = {}
        while p:
            m = max(p, key=grlex_key)
            c = p.pop(m)
            if all(a >= b for a, b in zip(m, lm)):
                qm = tuple(a - b for a, b in zip(m, lm))
                qc = c * inv_lc
                q[qm] = q.get(qm, ZERO) + qc
                for e, fc in ftail:
                    t = tuple(a + b for a, b in zip(qm, e))
                    v = p.get(t, ZERO) - qc * fc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
            else:
                r[m] = c
        q = {e: c for e, c in q.items() if c}
        return Polynomial._make(self.vars, q), Polynomial._make(self.vars, r)

    def divides_by(self, f: "Polynomial") -> tuple[bool, "Polynomial | None"]:
        q, r = self.divmod(f)
        return (not r, q if not r else None)

    # -- text / JSON --------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if not mono:
                pieces.append(str(c))
            elif c == ONE:
                pieces.append(mono)
            elif c == -ONE:
                pieces.append("-" + mono)
            else:
                pieces.append(f"{c}*{mono}")
        text = " + ".join(pieces)
        return text.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Polynomial({self.vars!r}, {str(self)!r})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [{"coeff": c.to_pair(), "exps": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data, vars: Sequence[str] | None = None) -> "Polynomial":
        """Accept the term-list JSON form or an expression string (needs ``vars``)."""
        if isinstance(data, str):
            if vars is None:
                raise ContextError("expression strings need an explicit variable list")
            return parse_polynomial(data, vars)
        if isinstance(data, (int, float)):
            if vars is None:
                raise ContextError("numeric constants need an explicit variable list")
            return Polynomial.constant(as_scalar(data), vars)
        pvars = tuple(data["vars"])
        if vars is not None and tuple(vars) != pvars:
            raise ContextError(f"polynomial variables {pvars} do not match context {tuple(vars)}")
        terms: dict = {}
        for t in data["terms"]:
            exps = tuple(t["exps"])
            if exps in terms:
                raise ValueError(f"duplicate monomial {exps} in serialized polynomial")
            terms[exps] = GaussianRational.from_pair(t["coeff"])
        return cls(pvars, terms)


def _horner(items, pt, k):
    if k == len(pt):
        return items[0][1]
    groups: dict[int, list] = defaultdict(list)
    for e, c in items:
        groups[e[k]].append((e, c))
    powers = sorted(groups, reverse=True)
    x = pt[k]
    acc = _horner(groups[powers[0]], pt, k + 1)
    for prev, cur in zip(powers, powers[1:]):
        acc = acc * x ** (prev - cur) + _horner(groups[cur], pt, k + 1)
    if powers[-1]:
        acc = acc * x ** powers[-1]
    return acc


def ring(names: str | Iterable[str]) -> tuple[Polynomial, ...]:
    """Generators of a polynomial ring, e.g. ``x, y, z = ring("x y z")``."""
    if isinstance(names, str):
        names = [s for s in re.split(r"[,\s]+", names) if s]
    names = tuple(names)
    return tuple(Polynomial.variable(i, names) for i in range(len(names)))


# -- expression parsing -------------------------------------------------------

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
}


def parse_polynomial(text: str, vars: Sequence[str]) -> Polynomial:
    """Parse expressions like ``"3/2*x^2*y - I*z + 1"`` (``I`` is the imaginary unit)."""
    vars = tuple(vars)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
    return _as_poly(_eval_node(tree.body, vars, text), vars)


def _as_poly(v, vars) -> Polynomial:
    return v if isinstance(v, Polynomial) else Polynomial.constant(v, vars)


def _eval_node(node, vars, text):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return GaussianRational(node.value)
    if isinstance(node, ast.Constant) and isinstance(node.value, float):
        # decimal literals are read exactly as written, not as binary floats
        return GaussianRational(Fraction(ast.get_source_segment(text.replace("^", "**"), node) or repr(node.value)))
    if isinstance(node, ast.Name):
        if node.id in vars:
            return Polynomial.variable(node.id, vars)
        if node.id == "I":
            return I
        raise ValueError(f"unknown symbol {node.id!r}; variables are {vars}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, vars, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, vars, text)
        right = _eval_node(node.right, vars, text)
        if type(node.op) in _BINOPS:
            if isinstance(left, Polynomial) or isinstance(right, Polynomial):
                left, right = _as_poly(left, vars), _as_poly(right, vars)
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node.op, ast.Div):
            if isinstance(right, Polynomial):
                if not right.is_constant() or not right:
                    raise ValueError("division only by nonzero constants")
                right = right.constant_term()
            return left / right
        if isinstance(node.op, ast.Pow):
            if isinstance(right, Polynomial):
                right = right.constant_term() if right.is_constant() else None
            if right is None or not right.is_real or right.re.denominator != 1 or right.re < 0:
                raise ValueError("exponents must be non-negative integer constants")
            k = int(right.re)
            return _as_poly(left, vars) ** k if isinstance(left, Polynomial) else left ** k
    raise ValueError(f"unsupported syntax in polynomial {text!r}")
