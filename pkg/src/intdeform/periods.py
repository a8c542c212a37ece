"""Period integrals of polynomial 1-forms over closed loops on fibers ``f = c``.

Loops are truncated Fourier series, so they are closed by construction and
the periodic trapezoid rule converges spectrally (it is exact once the node
count exceeds the bandwidth of a polynomial integrand).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cohomology import FactoredFiber, relatively_closed
from .deformation import DeformationSeries
from .errors import (
    ContextError,
    NonConvergence,
    PoleProximity,
    ResidencyFailure,
    WindingAmbiguity,
)
from .forms import LogForm, PForm
from .polynomial import Polynomial
from .scalars import ZERO, GaussianRational, as_scalar

__all__ = [
    "Cycle",
    "PeriodValue",
    "LogPeriod",
    "OrderPeriods",
    "PeriodReport",
    "standard_torus_cycle",
    "period",
    "log_period_exact",
    "winding_number",
    "obstruction_series",
    "DEFAULT_TOL",
    "DEFAULT_N_START",
    "DEFAULT_N_MAX",
    "DEFAULT_POLE_GUARD",
    "DEFAULT_WINDING_ACCEPT",
]

DEFAULT_TOL = 1e-10
DEFAULT_N_START = 64
DEFAULT_N_MAX = 2 ** 16
DEFAULT_POLE_GUARD = 1e-8
DEFAULT_WINDING_ACCEPT = 0.01
WINDING_N_START = 256

TWO_PI_I = 2j * math.pi


def _cplx_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass(frozen=True)
class Cycle:
    """``x_k(s) = sum_m c[k][m] exp(i m s)`` for ``s`` in ``[0, 2 pi]``, lying on ``f = c``."""

    coords: tuple[tuple[tuple[int, complex], ...], ...]
    c: complex
    tol: float = 1e-9

    def __post_init__(self):
        coords = tuple(
            tuple(sorted((int(m), complex(v)) for m, v in (dict(k).items() if isinstance(k, dict) else k)))
            for k in self.coords
        )
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "c", complex(self.c))
        if not self.tol > 0:
            raise ValueError("fiber tolerance must be positive")

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def bandwidth(self) -> int:
        return max((abs(m) for k in self.coords for m, _ in k), default=0)

    def sample(self, N: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Points and derivatives at the nodes ``s_j = 2 pi j / N``."""
        s = 2 * np.pi * np.arange(N) / N
        xs, dxs = [], []
        for k in self.coords:
            x = np.zeros(N, dtype=complex)
            dx = np.zeros(N, dtype=complex)
            for m, coeff in k:
                e = np.exp(1j * m * s)
                x += coeff * e
                if m:
                    dx += 1j * m * coeff * e
            xs.append(x)
            dxs.append(dx)
        return xs, dxs

    def residency(self, f: Polynomial, N: int | None = None) -> float:
        """``max |f(gamma(s)) - c|`` over quadrature nodes."""
        if f.nvars != self.n:
            raise ContextError(f"cycle has {self.n} coordinates, f has {f.nvars} variables")
        if N is None:
            N = max(DEFAULT_N_START, 4 * self.bandwidth * max(int(f.degree), 1) + 1)
        xs, _ = self.sample(N)
        vals = np.asarray(f.evaluate(xs)) - self.c
        return float(np.max(np.abs(vals)))

    def check_residency(self, f: Polynomial) -> float:
        dev = self.residency(f)
        if not dev < self.tol:
            raise ResidencyFailure(
                f"cycle leaves the fiber f = {self.c}: max |f - c| = {dev:.3e} >= {self.tol:.1e}"
            )
        return dev

    def phase_shift(self, delta: float) -> "Cycle":
        """The same loop reparametrized by ``s -> s + delta``."""
        shifted = tuple(tuple((m, v * cmath.exp(1j * m * delta)) for m, v in k) for k in self.coords)
        return Cycle(shifted, self.c, self.tol)

    def to_json(self) -> dict:
        return {
            "c": _cplx_json(self.c),
            "tol": self.tol,
            "coords": [[{"m": m, "coeff": _cplx_json(v)} for m, v in k] for k in self.coords],
        }

    @classmethod
    def from_json(cls, data) -> "Cycle":
        coords = tuple(
            tuple((int(t["m"]), complex(*t["coeff"])) for t in k) for k in data["coords"]
        )
        return cls(coords, complex(*data["c"]), float(data.get("tol", 1e-9)))


@dataclass(frozen=True)
class PeriodValue:
    value: complex
    err: float
    nodes: int
    value_over_f: complex | None = None

    def to_json(self) -> dict:
        out = {"value": _cplx_json(self.value), "err": self.err, "nodes": self.nodes}
        if self.value_over_f is not None:
            out["value_over_f"] = _cplx_json(self.value_over_f)
        return out


def _adaptive_trapezoid(
    integrand: Callable[[int], np.ndarray], tol: float, n_start: int, n_max: int
) -> PeriodValue:
    N = n_start
    prev = 2 * np.pi * complex(np.mean(integrand(N)))
    while True:
        N2 = 2 * N
        if N2 > n_max:
            raise NonConvergence(f"trapezoid rule did not reach tol={tol:.1e} within {n_max} nodes")
        cur = 2 * np.pi * complex(np.mean(integrand(N2)))
        diff = abs(cur - prev)
        if diff < tol:
            return PeriodValue(cur, diff, N2)
        prev, N = cur, N2


def period(
    omega: PForm,
    gamma: Cycle,
    f: Polynomial | None = None,
    *,
    tol: float = DEFAULT_TOL,
    n_start: int = DEFAULT_N_START,
    n_max: int = DEFAULT_N_MAX,
) -> PeriodValue:
    """``oint_gamma omega`` by node-doubling trapezoid; checks residency when ``f`` is given."""
    if omega.p != 1:
        raise ContextError(f"periods are defined for 1-forms, got p={omega.p}")
    if omega.nvars != gamma.n:
        raise ContextError(f"cycle has {gamma.n} coordinates, form has {omega.nvars} variables")
    if f is not None:
        gamma.check_residency(f)
    comps = [(i, c) for (i,), c in omega.components.items()]

    def integrand(N: int) -> np.ndarray:
        xs, dxs = gamma.sample(N)
        acc = np.zeros(N, dtype=complex)
        for i, c in comps:
            acc += np.asarray(c.evaluate(xs)) * dxs[i]
        return acc

    pv = _adaptive_trapezoid(integrand, tol, n_start, n_max)
    if gamma.c:
        return PeriodValue(pv.value, pv.err, pv.nodes, pv.value / gamma.c)
    return pv


def winding_number(
    g: Polynomial,
    gamma: Cycle,
    *,
    tol: float = DEFAULT_TOL,
    n_start: int = WINDING_N_START,
    n_max: int = DEFAULT_N_MAX,
    pole_guard: float = DEFAULT_POLE_GUARD,
) -> tuple[complex, float]:
    """Raw ``(1/2 pi i) oint d(g o gamma)/(g o gamma)`` and its error estimate."""
    grads = [g.diff(k) for k in range(g.nvars)]
    xs, _ = gamma.sample(n_start)
    if float(np.min(np.abs(np.asarray(g.evaluate(xs))))) <= pole_guard:
        raise PoleProximity(f"cycle passes within {pole_guard:.0e} of the pole set {g} = 0")

    def integrand(N: int) -> np.ndarray:
        xs, dxs = gamma.sample(N)
        num = np.zeros(N, dtype=complex)
        for k, gk in enumerate(grads):
            if gk:
                num += np.asarray(gk.evaluate(xs)) * dxs[k]
        den = np.asarray(g.evaluate(xs)) + 0j
        if float(np.min(np.abs(den))) <= pole_guard:
            raise PoleProximity(f"cycle passes within {pole_guard:.0e} of the pole set {g} = 0")
        return num / den

    pv = _adaptive_trapezoid(integrand, tol, n_start, n_max)
    return pv.value / TWO_PI_I, pv.err / (2 * math.pi)


@dataclass(frozen=True)
class LogPeriod:
    """Exact period ``2 pi i * coefficient`` with ``coefficient = sum lam_k w_k``."""

    coefficient: GaussianRational
    windings: tuple[int, ...]
    raw: tuple[complex, ...]

    @property
    def value(self) -> complex:
        return TWO_PI_I * complex(self.coefficient)

    def to_json(self) -> dict:
        return {
            "coefficient_of_2pi_i": self.coefficient.to_pair(),
            "windings": list(self.windings),
            "raw": [_cplx_json(z) for z in self.raw],
            "value": _cplx_json(self.value),
        }


def log_period_exact(
    theta: LogForm,
    gamma: Cycle,
    *,
    pole_guard: float = DEFAULT_POLE_GUARD,
    accept: float = DEFAULT_WINDING_ACCEPT,
    tol: float = DEFAULT_TOL,
    n_max: int = DEFAULT_N_MAX,
) -> LogPeriod:
    """``oint theta = 2 pi i sum_k lam_k w_k`` with integer windings ``w_k`` of ``f_k o gamma``."""
    windings, raws = [], []
    for lam, g in theta.pairs:
        raw, _ = winding_number(g, gamma, tol=tol, n_max=n_max, pole_guard=pole_guard)
        w = round(raw.real)
        if abs(raw - w) > accept:
            raise WindingAmbiguity(f"winding of {g} is {raw:.6f}, not within {accept} of an integer")
        windings.append(int(w))
        raws.append(raw)
    coefficient = ZERO
    for (lam, _), w in zip(theta.pairs, windings):
        coefficient = coefficient + lam * w
    return LogPeriod(coefficient, tuple(windings), tuple(raws))


def standard_torus_cycle(
    fiber: FactoredFiber | Polynomial,
    c,
    plane: Sequence[int | str] = (0, 1),
    anchor: Sequence | None = None,
    *,
    tol: float = 1e-9,
) -> Cycle:
    """``anchor + eps e^{is} e_i + eps e^{-is} e_j`` with ``eps^2 R = c``.

    The restriction of ``f`` to the coordinate plane through ``anchor`` must be
    exactly ``R*u*v`` (a normal crossing of two coordinate hyperplanes);
    anything else raises :class:`ResidencyFailure`.
    """
    f = fiber.f if isinstance(fiber, FactoredFiber) else fiber
    n = f.nvars
    i, j = (f.vars.index(p) if isinstance(p, str) else int(p) for p in plane)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ContextError(f"bad plane {tuple(plane)} for {n} variables")
    anchor = [0] * n if anchor is None else list(anchor)
    if len(anchor) != n:
        raise ContextError(f"anchor has {len(anchor)} coordinates, expected {n}")
    exact_anchor = [as_scalar(complex(a)) if not isinstance(a, GaussianRational) else a for a in anchor]
    uv = ("u", "v")
    u, v = Polynomial.variable(0, uv), Polynomial.variable(1, uv)
    subs = []
    for k in range(n):
        base = Polynomial.constant(exact_anchor[k], uv)
        subs.append(base + u if k == i else base + v if k == j else base)
    g = f.compose(subs)
    R = g.coefficient((1, 1))
    if not R or g != Polynomial.monomial((1, 1), uv, R):
        raise ResidencyFailure(
            f"f restricted to plane {tuple(plane)} through the anchor is {g}, not of the form R*u*v; "
            "supply an explicit Cycle"
        )
    eps = cmath.sqrt(complex(c) / complex(R))
    coords = []
    for k in range(n):
        a = complex(exact_anchor[k])
        modes = {0: a} if a else {}
        if k == i:
            modes[1] = eps
        elif k == j:
            modes[-1] = eps
        coords.append(tuple(modes.items()))
    gamma = Cycle(tuple(coords), complex(c), tol)
    gamma.check_residency(f)
    return gamma


@dataclass(frozen=True)
class OrderPeriods:
    j: int
    relatively_closed: bool
    per_cycle: tuple[PeriodValue, ...]

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "relatively_closed": self.relatively_closed,
            "per_cycle": [p.to_json() for p in self.per_cycle],
        }


@dataclass(frozen=True)
class PeriodReport:
    orders: tuple[OrderPeriods, ...]
    obstruction_order: int | None
    recursion_valid: bool
    zero_tol: float

    def to_json(self) -> dict:
        return {
            "orders": [o.to_json() for o in self.orders],
            "obstruction_order": self.obstruction_order,
            "recursion_valid": self.recursion_valid,
            "zero_tol": self.zero_tol,
        }


def _is_nonzero(pv: PeriodValue, zero_tol: float) -> bool:
    return abs(pv.value) > max(zero_tol, 10 * pv.err)


def obstruction_series(
    w: DeformationSeries,
    fiber: FactoredFiber,
    cycles: Sequence[Cycle],
    *,
    tol: float = DEFAULT_TOL,
    n_max: int = DEFAULT_N_MAX,
    zero_tol: float = 1e-8,
) -> PeriodReport:
    """Periods ``oint w_j`` and ``(1/c) oint w_j`` for every order ``j >= 1`` and cycle.

    The first order with a period above ``zero_tol`` is the obstruction order.
    Periods are cycle-independent only while the orders up to the obstruction
    are relatively closed; ``recursion_valid`` records whether that held.
    """
    if w.vars != fiber.vars:
        raise ContextError("deformation and fiber live over different variables")
    f = fiber.f
    for gamma in cycles:
        gamma.check_residency(f)
    orders = []
    obstruction = None
    valid = True
    for j in range(1, w.K + 1):
        wj = w.coeffs[j]
        closed = relatively_closed(wj, f).closed
        if obstruction is None and not closed:
            valid = False
        values = tuple(period(wj, gamma, tol=tol, n_max=n_max) for gamma in cycles)
        if obstruction is None and any(_is_nonzero(v, zero_tol) for v in values):
            obstruction = j
        orders.append(OrderPeriods(j, closed, values))
    return PeriodReport(tuple(orders), obstruction, valid, zero_tol)
