"""Young functions and the calculus around them.

A Young function is stored together with its density ``g = G'`` and the
growth exponents

    p_minus = inf t g(t) / G(t),    p_plus = sup t g(t) / G(t),

which are declared at construction and only *checked* by sampling.  Every
supremum or infimum over ``t`` is taken on a log-spaced grid followed by one
round of 10x refinement around the running extremum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .errors import Inconclusive, MaximizerDiverged, NonYoung

log = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]

# Gauss-Legendre rule used for the numeric primitive of G(t)/t in log t.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)


def log_grid(lo: float, hi: float, per_decade: int = 40) -> np.ndarray:
    """Log-spaced grid from ``lo`` to ``hi`` (inclusive)."""
    n = max(2, int(round(per_decade * math.log10(hi / lo))) + 1)
    return np.logspace(math.log10(lo), math.log10(hi), n)


DEFAULT_T_GRID = log_grid(1e-6, 1e6)


def _fd_density(G: ArrayFn) -> ArrayFn:
    def g(t):
        t = np.asarray(t, dtype=float)
        h = 1e-6 * np.maximum(t, 1.0)
        lo = np.maximum(t - h, 0.0)
        return (G(t + h) - G(lo)) / (t + h - lo)

    return g


@dataclass(frozen=True)
class YoungFunction:
    """A Young function ``G`` with density ``g`` and growth exponents.

    ``G`` and ``g`` must accept numpy arrays.  ``complementary_closed_form``
    and ``primitive_closed_form`` are optional fast paths for the
    complementary function and for ``T -> int_0^T G(t)/t dt``.
    """

    name: str
    G: ArrayFn
    g: ArrayFn
    p_minus: float
    p_plus: float
    complementary_closed_form: Optional[ArrayFn] = None
    primitive_closed_form: Optional[ArrayFn] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.p_minus > 1.0):
            raise NonYoung(f"{self.name}: p_minus={self.p_minus} must exceed 1")
        if not (self.p_plus < math.inf and self.p_plus >= self.p_minus):
            raise NonYoung(f"{self.name}: bad p_plus={self.p_plus}")

    def __call__(self, t):
        return self.G(np.asarray(t, dtype=float))

    def primitive(self, T):
        """``int_0^T G(t)/t dt``, vectorized over ``T``.

        Falls back to Gauss-Legendre in ``log t`` over a window wide enough
        that the neglected part is below ``exp(-60)`` relative (by the
        lower growth bound).
        """
        T = np.asarray(T, dtype=float)
        if self.primitive_closed_form is not None:
            return self.primitive_closed_form(T)
        out = np.zeros_like(T)
        pos = T > 0
        if not np.any(pos):
            return out
        hi = np.log(T[pos])
        width = 60.0 / self.p_minus
        lo = hi - width
        v = 0.5 * (hi - lo)[:, None] * (_GL_X[None, :] + 1.0) + lo[:, None]
        vals = self.G(np.exp(v))
        out[pos] = 0.5 * width * (vals @ _GL_W)
        return out


# --------------------------------------------------------------------------
# catalog


def power(p: float, scale: float = 1.0) -> YoungFunction:
    """``G(t) = scale * t^p``."""
    c = float(scale)
    p = float(p)

    def comp(t):
        t = np.asarray(t, dtype=float)
        w = (t / (c * p)) ** (1.0 / (p - 1.0))
        return t * w * (p - 1.0) / p

    name = f"t^{p:g}" if c == 1.0 else f"{c:g}*t^{p:g}"
    return YoungFunction(
        name=name,
        G=lambda t: c * np.asarray(t, dtype=float) ** p,
        g=lambda t: c * p * np.asarray(t, dtype=float) ** (p - 1.0),
        p_minus=p,
        p_plus=p,
        complementary_closed_form=comp,
        primitive_closed_form=lambda T: c * np.asarray(T, dtype=float) ** p / p,
        params={"p": p, "scale": c},
    )


def log_power(p: float) -> YoungFunction:
    """``G(t) = t^p (1 + |log t|)``.

    ``t g/G`` equals ``p - 1/(1 - log t)`` below 1 and ``p + 1/(1 + log t)``
    above, so the exponents are ``p - 1`` (not attained) and ``p + 1`` (at
    ``t = 1``).  ``g`` jumps at 1 and is taken right-continuous.
    """
    p = float(p)

    def G(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            lg = np.where(t > 0, np.log(np.where(t > 0, t, 1.0)), 0.0)
        return t**p * (1.0 + np.abs(lg))

    def g(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t > 0, t, 1.0)
        lg = np.log(safe)
        below = safe ** (p - 1.0) * (p * (1.0 - lg) - 1.0)
        above = safe ** (p - 1.0) * (p * (1.0 + lg) + 1.0)
        return np.where(t <= 0, 0.0, np.where(t < 1.0, below, above))

    def prim(T):
        T = np.asarray(T, dtype=float)
        safe = np.where(T > 0, T, 1.0)
        lg = np.log(safe)
        Tp = safe**p
        below = Tp / p * (1.0 - lg) + Tp / p**2
        above = Tp / p * (1.0 + lg) - Tp / p**2 + 2.0 / p**2
        return np.where(T <= 0, 0.0, np.where(T <= 1.0, below, above))

    return YoungFunction(
        name=f"t^{p:g}(1+|log t|)",
        G=G,
        g=g,
        p_minus=p - 1.0,
        p_plus=p + 1.0,
        primitive_closed_form=prim,
        params={"p": p},
    )


def _log_damped_defect() -> float:
    # max over t of t / ((e+t) log(e+t)); the exponent deficit below p
    res = optimize.minimize_scalar(
        lambda lt: -math.exp(lt) / ((math.e + math.exp(lt)) * math.log(math.e + math.exp(lt))),
        bounds=(-5.0, 10.0),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return -res.fun


def log_damped(p: float) -> YoungFunction:
    """``G(t) = t^p / log(e + t)``; exponents ``p - 0.3179...`` and ``p``."""
    p = float(p)

    def G(t):
        t = np.asarray(t, dtype=float)
        return t**p / np.log(np.e + t)

    def g(t):
        t = np.asarray(t, dtype=float)
        L = np.log(np.e + t)
        return p * t ** (p - 1.0) / L - t**p / ((np.e + t) * L**2)

    return YoungFunction(
        name=f"t^{p:g}/log(e+t)",
        G=G,
        g=g,
        p_minus=p - _log_damped_defect(),
        p_plus=p,
        params={"p": p},
    )


def double_phase(q: float, p: float) -> YoungFunction:
    """``G(t) = t^q + t^p`` with ``p > q``."""
    q, p = float(q), float(p)
    if not p > q:
        raise ValueError("double_phase needs p > q")
    return YoungFunction(
        name=f"t^{q:g}+t^{p:g}",
        G=lambda t: np.asarray(t, dtype=float) ** q + np.asarray(t, dtype=float) ** p,
        g=lambda t: q * np.asarray(t, dtype=float) ** (q - 1.0)
        + p * np.asarray(t, dtype=float) ** (p - 1.0),
        p_minus=q,
        p_plus=p,
        primitive_closed_form=lambda T: np.asarray(T, dtype=float) ** q / q
        + np.asarray(T, dtype=float) ** p / p,
        params={"q": q, "p": p},
    )


def from_callable(
    G: ArrayFn,
    p_minus: float,
    p_plus: float,
    g: Optional[ArrayFn] = None,
    name: str = "custom",
) -> YoungFunction:
    """Wrap a user ``G``; a missing density is taken by central differences."""
    return YoungFunction(
        name=name, G=G, g=g if g is not None else _fd_density(G), p_minus=p_minus, p_plus=p_plus
    )


def from_table(
    t: Sequence[float],
    values: Sequence[float],
    p_minus: Optional[float] = None,
    p_plus: Optional[float] = None,
    name: str = "tabulated",
) -> YoungFunction:
    """Monotone-cubic interpolation of tabulated ``(t, G(t))`` pairs.

    Outside the table the end exponents continue ``G`` as a power law.  When
    ``p_minus``/``p_plus`` are not supplied they are estimated from the
    table and logged.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = t > 0
    t, v = t[keep], v[keep]
    order = np.argsort(t)
    t, v = t[order], v[order]
    if len(t) < 4 or np.any(np.diff(v) <= 0) or np.any(v <= 0):
        raise NonYoung("tabulated G must be positive and strictly increasing (>= 4 rows)")
    lt, lv = np.log(t), np.log(v)
    spline = PchipInterpolator(lt, lv)
    dspline = spline.derivative()
    k_lo, k_hi = float(dspline(lt[0])), float(dspline(lt[-1]))

    def G(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        lx = np.log(x[pos])
        inner = np.exp(spline(np.clip(lx, lt[0], lt[-1])))
        below = v[0] * np.exp(k_lo * (lx - lt[0]))
        above = v[-1] * np.exp(k_hi * (lx - lt[-1]))
        out[pos] = np.where(lx < lt[0], below, np.where(lx > lt[-1], above, inner))
        return out

    ratios = dspline(np.linspace(lt[0], lt[-1], 2000))
    if p_minus is None:
        p_minus = float(ratios.min())
        log.info("%s: p_minus estimated from table as %.6g", name, p_minus)
    if p_plus is None:
        p_plus = float(ratios.max())
        log.info("%s: p_plus estimated from table as %.6g", name, p_plus)
    return YoungFunction(name=name, G=G, g=_fd_density(G), p_minus=p_minus, p_plus=p_plus)


CATALOG = {
    "tp": lambda p=2.0, scale=1.0, **_: power(p, scale),
    "power": lambda p=2.0, scale=1.0, **_: power(p, scale),
    "log_power": lambda p=3.0, **_: log_power(p),
    "log_damped": lambda p=2.0, **_: log_damped(p),
    "double_phase": lambda q=2.0, p=3.0, **_: double_phase(q, p),
}


def make_young(name: str, **params) -> YoungFunction:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown Young function {name!r}; choose from {sorted(CATALOG)}")
    return factory(**{k: float(v) for k, v in params.items() if v is not None})


# --------------------------------------------------------------------------
# sampled extrema


def _refined_extremum(func: ArrayFn, grid: np.ndarray, mode: str) -> tuple[float, float]:
    """Extremum of ``func`` on ``grid`` with one 10x refinement around it.

    Returns ``(value, argument)``.
    """
    grid = np.asarray(grid, dtype=float)
    vals = func(grid)
    pick = np.nanargmin if mode == "min" else np.nanargmax
    k = int(pick(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    if hi > lo:
        n_fine = 10 * (min(k + 1, len(grid) - 1) - max(k - 1, 0)) + 1
        fine = np.geomspace(lo, hi, n_fine) if lo > 0 else np.linspace(lo, hi, n_fine)
        fvals = func(fine)
        j = int(pick(fvals))
        better = fvals[j] < vals[k] if mode == "min" else fvals[j] > vals[k]
        if better:
            return float(fvals[j]), float(fine[j])
    return float(vals[k]), float(grid[k])


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0 or np.any(t <= 0):
        raise ValueError("t_grid must be nonempty and strictly positive")
    if math.log10(t.max() / t.min()) < 8:
        log.debug("t_grid spans fewer than 8 decades (%g..%g)", t.min(), t.max())
    return np.sort(t)


def _ratio(Y: YoungFunction) -> ArrayFn:
    def r(t):
        Gt = Y.G(t)
        if np.any(Gt <= 0):
            raise NonYoung(f"{Y.name}: G vanishes at a positive t")
        return t * Y.g(t) / Gt

    return r


def exponent_bounds(Y: YoungFunction, t_grid=DEFAULT_T_GRID, tol: float = 1e-2) -> tuple[float, float]:
    """Sampled ``(inf, sup)`` of ``t g(t)/G(t)``.

    Raises ``NonYoung`` when a sampled ratio is ``<= 1``, or when the sample
    escapes the declared ``[p_minus - tol, p_plus + tol]`` band.
    """
    t = _check_grid(t_grid)
    r = _ratio(Y)
    lo, _ = _refined_extremum(r, t, "min")
    hi, _ = _refined_extremum(r, t, "max")
    if lo <= 1.0:
        raise NonYoung(f"{Y.name}: t g/G reaches {lo:.6g} <= 1")
    if lo < Y.p_minus - tol or hi > Y.p_plus + tol:
        raise NonYoung(
            f"{Y.name}: sampled exponents ({lo:.6g}, {hi:.6g}) leave declared "
            f"[{Y.p_minus:.6g}, {Y.p_plus:.6g}]"
        )
    return lo, hi


def complementary(Y: YoungFunction, t: float, numeric: bool = False, xtol: float = 1e-14) -> float:
    """``G~(t) = sup_{w>0} (t w - G(w))``.

    Without a closed form the concave objective is maximized on a bracket
    ``[0, b]`` that is doubled until the slope ``t - g(b)`` turns negative;
    the stationary point is then located by Brent's method.
    """
    t = float(t)
    if t < 0:
        raise ValueError("complementary needs t >= 0")
    if t == 0.0:
        return 0.0
    if Y.complementary_closed_form is not None and not numeric:
        return float(Y.complementary_closed_form(np.asarray(t)))
    slope = lambda w: t - float(Y.g(np.asarray(w)))
    b = 1.0
    for _ in range(400):
        if slope(b) < 0:
            break
        b *= 2.0
    else:
        raise MaximizerDiverged(f"{Y.name}: sup_w (t w - G(w)) not attained for t={t:g}")
    a = 0.0
    if slope(b) == 0.0:
        w = b
    else:
        w = optimize.brentq(slope, a, b, xtol=xtol * max(b, 1e-300), rtol=4 * np.finfo(float).eps, maxiter=500)
    val = t * w - float(Y.G(np.asarray(w)))
    return max(val, 0.0)


def legendre_identity_residual(Y: YoungFunction, t: float, numeric: bool = True) -> float:
    """``|G~(g(t)) - (t g(t) - G(t))|``."""
    if t <= 0:
        raise ValueError("t must be positive")
    gt = float(Y.g(np.asarray(t)))
    rhs = t * gt - float(Y.G(np.asarray(t)))
    return abs(complementary(Y, gt, numeric=numeric) - rhs)


def delta2_constant(Y: YoungFunction, t_grid=DEFAULT_T_GRID) -> float:
    """Sampled ``sup G(2t)/G(t)``."""
    t = _check_grid(t_grid)

    def q(x):
        Gx = Y.G(x)
        if np.any(Gx <= 0):
            raise NonYoung(f"{Y.name}: G vanishes at a positive t")
        return Y.G(2.0 * x) / Gx

    return _refined_extremum(q, t, "max")[0]


def two_sided_scaling_check(Y: YoungFunction, a: float, b: float, rtol: float = 1e-10) -> bool:
    """Check ``min(a^p-, a^p+) G(b) <= G(ab) <= max(a^p-, a^p+) G(b)``."""
    if a < 0 or b < 0:
        raise ValueError("a and b must be nonnegative")
    if a == 0 or b == 0:
        return True
    lo_pow, hi_pow = a**Y.p_minus, a**Y.p_plus
    Gb = float(Y.G(np.asarray(b)))
    Gab = float(Y.G(np.asarray(a * b)))
    lo = min(lo_pow, hi_pow) * Gb
    hi = max(lo_pow, hi_pow) * Gb
    slack = rtol * max(abs(Gab), lo, hi)
    return lo - slack <= Gab <= hi + slack


def beta(Y: YoungFunction, s: float, lam: float, t_grid=DEFAULT_T_GRID) -> float:
    """``sup_t G(lam t) / (lam^{1/s} G(t))`` over the grid.

    An overflowing supremum is returned as ``inf`` and logged; unbounded
    values are legitimate.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    t = _check_grid(t_grid)
    scale = lam ** (1.0 / s)

    def q(x):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return Y.G(lam * x) / (scale * Y.G(x))

    with np.errstate(over="ignore", invalid="ignore"):
        val = _refined_extremum(q, t, "max")[0]
    if not np.isfinite(val):
        log.warning("beta(%s, s=%g, lambda=%g) overflowed; reported as inf", Y.name, s, lam)
        return math.inf
    return val


def _decays_to_zero(values: np.ndarray, ratio: float = 1e-3, rtol: float = 1e-9) -> bool:
    """Monotone-decay decision for a probe sequence ordered toward the limit."""
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        return False
    tail = v[len(v) // 2 :]
    d = np.diff(tail)
    scale = np.maximum(np.abs(tail[:-1]), np.abs(tail[1:]))
    up = d > rtol * scale
    down = d < -rtol * scale
    if np.any(up) and np.any(down):
        raise Inconclusive("probe sequence is not monotone near the limit")
    if np.any(up):
        return False
    return bool(v[-1] < ratio * v[0])


def default_probe(toward: str, decades: int = 12, per_decade: int = 2) -> np.ndarray:
    k = np.arange(decades * per_decade + 1) / per_decade
    return 10.0 ** (-k) if toward == "zero" else 10.0**k


def classify_theorem2_case(
    Y: YoungFunction,
    s: float,
    dim: int,
    case_id: int,
    decades: int = 12,
    t_grid=DEFAULT_T_GRID,
) -> bool:
    """Decide the liminf hypotheses of the three geometric cases empirically.

    Each limit is probed with a geometric sequence over ``decades`` decades;
    it counts as zero when the sequence decreases toward the limit and its
    last value is below ``1e-3`` of its first.  Conditions combine with the
    case's and/or structure; an undecidable leg raises ``Inconclusive`` only
    when the others do not already settle the answer.
    """
    if case_id not in (1, 2, 3):
        raise ValueError("case_id must be 1, 2 or 3")
    w = (1.0 - dim) / s

    def leg(toward, weighted):
        lam = default_probe(toward, decades)
        vals = np.array([beta(Y, s, l, t_grid) for l in lam])
        if weighted:
            with np.errstate(over="ignore", invalid="ignore"):
                vals = lam**w * vals
        try:
            return _decays_to_zero(vals)
        except Inconclusive:
            return None

    def any_of(*legs):
        got = [f() for f in legs]
        if any(x is True for x in got):
            return True
        if all(x is False for x in got):
            return False
        raise Inconclusive(f"case {case_id}: limit behaviour undecided")

    def all_of(*legs):
        got = [f() for f in legs]
        if any(x is False for x in got):
            return False
        if all(x is True for x in got):
            return True
        return None

    if case_id == 1:
        return any_of(lambda: leg("zero", False))
    if case_id == 2:
        return any_of(lambda: leg("zero", False), lambda: leg("inf", False))
    return any_of(
        lambda: all_of(lambda: leg("inf", True), lambda: leg("zero", False)),
        lambda: leg("zero", True),
        lambda: leg("inf", False),
    )


# --------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class KernelSpec:
    """Pair ``(M, Nker)`` weighting ``G((u(x)-u(y))/M(r)) / Nker(r)``."""

    M: ArrayFn
    Nker: ArrayFn
    fractional: Optional[tuple[float, int]] = None
    name: str = "general"

    @classmethod
    def fractional_kernel(cls, s: float, dim: int) -> "KernelSpec":
        if not 0.0 < s < 1.0:
            raise ValueError("s must lie in (0, 1)")
        return cls(
            M=lambda r: np.asarray(r, dtype=float) ** s,
            Nker=lambda r: np.asarray(r, dtype=float) ** dim,
            fractional=(float(s), int(dim)),
            name=f"fractional(s={s:g}, N={dim})",
        )

    @property
    def s(self) -> Optional[float]:
        return None if self.fractional is None else self.fractional[0]


@dataclass
class KernelReport:
    m1: bool
    m2: bool
    m3: bool
    head_integral: float
    tail_integral: float
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> tuple[bool, bool, bool]:
        return self.m1, self.m2, self.m3


def _power_slope(f: ArrayFn, r: np.ndarray) -> float:
    vals = f(r)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        return math.nan
    return float(np.polyfit(np.log(r), np.log(vals), 1)[0])


def _log_quad(f: ArrayFn, a: float, b: float) -> float:
    val, _ = integrate.quad(
        lambda w: float(f(np.asarray(math.exp(w)))) * math.exp(w),
        math.log(a),
        math.log(b),
        limit=400,
        epsabs=0.0,
        epsrel=1e-10,
    )
    return val


def kernel_conditions_check(
    K: KernelSpec, p_minus: float, dim: int, r_min: float = 1e-8, r_max: float = 1e8
) -> KernelReport:
    """Sampled monotonicity/positivity, the lower bound on ``M``, and the two
    integrability conditions (adaptive quadrature plus power-law extrapolation
    of the ends)."""
    r = log_grid(r_min, r_max, 20)
    try:
        Mv, Nv = np.asarray(K.M(r), dtype=float), np.asarray(K.Nker(r), dtype=float)
    except Exception as exc:
        raise ValueError(f"kernel evaluation failed: {exc}") from exc
    notes = []
    m1 = bool(
        np.all(Mv > 0) and np.all(Nv > 0) and np.all(np.diff(Mv) >= -1e-12 * Mv[1:])
        and np.all(np.diff(Nv) >= -1e-12 * Nv[1:])
    )
    m2 = bool(np.all(Mv >= np.minimum(1.0, r) * (1 - 1e-12)))

    head = lambda x: np.asarray(x) ** (dim - 1 + p_minus) / (K.Nker(x) * K.M(x) ** p_minus)
    tail = lambda x: np.asarray(x) ** (dim - 1) / (K.Nker(x) * K.M(x) ** p_minus)

    a0 = _power_slope(head, np.geomspace(r_min, 100 * r_min, 8))
    a1 = _power_slope(tail, np.geomspace(r_max / 100, r_max, 8))
    head_val = tail_val = math.inf
    if not (a0 > -1.0 + 1e-6):
        notes.append(f"TailNonconvergent: integrand ~ r^{a0:.3f} at 0")
    else:
        head_val = _log_quad(head, r_min, 1.0) + float(head(np.asarray(r_min))) * r_min / (a0 + 1.0)
    if not (a1 < -1.0 - 1e-6):
        notes.append(f"TailNonconvergent: integrand ~ r^{a1:.3f} at infinity")
    else:
        tail_val = _log_quad(tail, 1.0, r_max) + float(tail(np.asarray(r_max))) * r_max / (-a1 - 1.0)
    m3 = bool(np.isfinite(head_val) and np.isfinite(tail_val))
    return KernelReport(m1, m2, m3, head_val, tail_val, notes)
