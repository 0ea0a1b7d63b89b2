"""Cubature for singular double integrals and exterior tail integrals.

Double integrals over ``A x B`` use the midpoint rule on a cell lattice.
Cell pairs within ``reach`` cells of the diagonal are split dyadically, and
touching sub-pairs keep splitting down to ``diagonal_split_depth`` levels.
The coincident sub-cells left at the bottom are *not* evaluated; their
contribution enters the error bound through the closed-form local estimate

    int_{|z| < rho} |z|^{kappa - N} dz = sigma_{N-1} rho^kappa / kappa.

Exterior integrals ``int_{R^N \\ D} k(|x - y|) dy`` are done in polar
coordinates around ``x``: the radial part is exact (through a primitive of
the radial density) on the ray segments that leave ``D``; the angular part
is a periodic trapezoid rule in 2D and exact in 1D.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import Indistinguishable, NonIntegrableSingularity, OnBoundary
from .geometry import Domain, Lattice, symmetrized_set, symmetric_difference_measure, unit_sphere_area

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


@dataclass
class Estimate:
    """A value with an error bound and provenance."""

    value: float
    error_bound: float
    metadata: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)

    def __add__(self, other):
        if isinstance(other, Estimate):
            return Estimate(self.value + other.value, self.error_bound + other.error_bound,
                            {"terms": [self.metadata, other.metadata]})
        return Estimate(self.value + other, self.error_bound, self.metadata)

    def scaled(self, c: float) -> "Estimate":
        return Estimate(c * self.value, abs(c) * self.error_bound, self.metadata)


@dataclass(frozen=True)
class CubatureSpec:
    """Resolution and refinement controls.

    ``base_resolution`` counts cells along the longest side of the region
    being integrated; each of the ``refinement_levels`` halves the spacing.
    """

    base_resolution: int = 64
    refinement_levels: int = 2
    diagonal_split_depth: Optional[int] = None
    truncation_radius: Optional[float] = None
    tolerance: float = 1e-3
    reach: int = 2
    angles: Optional[int] = None

    def __post_init__(self):
        if self.refinement_levels < 1:
            raise ValueError("refinement_levels must be >= 1")
        if self.diagonal_split_depth is not None and self.diagonal_split_depth < 2:
            raise ValueError("diagonal_split_depth must be >= 2")

    def depth(self, dim: int) -> int:
        if self.diagonal_split_depth is not None:
            return self.diagonal_split_depth
        return {1: 10, 2: 4}.get(dim, 2)

    def n_angles(self, level: int) -> int:
        base = self.angles if self.angles is not None else max(64, 2 * self.base_resolution)
        return base * 2**level


def richardson_factor(order: float) -> float:
    """Multiplier turning a two-level difference into an error estimate (>= 1)."""
    return max(1.0, 1.0 / (2.0 ** min(order, 2.0) - 1.0))


# --------------------------------------------------------------------------
# near-diagonal subdivision patterns


@dataclass(frozen=True)
class NearPattern:
    """Sub-cell pairs for one cell offset ``delta`` (units of the cell width).

    ``a`` and ``b`` are sub-cell centers relative to the centers of the
    x-cell and the y-cell; ``w`` are the pair weights in units of ``h^{2N}``.
    """

    delta: tuple
    a: np.ndarray
    b: np.ndarray
    w: np.ndarray
    omitted: int

    @property
    def r(self) -> np.ndarray:
        return np.linalg.norm(np.asarray(self.delta) + self.b - self.a, axis=-1)


@functools.lru_cache(maxsize=64)
def near_patterns(dim: int, depth: int, reach: int) -> dict:
    """Dyadic near-diagonal subdivision rules for every offset ``|delta| <= reach``."""
    kids = np.array(list(itertools.product((-0.25, 0.25), repeat=dim)))
    out = {}
    for delta in itertools.product(range(-reach, reach + 1), repeat=dim):
        A = np.zeros((1, dim))
        B = np.asarray(delta, float)[None, :]
        size = 1.0
        la, lb, lw = [], [], []
        omitted = 0
        for level in range(1, depth + 1):
            A2 = (A[:, None, None, :] + size * kids[None, :, None, :])
            B2 = (B[:, None, None, :] + size * kids[None, None, :, :])
            A2 = np.broadcast_to(A2, (len(A), len(kids), len(kids), dim)).reshape(-1, dim)
            B2 = np.broadcast_to(B2, (len(B), len(kids), len(kids), dim)).reshape(-1, dim)
            size *= 0.5
            cheb = np.max(np.abs(A2 - B2 + np.asarray(delta) * 0), axis=1) / size
            touching = cheb <= 1.0 + 1e-9
            if level < depth:
                leaf = ~touching
            else:
                same = cheb <= 1e-9
                omitted += int(same.sum())
                leaf = ~same
                touching = np.zeros_like(touching)
            la.append(A2[leaf])
            lb.append(B2[leaf])
            lw.append(np.full(int(leaf.sum()), size ** (2 * dim)))
            A, B = A2[touching], B2[touching]
            if len(A) == 0:
                break
        a = np.concatenate(la)
        b = np.concatenate(lb) - np.asarray(delta, float)
        out[delta] = NearPattern(delta, a, b, np.concatenate(lw), omitted)
    return out


def _interp_weights(points: np.ndarray, radius: int) -> np.ndarray:
    """Multilinear interpolation weights of ``points`` (units of h, relative to
    a cell center) over the stencil ``{-radius..radius}^dim``.

    Returns an array ``(K, (2 radius + 1)^dim)`` in C order over the stencil.
    """
    K, dim = points.shape
    side = 2 * radius + 1
    W = np.zeros((K, side**dim))
    base = np.floor(points).astype(int)
    frac = points - base
    for corner in itertools.product((0, 1), repeat=dim):
        c = np.asarray(corner)
        wt = np.prod(np.where(c == 1, frac, 1.0 - frac), axis=1)
        node = base + c + radius
        if np.any(node < 0) or np.any(node >= side):
            raise ValueError("interpolation stencil too small")
        flat = np.ravel_multi_index(tuple(node.T), (side,) * dim)
        np.add.at(W, (np.arange(K), flat), wt)
    return W


def _stencil_values(padded: np.ndarray, idx: np.ndarray, radius: int, pad: int) -> np.ndarray:
    """Gather ``(P, (2 radius+1)^dim)`` neighbourhoods of cells ``idx`` (P, dim)."""
    dim = idx.shape[1]
    offs = np.array(list(itertools.product(range(-radius, radius + 1), repeat=dim)))
    pos = idx[:, None, :] + offs[None, :, :] + pad
    return padded[tuple(pos[..., a] for a in range(dim))]


# --------------------------------------------------------------------------
# pair sums


PairKernel = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass
class PairSumResult:
    value: float
    far: float
    near: float
    omitted_cells: int
    eta: float


def difference_pair_sum(
    lattice: Lattice,
    values: np.ndarray,
    weights: np.ndarray,
    kernel: PairKernel,
    depth: int,
    reach: int = 2,
    active: Optional[np.ndarray] = None,
    transpose: bool = False,
    chunk: int = 1 << 21,
) -> PairSumResult:
    """``sum_{i,j} w_i w_j int_{cell i} int_{cell j} F(u(x), u(y), |x - y|)``.

    ``F(a, b, r)`` must vanish when ``a == b``; then only pairs with an
    endpoint in ``active`` (cells where the interpolant may vary) contribute:
    pairs inside ``active`` count once, pairs leaving it count twice.
    """
    dim = lattice.dim
    h = lattice.h
    vals = np.asarray(values, float)
    if active is None:
        active = ndimage_dilate(vals > 0)
    live = weights > 0
    act_idx = np.argwhere(active & live)
    oth_idx = np.argwhere(live)
    if len(act_idx) == 0:
        return PairSumResult(0.0, 0.0, 0.0, 0, h / 2**depth)
    C = lattice.centers()
    hv = h ** (2 * dim)

    # far field: cell centers
    xa = C[tuple(act_idx.T)]
    ua = vals[tuple(act_idx.T)]
    wa = weights[tuple(act_idx.T)]
    xo = C[tuple(oth_idx.T)]
    uo = vals[tuple(oth_idx.T)]
    wo = weights[tuple(oth_idx.T)] * np.where(active[tuple(oth_idx.T)], 1.0, 2.0)
    far = 0.0
    step = max(1, chunk // max(len(oth_idx), 1))
    for s0 in range(0, len(act_idx), step):
        sl = slice(s0, s0 + step)
        cheb = np.max(np.abs(act_idx[sl, None, :] - oth_idx[None, :, :]), axis=-1)
        r = np.linalg.norm(xa[sl, None, :] - xo[None, :, :], axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            if transpose:
                F = kernel(uo[None, :], ua[sl, None], r)
            else:
                F = kernel(ua[sl, None], uo[None, :], r)
        F = np.where(cheb > reach, F, 0.0)
        far += float(np.sum((wa[sl, None] * wo[None, :]) * F))
    far *= hv

    # near field: dyadic patterns, values by interpolation from the stencil
    pats = near_patterns(dim, depth, reach)
    rad = reach + 1
    pad = rad + 1
    padded = np.pad(vals, pad)
    wpad = np.pad(weights, pad)
    apad = np.pad(active, pad)
    stencil = _stencil_values(padded, act_idx, rad, pad)
    near = 0.0
    omitted = 0
    for delta, pat in pats.items():
        j = act_idx + np.asarray(delta)
        wj = wpad[tuple((j + pad).T)]
        ok = wj > 0
        if not np.any(ok):
            continue
        fac = wa[ok] * wj[ok] * np.where(apad[tuple((j[ok] + pad).T)], 1.0, 2.0)
        WA = _interp_weights(pat.a, rad)
        WB = _interp_weights(pat.b + np.asarray(delta), rad)
        st = stencil[ok]
        r = pat.r * h
        rows = max(1, chunk // max(len(pat.w), 1))
        for s0 in range(0, len(st), rows):
            blk = st[s0:s0 + rows]
            UA = blk @ WA.T
            UB = blk @ WB.T
            with np.errstate(divide="ignore", invalid="ignore"):
                F = kernel(UB, UA, r[None, :]) if transpose else kernel(UA, UB, r[None, :])
            near += float(np.sum(fac[s0:s0 + rows, None] * (F * pat.w[None, :])))
        if not any(delta):
            omitted = pat.omitted
    near *= hv
    return PairSumResult(far + near, far, near, omitted, h / 2**depth)


def ndimage_dilate(mask: np.ndarray) -> np.ndarray:
    from scipy import ndimage

    return ndimage.binary_dilation(mask, structure=np.ones((3,) * mask.ndim, bool))


def _general_pair_sum(f, lattice, wA, wB, depth, reach, symmetric=False, chunk=1 << 21):
    dim = lattice.dim
    h = lattice.h
    C = lattice.centers()
    ia = np.argwhere(wA > 0)
    ib = np.argwhere(wB > 0)
    xa, xb = C[tuple(ia.T)], C[tuple(ib.T)]
    wa, wb = wA[tuple(ia.T)], wB[tuple(ib.T)]
    fa = np.ravel_multi_index(tuple(ia.T), lattice.shape)
    fb = np.ravel_multi_index(tuple(ib.T), lattice.shape)
    far = 0.0
    step = max(1, chunk // max(len(ib), 1))
    for s0 in range(0, len(ia), step):
        sl = slice(s0, s0 + step)
        cheb = np.max(np.abs(ia[sl, None, :] - ib[None, :, :]), axis=-1)
        X = np.broadcast_to(xa[sl, None, :], (len(xa[sl]), len(xb), dim))
        Y = np.broadcast_to(xb[None, :, :], (len(xa[sl]), len(xb), dim))
        with np.errstate(divide="ignore", invalid="ignore"):
            F = np.asarray(f(X, Y), float)
        mult = wa[sl, None] * wb[None, :]
        if symmetric:
            order = np.sign(fb[None, :] - fa[sl, None])
            mult = mult * np.where(order > 0, 2.0, np.where(order == 0, 1.0, 0.0))
        far += float(np.sum(np.where(cheb > reach, F * mult, 0.0)))
    near = 0.0
    omitted = 0
    wbpad = np.pad(wB, reach)
    for delta, pat in near_patterns(dim, depth, reach).items():
        d = np.asarray(delta)
        if symmetric:
            first = next((x for x in delta if x != 0), 0)
            if first < 0:
                continue
            mult = 2.0 if first > 0 else 1.0
        else:
            mult = 1.0
        j = ia + d
        wj = wbpad[tuple((j + reach).T)]
        ok = wj > 0
        if not np.any(ok):
            continue
        X = xa[ok][:, None, :] + h * pat.a[None]
        Y = xa[ok][:, None, :] + h * (d + pat.b)[None]
        with np.errstate(divide="ignore", invalid="ignore"):
            F = np.asarray(f(X, Y), float)
        near += mult * float(np.sum((wa[ok] * wj[ok])[:, None] * F * pat.w[None, :]))
        if not any(delta):
            omitted = pat.omitted
    return (far + near) * h ** (2 * dim)


def local_ball_integral(dim: int, rho: float, kappa: float) -> float:
    """``int_{|z| < rho} |z|^{kappa - N} dz``."""
    return unit_sphere_area(dim) * rho**kappa / kappa


def fit_diagonal_exponent(f, points: np.ndarray, r: np.ndarray) -> float:
    """Least-squares slope of ``log |f(x, x + r e)|`` against ``log r``."""
    points = np.atleast_2d(points)
    dim = points.shape[1]
    e = np.ones(dim) / math.sqrt(dim)
    slopes = []
    for x in points:
        X = np.broadcast_to(x, (len(r), dim))
        Y = x + r[:, None] * e
        v = np.abs(np.asarray(f(X, Y), float))
        good = np.isfinite(v) & (v > 0)
        if good.sum() >= 3:
            slopes.append(np.polyfit(np.log(r[good]), np.log(v[good]), 1)[0])
    return float(np.median(slopes)) if slopes else 0.0


def double_integral(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    A: Domain,
    B: Domain,
    spec: CubatureSpec = CubatureSpec(),
    singularity: Optional[tuple] = None,
    symmetric: bool = False,
) -> Estimate:
    """``int_A int_B f(x, y) dy dx`` for ``f`` with at worst an integrable
    diagonal singularity ``|f| <= C |x - y|^{kappa - N}``.

    ``singularity=(C, kappa)`` supplies the local model; otherwise it is fitted
    from samples and ``NonIntegrableSingularity`` is raised when the fitted
    exponent is ``<= -N``.
    """
    dim = A.dim
    lo = np.minimum(A.bounding_box()[0], B.bounding_box()[0])
    hi = np.maximum(A.bounding_box()[1], B.bounding_box()[1])
    extent = float(np.max(hi - lo))
    depth = spec.depth(dim)
    vals, hs = [], []
    for lev in range(spec.refinement_levels):
        h = extent / (spec.base_resolution * 2**lev)
        lat = Lattice.covering(lo, hi, h)
        wA, wB = A.cell_fractions(lat), B.cell_fractions(lat)
        vals.append(_general_pair_sum(f, lat, wA, wB, depth, spec.reach, symmetric=symmetric))
        hs.append(h)
    h = hs[-1]
    overlap_measure = float(np.sum(np.minimum(wA, wB))) * lat.cell_volume
    if singularity is None:
        inside = np.argwhere(np.minimum(wA, wB) >= 1.0)
        pick = inside[np.linspace(0, len(inside) - 1, min(5, len(inside))).astype(int)] if len(inside) else []
        pts = lat.centers()[tuple(np.asarray(pick).T)] if len(pick) else np.zeros((0, dim))
        r = h * 0.5 ** np.arange(2, 12)
        slope = fit_diagonal_exponent(f, pts, r) if len(pts) else 0.0
        if slope <= -dim:
            raise NonIntegrableSingularity(slope, dim)
        kappa = slope + dim
        coef = 0.0
        e = np.ones(dim) / math.sqrt(dim)
        for x in pts:
            v = np.abs(np.asarray(f(np.broadcast_to(x, (len(r), dim)), x + r[:, None] * e), float))
            coef = max(coef, float(np.max(v * r ** (-slope))))
        coef *= 1.5
    else:
        coef, kappa = singularity
    eta = h / 2**depth
    diag = overlap_measure * coef * local_ball_integral(dim, math.sqrt(dim) * eta, kappa)
    rich = abs(vals[-1] - vals[-2]) * richardson_factor(kappa) if len(vals) > 1 else math.inf
    return Estimate(
        vals[-1],
        rich + diag,
        {"levels": vals, "h": hs, "diagonal_bound": diag, "kappa": kappa, "depth": depth},
    )


# --------------------------------------------------------------------------
# exterior (tail) integrals along rays


def _directions(dim: int, n: int):
    if dim == 1:
        return np.array([[-1.0], [1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        th = 2 * np.pi * (np.arange(n) + 0.5) / n + 1e-3
        return np.stack([np.cos(th), np.sin(th)], -1), np.full(n, 2 * np.pi / n)
    raise NotImplementedError("exterior integrals are implemented for dimensions 1 and 2")


@dataclass(frozen=True)
class RadialProfile:
    """Radial density ``phi_a(rho) = G(a/M(rho)) / Nker(rho) * rho^{N-1}``
    through its upper primitive ``Psi_a(rho) = int_rho^inf phi_a``."""

    upper: Callable[[np.ndarray, np.ndarray], np.ndarray]
    tail_bound: Callable[[np.ndarray, float], np.ndarray]

    @classmethod
    def fractional(cls, Y, s: float) -> "RadialProfile":
        pm, pp = Y.p_minus, Y.p_plus

        def upper(a, rho):
            with np.errstate(divide="ignore", over="ignore"):
                return Y.primitive(a * rho ** (-s)) / s

        def tail_bound(a, R):
            Ga = Y.G(np.asarray(a, float))
            if R >= 1.0:
                return Ga * R ** (-s * pm) / (s * pm)
            return Ga * ((R ** (-s * pp) - 1.0) / (s * pp) + 1.0 / (s * pm))

        return cls(upper, tail_bound)

    @classmethod
    def general(cls, Y, kernel, dim: int) -> "RadialProfile":
        def dens(a, rho):
            return Y.G(a / kernel.M(rho)) / kernel.Nker(rho) * rho ** (dim - 1)

        def seg(a, lo, hi):
            lo_l, hi_l = np.log(lo), np.log(hi)
            w = 0.5 * (hi_l - lo_l)[..., None] * (_GL_X + 1.0) + lo_l[..., None]
            rr = np.exp(w)
            return 0.5 * (hi_l - lo_l) * np.sum(dens(a[..., None], rr) * rr * _GL_W, axis=-1)

        def upper(a, rho):
            a = np.asarray(a, float)
            rho = np.broadcast_to(np.asarray(rho, float), a.shape)
            out = np.zeros(a.shape)
            lo = rho.copy()
            for _ in range(12):
                hi = lo * 100.0
                out += seg(a, lo, hi)
                lo = hi
            return out

        def tail_bound(a, R):
            return upper(np.asarray(a, float), np.full(np.shape(a), R))

        return cls(upper, tail_bound)


def exterior_ray_integrals(
    D: Domain,
    X: np.ndarray,
    amplitudes: np.ndarray,
    profile: RadialProfile,
    R_t: float,
    n_angles: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point ``int_{(R^N \\ D) cap B_{R_t}(x)} phi`` and remainder bounds."""
    X = np.atleast_2d(np.asarray(X, float))
    a = np.asarray(amplitudes, float)
    dirs, dw = _directions(D.dim, n_angles)
    M, K = len(X), len(dirs)
    O = np.repeat(X, K, axis=0)
    Dd = np.tile(dirs, (M, 1))
    A = np.repeat(a, K)
    tin, tout = D.ray_hits(O, Dd)
    tin = np.clip(tin, 0.0, R_t)
    tout = np.clip(tout, 0.0, R_t)
    empty = tout <= tin
    tin = np.where(empty, R_t, tin)
    tout = np.where(empty, R_t, tout)
    times = np.concatenate([tin, tout], axis=1)
    delta = np.concatenate([np.ones_like(tin), -np.ones_like(tout)], axis=1)
    order = np.argsort(times, axis=1, kind="stable")
    T = np.take_along_axis(times, order, axis=1)
    dl = np.take_along_axis(delta, order, axis=1)
    cov = np.cumsum(dl, axis=1)
    if np.any(T[:, 0] > 0):
        raise OnBoundary("a source point lies outside the domain or on its boundary")
    nxt = np.concatenate([T[:, 1:], np.full((len(T), 1), R_t)], axis=1)
    gap = (cov <= 0) & (nxt > T)
    lo = np.where(gap, T, 1.0)
    hi = np.where(gap, nxt, 1.0)
    Acol = np.broadcast_to(A[:, None], lo.shape)
    seg = np.where(gap, profile.upper(Acol, lo) - profile.upper(Acol, hi), 0.0)
    per_ray = seg.sum(axis=1).reshape(M, K)
    values = per_ray @ dw
    bound = profile.tail_bound(a, R_t) * dw.sum()
    return values, np.asarray(bound, float) * np.ones(M)


def exterior_tail_integral(
    x,
    Y,
    s: float,
    amplitude: float,
    D: Domain,
    spec: CubatureSpec = CubatureSpec(),
    min_distance: Optional[float] = None,
) -> Estimate:
    """``int_{R^N \\ D} G(a / |x - y|^s) |x - y|^{-N} dy`` with its error budget.

    The value covers ``|x - y| < R_t``; the analytic bound on the rest is in
    ``error_bound``.  ``R_t`` starts at the given truncation radius (default
    eight domain circumradii) and doubles until that bound falls under
    ``spec.tolerance`` of the value.
    """
    x = np.atleast_1d(np.asarray(x, float))
    if amplitude == 0:
        return Estimate(0.0, 0.0, {"R_t": None})
    dist = D.distance_to_boundary(x)
    if min_distance is not None and dist < min_distance:
        raise OnBoundary(f"source point within {min_distance:g} of the boundary")
    profile = RadialProfile.fractional(Y, s)
    R = spec.truncation_radius or 8.0 * D.circumradius()
    R = max(R, 2.0 * dist)
    levels = []
    for lev in range(spec.refinement_levels if D.dim > 1 else 1):
        n = spec.n_angles(lev)
        while True:
            v, b = exterior_ray_integrals(D, x[None, :], np.array([amplitude]), profile, R, n)
            if b[0] <= spec.tolerance * v[0] or R > 1e12:
                break
            R *= 2.0
        levels.append((float(v[0]), float(b[0])))
    val, tail = levels[-1]
    rich = abs(levels[-1][0] - levels[-2][0]) if len(levels) > 1 else 0.0
    return Estimate(val, tail + rich, {"R_t": R, "levels": [l[0] for l in levels], "tail_bound": tail})


# --------------------------------------------------------------------------
# radial comparison (rearrangement of sets against radial weights)


@dataclass
class RadialComparison:
    interior_sym: Estimate
    interior: Estimate
    exterior: Estimate
    exterior_sym: Estimate

    @property
    def interior_pass(self) -> bool:
        return self.interior_sym.value - self.interior.value > self.interior_sym.error_bound + self.interior.error_bound

    @property
    def exterior_pass(self) -> bool:
        return self.exterior.value - self.exterior_sym.value > self.exterior.error_bound + self.exterior_sym.error_bound


def _radial_over(f, D: Domain, outside: bool, n_angles: int, R: float):
    """``int f(|y|) dy`` over ``D`` (or its complement) along rays from 0."""
    from scipy import integrate

    dirs, dw = _directions(D.dim, n_angles)
    O = np.zeros_like(dirs)
    tin, tout = D.ray_hits(O, dirs)
    total = 0.0
    err = 0.0
    for k in range(len(dirs)):
        ivs = sorted((max(a, 0.0), b) for a, b in zip(tin[k], tout[k]) if b > max(a, 0.0))
        merged = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        if outside:
            segs, cur = [], 0.0
            for a, b in merged:
                if a > cur:
                    segs.append((cur, a))
                cur = max(cur, b)
            segs.append((cur, np.inf))
        else:
            segs = merged
        for a, b in segs:
            val, e = integrate.quad(lambda r: f(r) * r ** (D.dim - 1), a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
            total += dw[k] * val
            err += dw[k] * e
    return total, err


def radial_comparison_check(
    f: Callable[[float], float],
    D: Domain,
    n_angles: int = 512,
) -> RadialComparison:
    """Both sides of the interior and exterior rearrangement inequalities for a
    radial, strictly decreasing weight ``f(|y|)``.

    Raises ``Indistinguishable`` when neither inequality clears its error
    bounds, and ``ValueError`` when ``D`` already equals its symmetrization.
    """
    Ds = symmetrized_set(D)
    if symmetric_difference_measure(D, Ds, resolution=512) <= 1e-9:
        raise ValueError("domain coincides with its symmetrization; the comparison is an equality")
    R = np.inf
    parts = {}
    for key, dom, outside in [
        ("interior_sym", Ds, False),
        ("interior", D, False),
        ("exterior", D, True),
        ("exterior_sym", Ds, True),
    ]:
        v, e = _radial_over(f, dom, outside, n_angles, R)
        if D.dim == 2:
            v2, _ = _radial_over(f, dom, outside, n_angles // 2, R)
            e += abs(v - v2)
        parts[key] = Estimate(v, e, {"domain": str(dom)})
    res = RadialComparison(**parts)
    if not (res.interior_pass or res.exterior_pass):
        raise Indistinguishable("rearrangement comparison within error bounds")
    return res
