"""Modulars and fractional Orlicz-Sobolev seminorms of grid functions.

Every seminorm is the double integral

    I[u] = int int G(|u(x) - u(y)| / M(|x - y|)) / Nker(|x - y|) dx dy

over a region of pairs: ``domain`` (Omega x Omega), ``fullspace``
(R^N x R^N) or ``cross`` (Omega x (R^N minus Omega)).  The fractional kernel
``M = r^s, Nker = r^N`` is just one ``KernelSpec``; the evaluator never looks
at ``s`` except to pick the closed-form radial primitive for exterior rays.

Inside the integrand a grid function is its multilinear interpolant, so pair
differences vanish linearly at the diagonal.  Values at several resolutions
(the *hierarchy*) give the Richardson part of each error bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate, ndimage

from .errors import NonIntegrableSingularity
from .geometry import Box, Domain, GridFunction, Lattice, unit_sphere_area
from .quadrature import (
    CubatureSpec,
    Estimate,
    RadialProfile,
    difference_pair_sum,
    exterior_ray_integrals,
    near_patterns,
    richardson_factor,
)
from .young import KernelSpec, YoungFunction

log = logging.getLogger(__name__)

REGIONS = ("domain", "fullspace", "cross")

Source = Union[GridFunction, Callable, Sequence[GridFunction]]


@dataclass(frozen=True)
class SeminormRequest:
    """What to integrate and where.

    ``u`` is a ``GridFunction`` (finer levels are resampled from its
    interpolant), a callable on points of shape ``(..., N)`` (sampled on
    lattices of ``spec.base_resolution * 2**level`` cells along the longest
    side of ``domain``, with ``anchor`` a cell center), or an explicit list
    of grid functions, one per level.
    """

    u: Source
    Y: YoungFunction
    kernel: KernelSpec
    domain: Domain
    region: str = "domain"
    spec: CubatureSpec = field(default_factory=CubatureSpec)
    anchor: Optional[tuple] = None
    transpose: bool = False

    def __post_init__(self):
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {REGIONS}")
        if self.kernel.fractional is not None and self.kernel.fractional[1] != self.domain.dim:
            raise ValueError("kernel dimension does not match the domain")


def fractional_request(u, Y, s, domain, region="domain", spec=None, **kw) -> SeminormRequest:
    """Shorthand for the fractional kernel ``M = r^s``, ``Nker = r^N``."""
    return SeminormRequest(
        u, Y, KernelSpec.fractional_kernel(s, domain.dim), domain, region, spec or CubatureSpec(), **kw
    )


# --------------------------------------------------------------------------
# grid hierarchy


def embed(u: GridFunction, lo, hi) -> GridFunction:
    """Zero-extend ``u`` to an aligned lattice covering ``[lo, hi]`` and its own box."""
    blo, bhi = u.box
    lo = np.minimum(np.asarray(lo, float), blo + 0.5 * u.h)
    hi = np.maximum(np.asarray(hi, float), bhi - 0.5 * u.h)
    lat = Lattice.covering(lo, hi, u.h, anchor=u.lattice.origin)
    off = np.rint((np.asarray(u.lattice.origin) - np.asarray(lat.origin)) / u.h).astype(int)
    if np.all(off == 0) and lat.shape == u.shape:
        return u
    vals = np.zeros(lat.shape)
    vals[tuple(slice(o, o + n) for o, n in zip(off, u.shape))] = u.values
    return GridFunction(vals, lat, u.domain)


def shrink_support(u: GridFunction, domain: Domain, cells: float = 2.0) -> GridFunction:
    """Zero the cells with ``u > 0`` that lie outside ``domain`` or within
    ``cells`` widths of its boundary, logging how many were dropped."""
    pos = np.argwhere(u.values > 0)
    if len(pos) == 0:
        return u
    C = u.centers()[tuple(pos.T)]
    inside = domain.contains(C)
    close = ~inside
    if np.any(inside):
        d = domain.distance_to_boundary(C[inside])
        close[inside] = d < cells * u.h
    if not np.any(close):
        return u
    log.warning("support shrinkage: zeroing %d cell(s) within %g cells of the boundary", int(close.sum()), cells)
    vals = u.values.copy()
    vals[tuple(pos[close].T)] = 0.0
    return GridFunction(vals, u.lattice, u.domain)


def hierarchy(u: Source, domain: Domain, spec: CubatureSpec, anchor=None) -> list:
    """Grid functions for levels ``0 .. spec.refinement_levels - 1``, each
    covering ``domain``."""
    lo, hi = domain.bounding_box()
    if isinstance(u, GridFunction):
        levels = [u] + [u.refined(2**l) for l in range(1, spec.refinement_levels)]
    elif callable(u):
        extent = float(np.max(hi - lo))
        levels = []
        for l in range(spec.refinement_levels):
            h = extent / (spec.base_resolution * 2**l)
            lat = Lattice.covering(lo, hi, h, anchor=anchor)
            levels.append(GridFunction.sample(u, lat, domain))
    else:
        levels = list(u)
        if not levels:
            raise ValueError("empty grid hierarchy")
    return [embed(v, lo, hi) for v in levels]


# --------------------------------------------------------------------------
# kernels and local bounds


def pair_kernel(Y: YoungFunction, kernel: KernelSpec):
    """``F(a, b, r) = G(|a - b| / M(r)) / Nker(r)``."""

    def F(a, b, r):
        return Y.G(np.abs(a - b) / kernel.M(r)) / kernel.Nker(r)

    return F


def diagonal_constant(Y: YoungFunction, kernel: KernelSpec, dim: int, rho: float) -> tuple[float, float]:
    """``J(rho) = sigma_{N-1} int_0^rho (r/M(r))^{p-} r^{N-1} / Nker(r) dr``
    and its local order ``kappa = d log J / d log rho``.

    For ``|u(x) - u(y)| <= L |x - y|`` and ``rho <= 1`` the two-sided scaling
    bound gives ``int_{|z| < rho} F(u(x), u(x+z), |z|) dz <= G(L) J(rho)``.
    """
    pm = Y.p_minus
    if kernel.fractional is not None:
        s, N = kernel.fractional
        kappa = (1.0 - s) * pm
        return unit_sphere_area(dim) * rho**kappa / kappa, kappa

    def dens(w):
        r = np.exp(w)
        return float((r / kernel.M(r)) ** pm * r**dim / kernel.Nker(r))

    def J(top):
        lo = math.log(top) - 80.0
        if dens(lo) > 1e-12 * max(dens(math.log(top)), 1e-300):
            raise NonIntegrableSingularity(
                math.log(dens(lo + 1.0) / dens(lo)) - dim, dim
            )
        val, _ = integrate.quad(dens, lo, math.log(top), limit=400, epsabs=0.0, epsrel=1e-10)
        return unit_sphere_area(dim) * val

    j1, j2 = J(rho), J(0.5 * rho)
    return j1, math.log(j1 / j2) / math.log(2.0)


def local_lipschitz(u: GridFunction) -> np.ndarray:
    """Per-cell Lipschitz bound of the interpolant over the cell and its neighbours."""
    v = np.pad(u.values, 1)
    grad = np.zeros(v.shape)
    for a in range(u.dim):
        d = np.abs(np.diff(v, axis=a))
        lo = [slice(None)] * u.dim
        hi = [slice(None)] * u.dim
        lo[a] = slice(0, -1)
        hi[a] = slice(1, None)
        grad[tuple(lo)] = np.maximum(grad[tuple(lo)], d)
        grad[tuple(hi)] = np.maximum(grad[tuple(hi)], d)
    grad = ndimage.maximum_filter(grad, size=3, mode="constant")
    return math.sqrt(u.dim) * grad[(slice(1, -1),) * u.dim] / u.h


# --------------------------------------------------------------------------
# single-level evaluators


def _domain_level(u: GridFunction, Y, kernel, domain: Domain, spec: CubatureSpec, transpose=False):
    dim = u.dim
    depth = spec.depth(dim)
    w = domain.cell_fractions(u.lattice)
    res = difference_pair_sum(
        u.lattice, u.values, w, pair_kernel(Y, kernel), depth, spec.reach, transpose=transpose
    )
    eta = res.eta
    J, kappa = diagonal_constant(Y, kernel, dim, math.sqrt(dim) * eta)
    L = local_lipschitz(u)
    diag = float(np.sum(np.where(w > 0, Y.G(L), 0.0))) * u.h**dim * J
    return res.value, diag, kappa


def _cross_level(u: GridFunction, Y, kernel, domain: Domain, spec: CubatureSpec, level: int):
    dim = u.dim
    pos = np.argwhere(u.values > 0)
    if len(pos) == 0:
        return 0.0, 0.0, None
    X = u.centers()[tuple(pos.T)]
    a = u.values[tuple(pos.T)]
    wt = domain.cell_fractions(u.lattice)[tuple(pos.T)] * u.h**dim
    if kernel.fractional is not None:
        profile = RadialProfile.fractional(Y, kernel.fractional[0])
    else:
        profile = RadialProfile.general(Y, kernel, dim)
    R = spec.truncation_radius or 8.0 * domain.circumradius()
    n = spec.n_angles(level)
    while True:
        vals, bounds = exterior_ray_integrals(domain, X, a, profile, R, n)
        value, tail = float(wt @ vals), float(wt @ bounds)
        if tail <= spec.tolerance * value or R > 1e12:
            return value, tail, R
        R *= 2.0


def support_box(u: GridFunction, margin_cells: int = 3) -> Domain:
    """Box around the support of ``u`` with a margin of half its size plus
    ``margin_cells`` cells (the region called Omega' in the decomposition)."""
    pos = np.argwhere(u.values > 0)
    C = u.centers()[tuple(pos.T)]
    lo, hi = C.min(axis=0) - 0.5 * u.h, C.max(axis=0) + 0.5 * u.h
    pad = 0.5 * float(np.max(hi - lo)) + margin_cells * u.h
    return Domain((Box(tuple(lo - pad), tuple(hi + pad)),))


# --------------------------------------------------------------------------
# public operations


def modular(u: GridFunction, Y: YoungFunction) -> Estimate:
    """``sum_cells G(u) h^N``; exact for the grid representation."""
    return Estimate(float(np.sum(Y.G(u.values))) * u.h**u.dim, 0.0, {"h": u.h})


def _levels_for(req: SeminormRequest, domain: Domain) -> list:
    levels = hierarchy(req.u, req.domain, req.spec, req.anchor)
    lo, hi = domain.bounding_box()
    return [shrink_support(embed(v, lo, hi), domain) for v in levels]


def _domain_from_levels(levels, req: SeminormRequest, domain: Domain) -> Estimate:
    vals, diags, hs = [], [], []
    kappa = 2.0
    for v in levels:
        if not np.any(v.values > 0):
            vals.append(0.0)
            diags.append(0.0)
        else:
            val, diag, kappa = _domain_level(v, req.Y, req.kernel, domain, req.spec, req.transpose)
            vals.append(val)
            diags.append(diag)
        hs.append(v.h)
    rich = abs(vals[-1] - vals[-2]) * richardson_factor(kappa) if len(vals) > 1 else 0.0
    return Estimate(
        vals[-1],
        rich + diags[-1],
        {"levels": vals, "h": hs, "diagonal_bound": diags[-1], "richardson": rich, "kappa": kappa},
    )


def _cross_from_levels(levels, req: SeminormRequest, domain: Domain) -> Estimate:
    vals, tails, Rs = [], [], []
    for l, v in enumerate(levels):
        val, tail, R = _cross_level(v, req.Y, req.kernel, domain, req.spec, l)
        vals.append(val)
        tails.append(tail)
        Rs.append(R)
    rich = abs(vals[-1] - vals[-2]) if len(vals) > 1 else 0.0
    return Estimate(
        vals[-1],
        rich + tails[-1],
        {"levels": vals, "h": [v.h for v in levels], "R_t": Rs[-1], "tail_bound": tails[-1], "richardson": rich},
    )


def seminorm_domain(req: SeminormRequest) -> Estimate:
    """``int_Omega int_Omega F(u(x), u(y), |x - y|) dx dy``."""
    return _domain_from_levels(_levels_for(req, req.domain), req, req.domain)


def cross_term(req: SeminormRequest) -> Estimate:
    """``int_Omega int_{R^N minus Omega} G(u(x)/M(|x-y|)) / Nker(|x-y|) dy dx``
    (callers apply the factor 2 of the full-space decomposition)."""
    return _cross_from_levels(_levels_for(req, req.domain), req, req.domain)


def seminorm_fullspace(req: SeminormRequest) -> Estimate:
    """Full-space seminorm as ``I_{Omega'} + 2 cross_{Omega'}`` with ``Omega'``
    a box around the support of ``u``."""
    base = hierarchy(req.u, req.domain, req.spec, req.anchor)
    if not np.any(base[0].values > 0):
        return Estimate(0.0, 0.0, {"region": "fullspace"})
    box = support_box(base[0])
    lo, hi = box.bounding_box()
    levels = [embed(v, lo, hi) for v in base]
    dom = _domain_from_levels(levels, req, box)
    cross = _cross_from_levels(levels, req, box)
    out = dom + cross.scaled(2.0)
    out.metadata = {"region": "fullspace", "box": str(box), "domain_part": dom, "cross_part": cross,
                    "R_t": cross.metadata.get("R_t")}
    return out


def evaluate(req: SeminormRequest) -> Estimate:
    return {"domain": seminorm_domain, "fullspace": seminorm_fullspace, "cross": cross_term}[req.region](req)
