"""Domains built from boxes and balls, cell lattices, grid functions, and
Schwarz symmetrization on grids."""

from __future__ import annotations

import csv
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import ndimage
from scipy.special import gamma

from .errors import EmptyDomain, OutsideDomain, TooCoarse

log = logging.getLogger(__name__)


def unit_ball_volume(dim: int) -> float:
    """``pi^{N/2} / Gamma(N/2 + 1)``."""
    return math.pi ** (dim / 2) / gamma(dim / 2 + 1)


def unit_sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (2 points in 1D)."""
    return dim * unit_ball_volume(dim)


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"degenerate box {self.lo} -> {self.hi}")

    @property
    def dim(self):
        return len(self.lo)

    @property
    def volume(self):
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def contains(self, pts):
        return np.all((pts > np.asarray(self.lo)) & (pts < np.asarray(self.hi)), axis=-1)

    def bbox(self):
        return np.asarray(self.lo, float), np.asarray(self.hi, float)

    def ray(self, o, d):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo - o) / d
            t2 = (hi - o) / d
        tmin = np.where(d == 0, np.where((o > lo) & (o < hi), -np.inf, np.inf), np.minimum(t1, t2))
        tmax = np.where(d == 0, np.where((o > lo) & (o < hi), np.inf, -np.inf), np.maximum(t1, t2))
        return tmin.max(axis=-1), tmax.min(axis=-1)

    def __str__(self):
        return "box(" + ",".join(f"{v:g}" for v in (*self.lo, *self.hi)) + ")"


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    @property
    def volume(self):
        return unit_ball_volume(self.dim) * self.radius**self.dim

    def contains(self, pts):
        return np.sum((pts - np.asarray(self.center)) ** 2, axis=-1) < self.radius**2

    def bbox(self):
        c = np.asarray(self.center, float)
        return c - self.radius, c + self.radius

    def ray(self, o, d):
        oc = o - np.asarray(self.center)
        b = np.sum(d * oc, axis=-1)
        cc = np.sum(oc * oc, axis=-1) - self.radius**2
        disc = b * b - cc
        root = np.sqrt(np.maximum(disc, 0.0))
        miss = disc <= 0
        return np.where(miss, np.inf, -b - root), np.where(miss, -np.inf, -b + root)

    def __str__(self):
        return "ball(" + ",".join(f"{v:g}" for v in (*self.center, self.radius)) + ")"


Piece = Union[Box, Ball]


@dataclass(frozen=True)
class Lattice:
    """Uniform cell-centered lattice: cell ``k`` has center ``origin + k*h``."""

    origin: tuple
    h: float
    shape: tuple

    @property
    def dim(self):
        return len(self.shape)

    @property
    def cell_volume(self):
        return self.h**self.dim

    def axes(self):
        return [self.origin[a] + self.h * np.arange(n) for a, n in enumerate(self.shape)]

    def centers(self) -> np.ndarray:
        """Cell centers, shape ``shape + (dim,)``."""
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(grids, axis=-1)

    @classmethod
    def covering(cls, lo, hi, h, anchor=None) -> "Lattice":
        """Smallest lattice of spacing ``h`` whose cells cover ``[lo, hi]``.

        With ``anchor`` given, that point is a cell center.
        """
        lo, hi = np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float))
        if anchor is None:
            n = np.maximum(np.ceil((hi - lo) / h - 1e-9).astype(int), 1)
            origin = lo + 0.5 * h
            return cls(tuple(origin), float(h), tuple(int(k) for k in n))
        anchor = np.atleast_1d(np.asarray(anchor, float))
        k_lo = np.floor((lo - anchor) / h + 0.5 + 1e-9)
        k_hi = np.ceil((hi - anchor) / h - 0.5 - 1e-9)
        origin = anchor + k_lo * h
        n = (k_hi - k_lo + 1).astype(int)
        return cls(tuple(origin), float(h), tuple(int(k) for k in n))

    @classmethod
    def centered(cls, half_cells: int, h: float, dim: int) -> "Lattice":
        """Origin-centered lattice with ``2*half_cells + 1`` cells per axis."""
        return cls((-half_cells * h,) * dim, float(h), (2 * half_cells + 1,) * dim)


@dataclass(frozen=True)
class Domain:
    """Union of boxes and balls in R^dim (open sets)."""

    pieces: tuple

    def __post_init__(self):
        if not self.pieces:
            raise EmptyDomain("domain has no pieces")
        dims = {p.dim for p in self.pieces}
        if len(dims) != 1:
            raise ValueError("pieces disagree on dimension")

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    def __str__(self):
        return "+".join(str(p) for p in self.pieces)

    @classmethod
    def parse(cls, text: str) -> "Domain":
        """Parse ``"box(0,1)+box(2,4)"`` or ``"ball(0,0,1)"``.

        A box lists all lower corner coordinates then all upper ones; a ball
        lists its center then the radius.
        """
        pieces = []
        for kind, args in re.findall(r"(box|ball)\s*\(([^)]*)\)", text):
            vals = [float(v) for v in args.split(",") if v.strip()]
            if kind == "box":
                if len(vals) % 2:
                    raise ValueError(f"box needs an even number of coordinates: {args}")
                k = len(vals) // 2
                pieces.append(Box(tuple(vals[:k]), tuple(vals[k:])))
            else:
                pieces.append(Ball(tuple(vals[:-1]), vals[-1]))
        leftover = re.sub(r"(box|ball)\s*\([^)]*\)|\+|\s", "", text)
        if leftover or not pieces:
            raise ValueError(f"cannot parse domain {text!r}")
        return cls(tuple(pieces))

    @classmethod
    def interval(cls, a, b):
        return cls((Box((float(a),), (float(b),)),))

    @classmethod
    def ball(cls, center, radius):
        return cls((Ball(tuple(float(c) for c in center), float(radius)),))

    # -- basic queries ----------------------------------------------------

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, float)
        inside = np.zeros(pts.shape[:-1], bool)
        for p in self.pieces:
            inside |= p.contains(pts)
        return inside

    def bounding_box(self):
        los, his = zip(*(p.bbox() for p in self.pieces))
        return np.min(los, axis=0), np.max(his, axis=0)

    def circumradius(self, about=None) -> float:
        lo, hi = self.bounding_box()
        c = 0.5 * (lo + hi) if about is None else np.asarray(about, float)
        corners = np.array(list(itertools.product(*zip(lo, hi))))
        return float(np.max(np.linalg.norm(corners - c, axis=-1)))

    @property
    def is_single_ball(self) -> bool:
        """One ball, or one interval (the 1D ball)."""
        if len(self.pieces) != 1:
            return False
        return isinstance(self.pieces[0], Ball) or self.dim == 1

    def as_ball(self) -> Ball:
        p = self.pieces[0]
        if isinstance(p, Ball):
            return p
        return Ball((0.5 * (p.lo[0] + p.hi[0]),), 0.5 * (p.hi[0] - p.lo[0]))

    def _boxes_only(self):
        return all(isinstance(p, Box) for p in self.pieces)

    def _pairwise_disjoint(self) -> bool:
        for a, b in itertools.combinations(self.pieces, 2):
            if isinstance(a, Box) and isinstance(b, Box):
                if all(max(l1, l2) < min(h1, h2) for l1, h1, l2, h2 in zip(a.lo, a.hi, b.lo, b.hi)):
                    return False
            elif isinstance(a, Ball) and isinstance(b, Ball):
                if np.linalg.norm(np.subtract(a.center, b.center)) < a.radius + b.radius:
                    return False
            else:
                box, ball = (a, b) if isinstance(a, Box) else (b, a)
                closest = np.clip(ball.center, box.lo, box.hi)
                if np.linalg.norm(closest - np.asarray(ball.center)) < ball.radius:
                    return False
        return True

    def measure(self, resolution: int = 512) -> float:
        """Lebesgue measure of the union.

        Exact for box unions (inclusion-exclusion) and for pairwise disjoint
        pieces; otherwise cell counting at ``resolution`` and ``resolution/2``
        combined by Richardson extrapolation.
        """
        if self._boxes_only():
            return self._box_union_volume()
        if self._pairwise_disjoint():
            return float(sum(p.volume for p in self.pieces))
        fine = self._count_measure(resolution)
        coarse = self._count_measure(resolution // 2)
        return 2.0 * fine - coarse

    def _box_union_volume(self) -> float:
        total = 0.0
        boxes = self.pieces
        for k in range(1, len(boxes) + 1):
            sign = 1.0 if k % 2 else -1.0
            for combo in itertools.combinations(boxes, k):
                lo = np.max([b.lo for b in combo], axis=0)
                hi = np.min([b.hi for b in combo], axis=0)
                total += sign * float(np.prod(np.clip(hi - lo, 0.0, None)))
        return total

    def _count_measure(self, resolution: int) -> float:
        lo, hi = self.bounding_box()
        h = float(np.max(hi - lo)) / resolution
        lat = Lattice.covering(lo, hi, h)
        return float(self.contains(lat.centers()).sum()) * lat.cell_volume

    def cell_fractions(self, lattice: Lattice, sub: int = 8) -> np.ndarray:
        """Fraction of each lattice cell lying inside the domain.

        Exact for box unions; balls are resolved by ``sub**dim`` sub-samples
        per cell (only on cells straddling the boundary).
        """
        if self._boxes_only():
            return self._box_fractions(lattice)
        centers = lattice.centers()
        h = lattice.h
        inside = self.contains(centers).astype(float)
        # cells whose center lies within half a diagonal of the boundary are resampled
        near = np.zeros(lattice.shape, bool)
        reach = 0.5 * h * math.sqrt(lattice.dim) * 1.0001
        for p in self.pieces:
            near |= _piece_near(p, centers, reach)
        idx = np.argwhere(near)
        if len(idx):
            offs = (np.arange(sub) + 0.5) / sub - 0.5
            grid = np.stack(np.meshgrid(*([offs] * lattice.dim), indexing="ij"), -1).reshape(-1, lattice.dim)
            pts = centers[tuple(idx.T)][:, None, :] + h * grid[None, :, :]
            inside[tuple(idx.T)] = self.contains(pts).mean(axis=1)
        return inside

    def _box_fractions(self, lattice: Lattice) -> np.ndarray:
        axes = lattice.axes()
        h = lattice.h
        out = np.zeros(lattice.shape)
        for k in range(1, len(self.pieces) + 1):
            sign = 1.0 if k % 2 else -1.0
            for combo in itertools.combinations(self.pieces, k):
                lo = np.max([b.lo for b in combo], axis=0)
                hi = np.min([b.hi for b in combo], axis=0)
                if np.any(hi <= lo):
                    continue
                frac = None
                for a, c in enumerate(axes):
                    f1 = np.clip(np.minimum(c + h / 2, hi[a]) - np.maximum(c - h / 2, lo[a]), 0.0, None) / h
                    frac = f1 if frac is None else np.multiply.outer(frac, f1)
                out += sign * frac
        return np.clip(out, 0.0, 1.0)

    # -- boundary distance ------------------------------------------------

    def distance_to_boundary(self, pts) -> np.ndarray:
        """Distance from interior points to the boundary of the union.

        Exact in 1D and for box faces in 2D; sphere arcs (and any boundary in
        dim >= 3) are resolved by dense sampling of the exposed boundary.
        Raises ``OutsideDomain`` for a point not in the domain.
        """
        pts = np.asarray(pts, float)
        scalar = pts.ndim == 1
        P = np.atleast_2d(pts)
        if P.shape[-1] != self.dim:
            raise ValueError("point dimension mismatch")
        if not np.all(self.contains(P)):
            raise OutsideDomain("distance_to_boundary needs points inside the domain")
        if self.dim == 1:
            d = self._distance_1d(P[:, 0])
        else:
            d = np.full(len(P), np.inf)
            for seg_a, seg_b in self._exposed_segments():
                d = np.minimum(d, _point_segment_distance(P, seg_a, seg_b))
            samples = self._exposed_samples()
            if len(samples):
                for chunk in np.array_split(np.arange(len(P)), max(1, len(P) // 512)):
                    dd = np.linalg.norm(P[chunk, None, :] - samples[None, :, :], axis=-1).min(axis=1)
                    d[chunk] = np.minimum(d[chunk], dd)
        return float(d[0]) if scalar else d

    def _merged_intervals(self):
        ivs = sorted((p.bbox()[0][0], p.bbox()[1][0]) for p in self.pieces)
        merged = [list(ivs[0])]
        for a, b in ivs[1:]:
            if a < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return merged

    def _distance_1d(self, x):
        d = np.zeros_like(x)
        for a, b in self._merged_intervals():
            m = (x > a) & (x < b)
            d[m] = np.minimum(x[m] - a, b - x[m])
        return d

    def _exposed_segments(self):
        if self.dim != 2:
            return []
        segs = []
        for i, p in enumerate(self.pieces):
            if not isinstance(p, Box):
                continue
            others = [q for j, q in enumerate(self.pieces) if j != i]
            (x0, y0), (x1, y1) = p.lo, p.hi
            faces = [(0, y0, x0, x1), (0, y1, x0, x1), (1, x0, y0, y1), (1, x1, y0, y1)]
            for free_axis, fixed, a, b in faces:
                blocked = []
                for q in others:
                    fixed_axis = 1 - free_axis
                    if isinstance(q, Box):
                        if q.lo[fixed_axis] < fixed < q.hi[fixed_axis]:
                            blocked.append((q.lo[free_axis], q.hi[free_axis]))
                    else:
                        dist = abs(fixed - q.center[fixed_axis])
                        if dist < q.radius:
                            half = math.sqrt(q.radius**2 - dist**2)
                            blocked.append((q.center[free_axis] - half, q.center[free_axis] + half))
                for lo, hi in _subtract_intervals((a, b), blocked):
                    A = [0.0, 0.0]
                    B = [0.0, 0.0]
                    A[free_axis], B[free_axis] = lo, hi
                    A[1 - free_axis] = B[1 - free_axis] = fixed
                    segs.append((np.array(A), np.array(B)))
        return segs

    def _exposed_samples(self, n_sphere: int = 4096, n_face: int = 48) -> np.ndarray:
        pts = []
        for i, p in enumerate(self.pieces):
            if isinstance(p, Ball):
                pts.append(_sphere_points(p, n_sphere))
            elif self.dim >= 3:
                pts.append(_box_face_points(p, n_face))
        if not pts:
            return np.zeros((0, self.dim))
        P = np.concatenate(pts)
        return P[~self.contains(P)]

    def ray_hits(self, origins, dirs):
        """Entry/exit parameters of rays ``o + t d`` through every piece.

        Returns two arrays of shape ``(M, P)``; a miss has ``t_in >= t_out``.
        """
        tin, tout = zip(*(p.ray(origins, dirs) for p in self.pieces))
        return np.stack(tin, axis=-1), np.stack(tout, axis=-1)


def _piece_near(p, centers, reach):
    if isinstance(p, Ball):
        r = np.linalg.norm(centers - np.asarray(p.center), axis=-1)
        return np.abs(r - p.radius) <= reach
    lo, hi = np.asarray(p.lo), np.asarray(p.hi)
    inside_ext = np.all((centers > lo - reach) & (centers < hi + reach), axis=-1)
    inside_int = np.all((centers > lo + reach) & (centers < hi - reach), axis=-1)
    return inside_ext & ~inside_int


def _subtract_intervals(base, blocked):
    pieces = [base]
    for c, d in blocked:
        nxt = []
        for a, b in pieces:
            if d <= a or c >= b:
                nxt.append((a, b))
                continue
            if c > a:
                nxt.append((a, c))
            if d < b:
                nxt.append((d, b))
        pieces = nxt
    return pieces


def _point_segment_distance(P, A, B):
    AB = B - A
    L2 = float(AB @ AB)
    t = np.clip(((P - A) @ AB) / L2, 0.0, 1.0) if L2 > 0 else np.zeros(len(P))
    proj = A + t[:, None] * AB
    return np.linalg.norm(P - proj, axis=-1)


def _sphere_points(ball: Ball, n: int) -> np.ndarray:
    c = np.asarray(ball.center, float)
    if ball.dim == 2:
        th = 2 * np.pi * np.arange(n) / n
        return c + ball.radius * np.stack([np.cos(th), np.sin(th)], -1)
    # Fibonacci sphere for dim 3; higher dims use random directions
    rng = np.random.default_rng(0)
    v = rng.standard_normal((n * 4, ball.dim))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return c + ball.radius * v


def _box_face_points(box: Box, n: int) -> np.ndarray:
    out = []
    for a in range(box.dim):
        others = [np.linspace(box.lo[b], box.hi[b], n) for b in range(box.dim) if b != a]
        grid = np.stack(np.meshgrid(*others, indexing="ij"), -1).reshape(-1, box.dim - 1)
        for fixed in (box.lo[a], box.hi[a]):
            pts = np.insert(grid, a, fixed, axis=1)
            out.append(pts)
    return np.concatenate(out)


# --------------------------------------------------------------------------
# set-level operations


def symmetrized_set(D: Domain) -> Domain:
    """The origin-centered ball with the measure of ``D``."""
    m = D.measure()
    if m <= 0:
        raise EmptyDomain("symmetrization of a null set is empty")
    r = (m / unit_ball_volume(D.dim)) ** (1.0 / D.dim)
    return Domain.ball((0.0,) * D.dim, r)


def symmetric_difference_measure(D1: Domain, D2: Domain, resolution: int = 1024, sub: int = 4) -> float:
    """``|D1 delta D2|`` by (sub-sampled) cell counting over the joint box."""
    if D1.dim != D2.dim:
        raise ValueError("dimension mismatch")
    lo1, hi1 = D1.bounding_box()
    lo2, hi2 = D2.bounding_box()
    lo, hi = np.minimum(lo1, lo2), np.maximum(hi1, hi2)
    h = float(np.max(hi - lo)) / resolution
    lat = Lattice.covering(lo, hi, h)
    offs = (np.arange(sub) + 0.5) / sub - 0.5
    total = 0.0
    for shift in itertools.product(offs, repeat=D1.dim):
        pts = lat.centers() + h * np.asarray(shift)
        total += float(np.count_nonzero(D1.contains(pts) ^ D2.contains(pts)))
    return total * lat.cell_volume / sub**D1.dim


def inscribed_ball(D: Domain, resolution: int = 256) -> tuple[np.ndarray, float]:
    """Grid cell center farthest from the boundary and its distance less one cell.

    Ties go to the first cell in lexicographic index order.  Raises
    ``TooCoarse`` when the radius is under four cell widths.
    """
    lo, hi = D.bounding_box()
    h = float(np.max(hi - lo)) / resolution
    lat = Lattice.covering(lo, hi, h)
    C = lat.centers().reshape(-1, D.dim)
    inside = D.contains(C)
    d = np.full(len(C), -np.inf)
    d[inside] = D.distance_to_boundary(C[inside])
    k = int(np.argmax(d))
    R0 = float(d[k]) - h
    if R0 < 4 * h:
        raise TooCoarse(f"inscribed radius {R0:g} below 4 cells (h={h:g})")
    x0 = C[k]
    probe = x0 + R0 * _sphere_dirs(D.dim, 64) * (1 - 1e-12)
    if not np.all(D.contains(probe)):
        raise TooCoarse("inscribed ball leaks out of the domain")
    return x0, R0


def _sphere_dirs(dim, n):
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        th = 2 * np.pi * np.arange(n) / n
        return np.stack([np.cos(th), np.sin(th)], -1)
    v = np.random.default_rng(1).standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


# --------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True)
class GridFunction:
    """Nonnegative samples at the cell centers of a lattice.

    ``domain`` marks the region the function is meant to be supported in.
    Between centers the function is read as the multilinear interpolant of
    the samples, vanishing beyond the outer centers.
    """

    values: np.ndarray
    lattice: Lattice
    domain: Optional[Domain] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != tuple(self.lattice.shape):
            raise ValueError(f"values shape {v.shape} != lattice shape {self.lattice.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def dim(self):
        return self.lattice.dim

    @property
    def h(self):
        return self.lattice.h

    @property
    def shape(self):
        return self.lattice.shape

    def centers(self):
        return self.lattice.centers()

    @property
    def box(self):
        lo = np.asarray(self.lattice.origin) - 0.5 * self.h
        return lo, lo + self.h * np.asarray(self.shape)

    @classmethod
    def sample(cls, f: Callable, lattice: Lattice, domain: Optional[Domain] = None) -> "GridFunction":
        """Evaluate ``f`` (points of shape ``(..., dim)``) at the cell centers,
        zeroing cells outside ``domain``."""
        C = lattice.centers()
        vals = np.asarray(f(C), dtype=float)
        if domain is not None:
            vals = np.where(domain.contains(C), vals, 0.0)
        return cls(vals, lattice, domain)

    def at(self, pts) -> np.ndarray:
        """Multilinear interpolant at arbitrary points ``(..., dim)``."""
        pts = np.asarray(pts, float)
        coords = (pts - np.asarray(self.lattice.origin)) / self.h
        if self.dim == 1:
            n = self.shape[0]
            padded = np.concatenate([[0.0], self.values, [0.0]])
            return np.interp(coords[..., 0], np.arange(-1, n + 1), padded, left=0.0, right=0.0)
        flat = coords.reshape(-1, self.dim).T
        out = ndimage.map_coordinates(self.values, flat, order=1, mode="grid-constant", cval=0.0)
        return out.reshape(pts.shape[:-1])

    def refined(self, factor: int = 2) -> "GridFunction":
        """Resample the interpolant on a lattice ``factor`` times finer."""
        L = self.lattice
        hf = L.h / factor
        origin = tuple(o - 0.5 * L.h + 0.5 * hf for o in L.origin)
        fine = Lattice(origin, hf, tuple(n * factor for n in L.shape))
        vals = self.at(fine.centers())
        if self.domain is not None:
            vals = np.where(self.domain.contains(fine.centers()), vals, 0.0)
        return GridFunction(np.maximum(vals, 0.0), fine, self.domain)

    def translated(self, shift_cells) -> "GridFunction":
        shift = np.asarray(shift_cells) * self.h
        L = self.lattice
        return GridFunction(self.values, Lattice(tuple(np.asarray(L.origin) + shift), L.h, L.shape), None)

    def support_mask(self) -> np.ndarray:
        return self.values > 0

    def validate(self):
        """Raise if values are nonzero at centers outside ``domain``."""
        if self.domain is None:
            return
        outside = ~self.domain.contains(self.centers())
        if np.any(self.values[outside] > 0):
            raise ValueError("grid function is nonzero outside its support domain")

    # -- CSV --------------------------------------------------------------

    def to_csv(self, path):
        C = self.centers().reshape(-1, self.dim)
        v = self.values.reshape(-1)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["cell_index"] + [f"x{a + 1}" for a in range(self.dim)] + ["value"])
            for k in range(len(v)):
                w.writerow([k] + [f"{c:.17g}" for c in C[k]] + [f"{v[k]:.17g}"])

    @classmethod
    def from_csv(cls, path, domain: Optional[Domain] = None) -> "GridFunction":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        dim = len(header) - 2
        data = np.array([[float(x) for x in r] for r in body if r])
        order = np.argsort(data[:, 0], kind="stable")
        data = data[order]
        axes = [np.unique(data[:, 1 + a]) for a in range(dim)]
        shape = tuple(len(ax) for ax in axes)
        if int(np.prod(shape)) != len(data):
            raise ValueError("grid CSV is not a full tensor lattice")
        steps = np.concatenate([np.diff(ax) for ax in axes if len(ax) > 1])
        h = float(np.median(steps)) if len(steps) else 1.0
        if len(steps) and np.max(np.abs(steps - h)) > 1e-9 * max(h, 1.0):
            raise ValueError("grid CSV spacing is not uniform and cubic")
        lat = Lattice(tuple(float(ax[0]) for ax in axes), h, shape)
        return cls(data[:, -1].reshape(shape), lat, domain)


def schwarz_rearrange(u: GridFunction, shape: Optional[Sequence[int]] = None) -> GridFunction:
    """Discrete Schwarz symmetrization.

    Values are sorted in decreasing order and placed on the cells of an
    origin-centered lattice (same spacing) in order of increasing center
    distance; equal distances are ordered by lexicographic cell index.  The
    positive values are preserved exactly as a multiset.
    """
    vals = u.values.reshape(-1)
    pos = np.sort(vals[vals > 0])[::-1]
    K = len(pos)
    dim, h = u.dim, u.h
    if shape is None:
        r = (K * h**dim / unit_ball_volume(dim)) ** (1.0 / dim) if K else 0.0
        m = int(math.ceil(r / h)) + 2
        m = max(m, 4)
        shape = (2 * m + 1,) * dim
    shape = tuple(int(n) for n in shape)
    if any(n % 2 == 0 for n in shape):
        raise ValueError("rearrangement lattice needs an odd cell count per axis")
    lat = Lattice(tuple(-(n // 2) * h for n in shape), h, shape)
    if K > int(np.prod(shape)):
        raise ValueError("target lattice too small for the support")
    idx = np.indices(shape).reshape(dim, -1).T - np.array([n // 2 for n in shape])
    d2 = np.sum(idx.astype(np.int64) ** 2, axis=1)
    order = np.argsort(d2, kind="stable")
    out = np.zeros(int(np.prod(shape)))
    out[order[:K]] = pos
    dom = symmetrized_set(u.domain) if u.domain is not None else None
    return GridFunction(out.reshape(shape), lat, dom)
