"""Numerical certificates for the two rearrangement results.

``verify_counterexample`` runs the bump construction showing that Schwarz
symmetrization can *increase* the domain seminorm:

    I_Omega[u_eps] < I_{Omega*}[u*_eps]   for small eps.

``verify_comparison`` runs the converse chain: the full-space seminorm of
``u*`` is controlled by a constant times the domain seminorm of ``u``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CaseHypothesisFails, Inconclusive
from .geometry import Domain, GridFunction, inscribed_ball, schwarz_rearrange, symmetrized_set
from .quadrature import (
    CubatureSpec,
    Estimate,
    RadialProfile,
    exterior_ray_integrals,
    exterior_tail_integral,
    richardson_factor,
)
from .seminorm import (
    cross_term,
    fractional_request,
    hierarchy,
    seminorm_domain,
    seminorm_fullspace,
    shrink_support,
)
from .young import YoungFunction, classify_theorem2_case, power

log = logging.getLogger(__name__)

DEFAULT_EPS = tuple(2.0**-k for k in range(1, 7))
# a row may pass only if the bump support radius spans this many coarse cells
MIN_SUPPORT_CELLS = 4.0


# --------------------------------------------------------------------------
# the bump


def eta_profile(r, R0: float) -> np.ndarray:
    """1 on ``[0, R0/2]``, ``exp(1 - 1/(1 - t^2))`` with ``t = 2r/R0 - 1`` on
    the ramp, 0 from ``R0`` on."""
    r = np.asarray(r, float)
    t = 2.0 * r / R0 - 1.0
    ramp = (r > 0.5 * R0) & (r < R0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        val = np.exp(1.0 - 1.0 / (1.0 - t * t))
    return np.where(r <= 0.5 * R0, 1.0, np.where(ramp, val, 0.0))


@dataclass(frozen=True)
class BumpSpec:
    """``u_eps(x) = eta(|x - center| / eps)``, supported in ``B_{eps R0}(center)``."""

    center: tuple
    R0: float
    eps: float = 1.0
    ball_case: bool = False

    @property
    def plateau(self) -> float:
        return 0.5 * self.R0

    @property
    def support_radius(self) -> float:
        return self.eps * self.R0

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, float)
        r = np.linalg.norm(X - np.asarray(self.center), axis=-1)
        return eta_profile(r / self.eps, self.R0)

    def with_eps(self, eps: float) -> "BumpSpec":
        return BumpSpec(self.center, self.R0, float(eps), self.ball_case)

    def centered(self) -> "BumpSpec":
        """The same profile about the origin: the rearrangement of the bump."""
        return BumpSpec((0.0,) * len(self.center), self.R0, self.eps, self.ball_case)


def build_bump(D: Domain, ball_case: Optional[bool] = None, resolution: int = 256) -> BumpSpec:
    """Bump center and outer radius for the counterexample.

    Generic domains use the inscribed ball.  A single ball ``B_rho(c)`` is
    treated in the coordinates where it is the unit ball: the bump sits at
    ``c + rho/2 e_1`` with ``R0 = rho/4``.
    """
    if ball_case is None:
        ball_case = D.is_single_ball
    if ball_case:
        if not D.is_single_ball:
            raise ValueError("ball case needs a domain made of a single ball")
        ball = D.as_ball()
        c = np.asarray(ball.center, float)
        e1 = np.zeros(D.dim)
        e1[0] = 1.0
        return BumpSpec(tuple(float(v) for v in c + 0.5 * ball.radius * e1), 0.25 * ball.radius, 1.0, True)
    x0, R0 = inscribed_ball(D, resolution)
    return BumpSpec(tuple(float(v) for v in x0), R0, 1.0, False)


# --------------------------------------------------------------------------
# counterexample


@dataclass
class CounterexampleRow:
    eps: float
    lhs: Estimate
    rhs: Estimate
    cross: Estimate
    cross_star: Estimate
    fullspace: Estimate
    fullspace_star: Estimate
    threshold: float = 3.0
    alignment: float = math.inf
    support_cells: float = math.inf

    @property
    def resolved(self) -> bool:
        """Bump support radius covers at least ``MIN_SUPPORT_CELLS`` coarse cells."""
        return self.support_cells >= MIN_SUPPORT_CELLS

    @property
    def margin(self) -> float:
        return self.rhs.value - self.lhs.value

    @property
    def separate_error(self) -> float:
        """Sum of the two sides' own error bounds (ignores their correlation)."""
        return self.lhs.error_bound + self.rhs.error_bound

    @property
    def combined_error(self) -> float:
        """Error bound of the margin itself.

        Richardson on the per-level margins, plus the omitted-diagonal bounds
        of both sides unless the two grids are translates of each other
        (``alignment`` is their relative deviation), in which case the
        omitted parts coincide and only a rounding allowance is kept.
        """
        ml = np.subtract(self.rhs.metadata["levels"], self.lhs.metadata["levels"])
        kappa = self.lhs.metadata.get("kappa", 2.0)
        rich = abs(ml[-1] - ml[-2]) * richardson_factor(kappa) if len(ml) > 1 else math.inf
        diag = self.lhs.metadata["diagonal_bound"] + self.rhs.metadata["diagonal_bound"]
        if self.alignment <= 1e-12:
            diag *= 1e-6
        return rich + diag

    @property
    def verdict(self) -> bool:
        return self.resolved and self.margin > self.threshold * self.combined_error

    @property
    def residual(self) -> float:
        """``|fullspace - (domain + 2 cross)|`` for ``u_eps``."""
        return abs(self.fullspace.value - (self.lhs.value + 2.0 * self.cross.value))

    @property
    def residual_bound(self) -> float:
        return self.fullspace.error_bound + self.lhs.error_bound + 2.0 * self.cross.error_bound

    @property
    def polya_szego_ok(self) -> bool:
        return self.fullspace_star.value <= self.fullspace.value + (
            self.fullspace_star.error_bound + self.fullspace.error_bound
        )

    @property
    def restriction_ok(self) -> bool:
        return self.rhs.value <= self.fullspace_star.value + self.rhs.error_bound + self.fullspace_star.error_bound


@dataclass
class CounterexampleReport:
    domain: Domain
    symmetrized: Domain
    young: str
    s: float
    bump: BumpSpec
    rows: list
    tail: Estimate
    tail_star: Estimate
    spec: CubatureSpec

    @property
    def tail_pass(self) -> bool:
        """``H_Omega`` at the bump center beats ``H_{Omega*}`` at the origin."""
        return self.tail.value - self.tail_star.value > self.tail.error_bound + self.tail_star.error_bound

    @property
    def passing(self) -> list:
        return [r for r in self.rows if r.verdict]

    @property
    def passed(self) -> bool:
        return bool(self.passing)

    @property
    def smallest_passing_eps(self) -> Optional[float]:
        p = self.passing
        return min(r.eps for r in p) if p else None

    def summary(self) -> str:
        lines = [
            f"domain        {self.domain}",
            f"symmetrized   {self.symmetrized}",
            f"young         {self.young}",
            f"s             {self.s:g}",
            f"bump          center={tuple(round(c, 6) for c in self.bump.center)} R0={self.bump.R0:.6g}"
            + (" (ball case)" if self.bump.ball_case else ""),
            f"tail          H={self.tail.value:.6g} +- {self.tail.error_bound:.2g}  "
            f"H*={self.tail_star.value:.6g} +- {self.tail_star.error_bound:.2g}  "
            f"{'PASS' if self.tail_pass else 'FAIL'}",
        ]
        for r in self.rows:
            lines.append(
                f"eps={r.eps:<9.6g} lhs={r.lhs.value:.8g} rhs={r.rhs.value:.8g} margin={r.margin:.4g} "
                f"err={r.combined_error:.3g} (sides {r.separate_error:.3g}) "
                + ("PASS" if r.verdict else "no" if r.resolved else f"under-resolved ({r.support_cells:.1f} cells)")
            )
        eps = self.smallest_passing_eps
        lines.append("verdict       " + (f"PASS (smallest eps {eps:g})" if eps is not None else "NoPass"))
        return "\n".join(lines)


def _tail_estimates(D: Domain, Ds: Domain, bump: BumpSpec, Y, s, spec: CubatureSpec):
    H = exterior_tail_integral(np.asarray(bump.center), Y, s, 1.0, D, spec)
    Hs = exterior_tail_integral(np.zeros(D.dim), Y, s, 1.0, Ds, spec)
    return H, Hs


def counterexample_row(
    D: Domain,
    bump: BumpSpec,
    Y: YoungFunction,
    s: float,
    spec: CubatureSpec,
    threshold: float = 3.0,
    Ds: Optional[Domain] = None,
) -> CounterexampleRow:
    """Both sides of the strict inequality for one bump, plus the cross
    terms and full-space values used by the consistency checks."""
    Ds = Ds or symmetrized_set(D)
    u_levels = [shrink_support(v, D) for v in hierarchy(bump, D, spec, anchor=bump.center)]
    star_levels = [schwarz_rearrange(v) for v in u_levels]
    req = fractional_request(u_levels, Y, s, D, spec=spec)
    req_star = fractional_request(star_levels, Y, s, Ds, spec=spec)
    lhs = seminorm_domain(req)
    rhs = seminorm_domain(req_star)
    cross = cross_term(req)
    cross_star = cross_term(req_star)
    full = seminorm_fullspace(req)
    full_star = seminorm_fullspace(req_star)
    align = max(translate_deviation(u, v) for u, v in zip(u_levels, star_levels))
    cells = bump.support_radius / u_levels[0].h
    return CounterexampleRow(bump.eps, lhs, rhs, cross, cross_star, full, full_star, threshold, align, cells)


def translate_deviation(u: GridFunction, v: GridFunction, pad: int = 4) -> float:
    """Relative sup-difference between ``u`` and ``v`` after aligning their
    supports; ``inf`` when the padded supports do not have the same shape."""
    crops = []
    for w in (u, v):
        pos = np.argwhere(w.values > 0)
        if len(pos) == 0:
            return 0.0 if not np.any(u.values) and not np.any(v.values) else math.inf
        lo, hi = pos.min(axis=0) - pad, pos.max(axis=0) + pad + 1
        padded = np.pad(w.values, pad)
        crops.append(padded[tuple(slice(a + pad, b + pad) for a, b in zip(lo, hi))])
    a, b = crops
    if a.shape != b.shape or u.h != v.h:
        return math.inf
    return float(np.max(np.abs(a - b)) / max(np.max(a), 1e-300))


def verify_counterexample(
    D: Domain,
    Y: YoungFunction,
    s: float,
    eps_sequence: Sequence[float] = DEFAULT_EPS,
    spec: CubatureSpec = CubatureSpec(),
    ball_case: Optional[bool] = None,
    threshold: float = 3.0,
    bump: Optional[BumpSpec] = None,
) -> CounterexampleReport:
    """Scan ``eps`` and certify ``I_Omega[u_eps] < I_{Omega*}[u*_eps]``.

    ``eps`` is dimensionless: ``u_eps`` is supported in ``B_{eps R0}``.  A
    row passes when the margin exceeds ``threshold`` times the error bound of
    the margin (``CounterexampleRow.combined_error``) and the bump support
    spans at least ``MIN_SUPPORT_CELLS`` coarse cells.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    eps_sequence = [float(e) for e in eps_sequence]
    if any(not 0.0 < e <= 1.0 for e in eps_sequence):
        raise ValueError("eps values must lie in (0, 1]")
    bump = bump or build_bump(D, ball_case)
    Ds = symmetrized_set(D)
    rows = []
    for eps in eps_sequence:
        rows.append(counterexample_row(D, bump.with_eps(eps), Y, s, spec, threshold, Ds))
        log.info("eps=%g margin=%g err=%g", eps, rows[-1].margin, rows[-1].combined_error)
    H, Hs = _tail_estimates(D, Ds, bump, Y, s, spec)
    return CounterexampleReport(D, Ds, Y.name, s, bump, rows, H, Hs, spec)


def decomposition_residual(D: Domain, bump, Y: YoungFunction, s: float, spec: CubatureSpec = CubatureSpec()) -> Estimate:
    """``|fullspace - (domain + 2 cross)|`` for ``u`` (a bump or any grid
    source); ``error_bound`` carries the sum of the three error bounds."""
    anchor = bump.center if isinstance(bump, BumpSpec) else None
    levels = [shrink_support(v, D) for v in hierarchy(bump, D, spec, anchor=anchor)]
    req = fractional_request(levels, Y, s, D, spec=spec)
    dom, cross, full = seminorm_domain(req), cross_term(req), seminorm_fullspace(req)
    res = abs(full.value - (dom.value + 2.0 * cross.value))
    return Estimate(res, full.error_bound + dom.error_bound + 2.0 * cross.error_bound,
                    {"fullspace": full, "domain": dom, "cross": cross})


# --------------------------------------------------------------------------
# comparison constant


def hardy_quotient(D: Domain, u, Y: YoungFunction, s: float, spec: CubatureSpec = CubatureSpec()) -> tuple:
    """``(A, B)``: the Hardy modular ``sum G(u / delta^s) h^N`` over ``D`` and
    the domain seminorm of ``u``, both at the finest level."""
    levels = [shrink_support(v, D) for v in hierarchy(u, D, spec)]
    fine = levels[-1]
    pos = np.argwhere(fine.values > 0)
    if len(pos) == 0:
        return Estimate(0.0, 0.0), Estimate(0.0, 0.0)
    C = fine.centers()[tuple(pos.T)]
    delta = D.distance_to_boundary(C)
    w = D.cell_fractions(fine.lattice)[tuple(pos.T)]
    A = float(np.sum(w * Y.G(fine.values[tuple(pos.T)] / delta**s))) * fine.h**fine.dim
    B = seminorm_domain(fractional_request(levels, Y, s, D, spec=spec))
    return Estimate(A, 0.0, {"h": fine.h}), B


def hardy_chain_check(D: Domain, u, Y: YoungFunction, s: float, spec: CubatureSpec = CubatureSpec(),
                      samples: int = 16) -> tuple[bool, float]:
    """Pointwise check of the Hardy-step bound at sampled support cells:

        int_{R^N minus D} G(u/|x-y|^s) |x-y|^{-N} dy
            <= G(u/delta^s) delta^{s p-} int_{R^N minus D} |x-y|^{-N - s p-} dy.

    Returns whether it holds within quadrature error and the worst ratio
    left / right.
    """
    fine = shrink_support(hierarchy(u, D, spec)[-1], D)
    pos = np.argwhere(fine.values > 0)
    if len(pos) == 0:
        return True, 0.0
    pick = pos[np.linspace(0, len(pos) - 1, min(samples, len(pos))).astype(int)]
    X = fine.centers()[tuple(pick.T)]
    a = fine.values[tuple(pick.T)]
    delta = D.distance_to_boundary(X)
    R = spec.truncation_radius or 8.0 * D.circumradius()
    pm = Y.p_minus
    left, lb = exterior_ray_integrals(D, X, a, RadialProfile.fractional(Y, s), R, spec.n_angles(1))
    kern, kb = exterior_ray_integrals(D, X, np.ones(len(X)), RadialProfile.fractional(power(pm), s), R, spec.n_angles(1))
    right = Y.G(a / delta**s) * delta ** (s * pm) * kern
    slack = lb + Y.G(a / delta**s) * delta ** (s * pm) * kb + spec.tolerance * right
    ok = bool(np.all(left <= right + slack))
    return ok, float(np.max(left / right))


@dataclass
class ComparisonRow:
    name: str
    domain: Estimate
    fullspace: Estimate
    fullspace_star: Estimate
    cross: Estimate

    @property
    def rho(self) -> float:
        return self.fullspace_star.value / self.domain.value

    @property
    def polya_szego_ok(self) -> bool:
        return self.fullspace_star.value <= self.fullspace.value + (
            self.fullspace_star.error_bound + self.fullspace.error_bound
        )

    @property
    def hardy_ratio(self) -> float:
        return self.cross.value / self.domain.value


@dataclass
class ComparisonReport:
    domain: Domain
    young: str
    s: float
    case_id: int
    rows: list

    @property
    def empirical_lower_bound(self) -> float:
        """``max rho`` over the corpus: an empirical lower bound for the
        comparison constant, not the constant itself."""
        return max(r.rho for r in self.rows)

    @property
    def all_finite(self) -> bool:
        return all(math.isfinite(r.rho) for r in self.rows)

    @property
    def chain_ok(self) -> bool:
        return all(r.polya_szego_ok for r in self.rows)

    def summary(self) -> str:
        lines = [f"domain {self.domain}  young {self.young}  s {self.s:g}  case {self.case_id}"]
        for r in self.rows:
            lines.append(
                f"{r.name:<16} domain={r.domain.value:.6g} full={r.fullspace.value:.6g} "
                f"full*={r.fullspace_star.value:.6g} rho={r.rho:.6g} hardy={r.hardy_ratio:.4g} "
                f"{'ok' if r.polya_szego_ok else 'VIOLATION'}"
            )
        lines.append(f"empirical lower bound for C: {self.empirical_lower_bound:.6g}")
        return "\n".join(lines)


def comparison_row(D: Domain, u, Y, s, spec: CubatureSpec, name: str = "u") -> ComparisonRow:
    levels = [shrink_support(v, D) for v in hierarchy(u, D, spec)]
    if not np.any(levels[0].values > 0):
        raise ValueError(f"corpus member {name!r} vanishes on the grid")
    star = [schwarz_rearrange(v) for v in levels]
    req = fractional_request(levels, Y, s, D, spec=spec)
    req_star = fractional_request(star, Y, s, star[0].domain, spec=spec)
    return ComparisonRow(name, seminorm_domain(req), seminorm_fullspace(req), seminorm_fullspace(req_star),
                         cross_term(req))


def verify_comparison(
    D: Domain,
    Y: YoungFunction,
    s: float,
    corpus: Sequence,
    spec: CubatureSpec = CubatureSpec(),
    case_id: int = 1,
    names: Optional[Sequence[str]] = None,
) -> ComparisonReport:
    """Empirical comparison ratios ``fullspace(u*) / domain(u)`` over a corpus.

    Raises ``CaseHypothesisFails`` unless the growth classifier confirms the
    declared case.
    """
    try:
        ok = classify_theorem2_case(Y, s, D.dim, case_id)
    except Inconclusive as exc:
        raise CaseHypothesisFails(f"case {case_id} classification inconclusive: {exc}") from exc
    if not ok:
        raise CaseHypothesisFails(f"case {case_id} growth condition fails for {Y.name}, s={s:g}")
    names = list(names) if names is not None else [f"u{k}" for k in range(len(corpus))]
    rows = [comparison_row(D, u, Y, s, spec, n) for u, n in zip(corpus, names)]
    return ComparisonReport(D, Y.name, s, case_id, rows)
