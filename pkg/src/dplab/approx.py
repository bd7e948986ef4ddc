"""Approximation operators that mollify while pulling the support strictly
inside the domain, plus their gradient sup-norm bounds.

Three modes:
  * ball      -- dilate by 1/(1-2*eps) about the origin, then mollify;
                 for fields supported in the closed unit ball.
  * star      -- dilate by 1/kappa about a star center, kappa = 1 - 4*eps/R;
                 for fields supported in a piece star-shaped around B_R(x0).
  * composite -- sum of star operators applied to u * theta_i over a cover.

Dilated samples are taken by multilinear interpolation on the fixed grid, so
each operator is one interpolation pass plus one lattice convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .fields import (
    Grid,
    Mollifier,
    ScalarField,
    gradient,
    interpolate,
    lp_norm,
    sup_norm,
    unit_kernel_norms,
)
from .geometry import PartitionOfUnity, StarCover, squeeze_locality_constant


class ApproxError(ValueError):
    pass


@dataclass
class SqueezeMollifyPlan:
    epsilon: float
    kernel: Mollifier
    mode: str  # ball | star | composite
    x0: np.ndarray = None
    R: float = None
    cover: StarCover = None
    pou: PartitionOfUnity = None

    def __post_init__(self):
        if self.mode == "ball":
            if not (0 < self.epsilon < 0.25):
                raise ApproxError("ball mode needs epsilon in (0, 1/4)")
        elif self.mode in ("star", "composite"):
            if self.R is None or not (0 < self.epsilon <= self.R / 8.0 + 1e-15):
                raise ApproxError("star/composite modes need epsilon <= R/8")
        else:
            raise ApproxError(f"unknown mode '{self.mode}'")


def _dilated(values, grid: Grid, center, factor):
    """Samples of x -> values(center + (x - center)/factor) on the grid."""
    nodes = grid.nodes()
    pts = center + (nodes - center) / factor
    return interpolate(values, grid, pts)


def squeeze_mollify_ball(u: ScalarField, epsilon) -> ScalarField:
    """Mollify-and-dilate for fields on the closed unit ball; the result
    vanishes outside the ball of radius 1 - eps."""
    if not (0 < epsilon < 0.25):
        raise ApproxError("epsilon must lie in (0, 1/4)")
    grid = u.grid
    eta = Mollifier(epsilon, grid.h, grid.dim)
    smoothed = ndimage.convolve(u.values, eta.weights, mode="constant", cval=0.0)
    out = _dilated(smoothed, grid, np.zeros(grid.dim), 1.0 - 2.0 * epsilon)
    r = np.sqrt(np.sum(grid.nodes() ** 2, axis=-1))
    mask = r <= 1.0 - epsilon
    return ScalarField(grid, np.where(mask, out, 0.0), mask)


def squeeze_mollify_star(u: ScalarField, x0, R, epsilon, region=None) -> ScalarField:
    """Squeeze toward the star center x0 (factor kappa = 1 - 4 eps/R), then
    mollify. Support lands in x0 + closure(kappa (U - x0) + eps B)."""
    if not (0 < epsilon <= R / 8.0 + 1e-15):
        raise ApproxError("epsilon must lie in (0, R/8]")
    grid = u.grid
    kappa = 1.0 - 4.0 * epsilon / R
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    eta = Mollifier(epsilon, grid.h, grid.dim)
    dil = _dilated(u.values, grid, x0, kappa)
    out = ndimage.convolve(dil, eta.weights, mode="constant", cval=0.0)
    return ScalarField(grid, out, out != 0.0)


def squeeze_mollify_general(u: ScalarField, cover: StarCover, pou: PartitionOfUnity, epsilon) -> ScalarField:
    """Sum of per-piece squeeze operators applied to u * theta_i."""
    R = cover.R
    if not (0 < epsilon <= R / 8.0 + 1e-15):
        raise ApproxError("epsilon must lie in (0, R/8]")
    if pou.grid is not u.grid and pou.grid != u.grid:
        raise ApproxError("partition and field live on different grids")
    total = np.zeros(u.grid.shape)
    for piece, w in zip(cover.pieces, pou.weights):
        part = ScalarField(u.grid, u.values * w, u.mask)
        s = squeeze_mollify_star(part, piece.center, R, epsilon, piece.piece_region)
        total += s.values
    return ScalarField(u.grid, total, total != 0.0)


def apply_plan(u: ScalarField, plan: SqueezeMollifyPlan) -> ScalarField:
    if plan.mode == "ball":
        return squeeze_mollify_ball(u, plan.epsilon)
    if plan.mode == "star":
        return squeeze_mollify_star(u, plan.x0, plan.R, plan.epsilon)
    return squeeze_mollify_general(u, plan.cover, plan.pou, plan.epsilon)


def support_clearance(f: ScalarField, region) -> float:
    """Min distance from the support nodes to the grid nodes outside the
    region (a one-cell-accurate stand-in for distance to the boundary)."""
    nodes = f.grid.nodes()
    outside = ~region.contains(nodes)
    supp = f.values != 0.0
    if not supp.any():
        return math.inf
    if not outside.any():
        return math.inf
    tree = cKDTree(nodes[outside].reshape(-1, f.grid.dim))
    d, _ = tree.query(nodes[supp].reshape(-1, f.grid.dim))
    return float(d.min())


# ---------------------------------------------------------------------------
# gradient sup-norm bounds


def grad_bound_case1(u: ScalarField, epsilon):
    """Sup-norm route: bound 5 ||u||_inf ||grad eta||_1 (5 eps)^-1 against the
    measured sup of |grad| of the ball-mode output."""
    grad_l1, _ = unit_kernel_norms(u.grid.dim)
    bound = 5.0 * sup_norm(u) * grad_l1 / (5.0 * epsilon)
    s = squeeze_mollify_ball(u, epsilon)
    measured = sup_norm(gradient(s).magnitude())
    return bound, measured


def grad_bound_case2(u: ScalarField, epsilon, p):
    """Gradient-integrability route, only for p > d: bound
    5^(d/p) ||grad u||_p ||eta||_{p'} (5 eps)^(-d/p)."""
    d = u.grid.dim
    if p <= d:
        raise ApproxError("this route requires p > d")
    _, lpprime = unit_kernel_norms(d, p)
    grad_p = lp_norm(gradient(u).magnitude(), p)
    bound = 5.0 ** (d / p) * grad_p * lpprime * (5.0 * epsilon) ** (-d / p)
    s = squeeze_mollify_ball(u, epsilon)
    measured = sup_norm(gradient(s).magnitude())
    return bound, measured


def grad_bound_general(u: ScalarField, cover: StarCover, pou: PartitionOfUnity, epsilon, case, p=None):
    """Composite-operator bounds with the locality constant C = 8 diam/R + 2:
    case 1: n ||u||_inf ||grad eta||_1 C * (C eps)^-1;
    case 2: 2 C^(d/p) ||eta||_{p'} * sum_i(||grad u||_p ||th_i||_inf +
            ||u||_p ||grad th_i||_inf) * (C eps)^(-d/p)."""
    d = u.grid.dim
    C = squeeze_locality_constant(cover.domain, cover.R)
    n = len(cover.pieces)
    if case == 1:
        grad_l1, _ = unit_kernel_norms(d)
        D = n * sup_norm(u) * grad_l1 * C
        bound = D / (C * epsilon)
    elif case == 2:
        if p is None or p <= d:
            raise ApproxError("case 2 requires p > d")
        _, lpprime = unit_kernel_norms(d, p)
        gu = gradient(u).magnitude()
        total = 0.0
        for w in pou.weights:
            wf = ScalarField(u.grid, w, np.ones(u.grid.shape, dtype=bool))
            gw = gradient(wf).magnitude()
            total += lp_norm(gu, p) * sup_norm(wf) + lp_norm(u, p) * sup_norm(gw)
        D = 2.0 * C ** (d / p) * lpprime * total
        bound = D * (C * epsilon) ** (-d / p)
    else:
        raise ApproxError("case must be 1 or 2")
    s = squeeze_mollify_general(u, cover, pou, epsilon)
    measured = sup_norm(gradient(s).magnitude())
    return bound, measured
