"""Domains, star-shaped covers with partitions of unity, and the shrink /
squeeze maps with their explicit constants.

Set predicates (membership, boundary distance, star-shapedness) are
sampling-based; every report carries the sampling density so the slack is
auditable. No randomness anywhere: all sample sets are deterministic
lattices or golden-angle point sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .fields import Grid, Mollifier, _bump_profile, _dilate_mask
from scipy import ndimage


class GeometryError(ValueError):
    pass


def _as_pts(pts, dim):
    pts = np.asarray(pts, dtype=float)
    if pts.shape[-1] != dim:
        raise GeometryError(f"points have dimension {pts.shape[-1]}, expected {dim}")
    return pts


class Domain:
    """Bounded domain: ball, axis box, convex polygon (2-d), or a union of
    overlapping axis boxes."""

    def __init__(self, kind, dim, **data):
        self.kind = kind
        self.dim = dim
        self._data = data
        self._validate()

    # -- constructors ------------------------------------------------------

    @classmethod
    def ball(cls, center, radius):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        return cls("ball", center.size, center=center, radius=float(radius))

    @classmethod
    def box(cls, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        return cls("box", lo.size, lo=lo, hi=hi)

    @classmethod
    def polygon(cls, vertices):
        v = np.asarray(vertices, dtype=float)
        return cls("polygon", 2, vertices=v)

    @classmethod
    def box_union(cls, boxes):
        parsed = [(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)) for lo, hi in boxes]
        return cls("box_union", parsed[0][0].size, boxes=parsed)

    @classmethod
    def from_literal(cls, text):
        tok = text.split()
        if not tok:
            raise GeometryError("empty domain literal")
        name = tok[0]
        args = [float(t) for t in tok[1:]] if name != "union" else None
        if name == "ball":
            if len(args) < 2:
                raise GeometryError("ball literal needs center and radius")
            return cls.ball(args[:-1], args[-1])
        if name == "box":
            if len(args) % 2 != 0 or not args:
                raise GeometryError("box literal needs 2d numbers")
            d = len(args) // 2
            return cls.box(args[:d], args[d:])
        if name == "polygon":
            if len(args) < 6 or len(args) % 2 != 0:
                raise GeometryError("polygon literal needs at least 3 (x, y) pairs")
            return cls.polygon(np.asarray(args).reshape(-1, 2))
        if name == "union":
            parts = text.split("box")
            boxes = []
            for part in parts[1:]:
                nums = [float(t) for t in part.replace("union", "").split()]
                if len(nums) % 2 != 0 or not nums:
                    raise GeometryError("union literal: each box needs 2d numbers")
                d = len(nums) // 2
                boxes.append((nums[:d], nums[d:]))
            if len(boxes) < 2:
                raise GeometryError("union literal needs at least two boxes")
            return cls.box_union(boxes)
        raise GeometryError(f"unknown domain literal '{name}'")

    # -- validation --------------------------------------------------------

    def _validate(self):
        if self.kind == "ball":
            if self._data["radius"] <= 0:
                raise GeometryError("ball radius must be positive")
        elif self.kind == "box":
            if np.any(self._data["hi"] <= self._data["lo"]):
                raise GeometryError("degenerate box")
        elif self.kind == "polygon":
            v = self._data["vertices"]
            if len(v) < 3:
                raise GeometryError("polygon needs at least 3 vertices")
            e = np.roll(v, -1, axis=0) - v
            cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
            area2 = np.sum(v[:, 0] * np.roll(v, -1, axis=0)[:, 1] - np.roll(v, -1, axis=0)[:, 0] * v[:, 1])
            if area2 <= 0:
                raise GeometryError("polygon vertices must be in counterclockwise order")
            if np.any(cross < -1e-12 * np.max(np.abs(v)) ** 2):
                raise GeometryError("polygon must be convex")
        elif self.kind == "box_union":
            for lo, hi in self._data["boxes"]:
                if np.any(hi <= lo):
                    raise GeometryError("degenerate box in union")
        else:
            raise GeometryError(f"unknown domain kind '{self.kind}'")

    # -- basic geometry ----------------------------------------------------

    def bounding_box(self):
        if self.kind == "ball":
            c, r = self._data["center"], self._data["radius"]
            return c - r, c + r
        if self.kind == "box":
            return self._data["lo"].copy(), self._data["hi"].copy()
        if self.kind == "polygon":
            v = self._data["vertices"]
            return v.min(axis=0), v.max(axis=0)
        los = np.array([lo for lo, _ in self._data["boxes"]])
        his = np.array([hi for _, hi in self._data["boxes"]])
        return los.min(axis=0), his.max(axis=0)

    @property
    def diameter(self):
        if self.kind == "ball":
            return 2.0 * self._data["radius"]
        if self.kind == "polygon":
            v = self._data["vertices"]
        elif self.kind == "box":
            lo, hi = self._data["lo"], self._data["hi"]
            v = _box_vertices(lo, hi)
        else:
            v = np.concatenate([_box_vertices(lo, hi) for lo, hi in self._data["boxes"]])
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def contains(self, pts, closed=True, tol=1e-12):
        """Pointwise membership; closed=False tests the open interior."""
        pts = _as_pts(pts, self.dim)
        t = tol if closed else -tol
        if self.kind == "ball":
            c, r = self._data["center"], self._data["radius"]
            return np.sum((pts - c) ** 2, axis=-1) <= (r + t) * (r + t) if closed else np.sum(
                (pts - c) ** 2, axis=-1
            ) < (r + t) * (r + t)
        if self.kind == "box":
            return _box_contains(pts, self._data["lo"], self._data["hi"], closed, tol)
        if self.kind == "polygon":
            v = self._data["vertices"]
            out = np.ones(pts.shape[:-1], dtype=bool)
            for i in range(len(v)):
                a, b = v[i], v[(i + 1) % len(v)]
                e = b - a
                cr = e[0] * (pts[..., 1] - a[1]) - e[1] * (pts[..., 0] - a[0])
                out &= cr >= -t * max(1.0, np.linalg.norm(e)) if closed else cr > t * max(1.0, np.linalg.norm(e))
            return out
        out = np.zeros(pts.shape[:-1], dtype=bool)
        for lo, hi in self._data["boxes"]:
            out |= _box_contains(pts, lo, hi, closed, tol)
        return out

    def distance_to_set(self, pts):
        """Euclidean distance to the closed domain (0 inside)."""
        pts = _as_pts(pts, self.dim)
        if self.kind == "ball":
            c, r = self._data["center"], self._data["radius"]
            return np.maximum(0.0, np.sqrt(np.sum((pts - c) ** 2, axis=-1)) - r)
        if self.kind == "box":
            return _box_outer_distance(pts, self._data["lo"], self._data["hi"])
        if self.kind == "polygon":
            inside = self.contains(pts)
            d = _polygon_edge_distance(pts, self._data["vertices"])
            return np.where(inside, 0.0, d)
        ds = [_box_outer_distance(pts, lo, hi) for lo, hi in self._data["boxes"]]
        return np.minimum.reduce(ds)

    def inner_distance(self, pts, boundary_pitch=None):
        """Distance to the boundary from inside (<= 0 outside)."""
        pts = _as_pts(pts, self.dim)
        if self.kind == "ball":
            c, r = self._data["center"], self._data["radius"]
            return r - np.sqrt(np.sum((pts - c) ** 2, axis=-1))
        if self.kind == "box":
            lo, hi = self._data["lo"], self._data["hi"]
            slack = np.minimum(pts - lo, hi - pts)
            return np.min(slack, axis=-1)
        if self.kind == "polygon":
            v = self._data["vertices"]
            vals = []
            for i in range(len(v)):
                a, b = v[i], v[(i + 1) % len(v)]
                e = b - a
                n = np.array([-e[1], e[0]]) / np.linalg.norm(e)  # inward for CCW
                vals.append((pts[..., 0] - a[0]) * n[0] + (pts[..., 1] - a[1]) * n[1])
            return np.min(np.stack(vals), axis=0)
        pitch = boundary_pitch or self.diameter / 2000.0
        bp = self.boundary_points(pitch)
        tree = cKDTree(bp)
        d, _ = tree.query(pts.reshape(-1, self.dim))
        d = d.reshape(pts.shape[:-1])
        sign = np.where(self.contains(pts), 1.0, -1.0)
        return sign * d

    def boundary_points(self, pitch):
        """Deterministic sampling of the boundary at roughly the given pitch."""
        if self.kind == "ball":
            return _ball_boundary(self._data["center"], self._data["radius"], pitch)
        if self.kind == "box":
            return _box_boundary(self._data["lo"], self._data["hi"], pitch)
        if self.kind == "polygon":
            v = self._data["vertices"]
            segs = []
            for i in range(len(v)):
                a, b = v[i], v[(i + 1) % len(v)]
                n = max(2, int(math.ceil(np.linalg.norm(b - a) / pitch)) + 1)
                t = np.linspace(0.0, 1.0, n, endpoint=False)
                segs.append(a + t[:, None] * (b - a))
            return np.concatenate(segs)
        pts = []
        for i, (lo, hi) in enumerate(self._data["boxes"]):
            cand = _box_boundary(lo, hi, pitch)
            keep = np.ones(len(cand), dtype=bool)
            for j, (lo2, hi2) in enumerate(self._data["boxes"]):
                if i == j:
                    continue
                keep &= ~_box_contains(cand, lo2, hi2, closed=False, tol=1e-12)
            pts.append(cand[keep])
        return np.concatenate(pts)

    def grid_mask(self, grid: Grid, closed=False):
        """Node mask. Boxes use half-open cells [lo, hi) so that the counted
        measure of an aligned box is exact; closed=True includes the
        boundary nodes (used for partition-of-unity checks)."""
        nodes = grid.nodes()
        if self.kind in ("box", "box_union"):
            boxes = [(self._data["lo"], self._data["hi"])] if self.kind == "box" else self._data["boxes"]
            out = np.zeros(grid.shape, dtype=bool)
            tol = 1e-9 * grid.h
            for lo, hi in boxes:
                m = np.ones(grid.shape, dtype=bool)
                for a in range(self.dim):
                    x = nodes[..., a]
                    upper = x <= hi[a] + tol if closed else x < hi[a] - tol
                    m &= (x >= lo[a] - tol) & upper
                out |= m
            return out
        return self.contains(nodes, closed=True)

    def interior_mask(self, grid: Grid):
        """Nodes strictly inside the open domain."""
        return self.contains(grid.nodes(), closed=False, tol=1e-9 * grid.h)

    def literal(self):
        if self.kind == "ball":
            c, r = self._data["center"], self._data["radius"]
            return "ball " + " ".join(repr(float(x)) for x in c) + f" {r!r}"
        if self.kind == "box":
            lo, hi = self._data["lo"], self._data["hi"]
            return "box " + " ".join(repr(float(x)) for x in np.concatenate([lo, hi]))
        if self.kind == "polygon":
            return "polygon " + " ".join(repr(float(x)) for x in self._data["vertices"].ravel())
        parts = []
        for lo, hi in self._data["boxes"]:
            parts.append("box " + " ".join(repr(float(x)) for x in np.concatenate([lo, hi])))
        return "union " + " ".join(parts)

    def inscribed_ball(self):
        """Center and radius of a large inscribed ball (exact for balls and
        boxes, lattice search with refinement for polygons)."""
        if self.kind == "ball":
            return self._data["center"].copy(), self._data["radius"]
        if self.kind == "box":
            lo, hi = self._data["lo"], self._data["hi"]
            return (lo + hi) / 2.0, float(np.min(hi - lo) / 2.0)
        if self.kind == "polygon":
            lo, hi = self.bounding_box()
            center, radius = None, -np.inf
            span = hi - lo
            c0, width = (lo + hi) / 2.0, span
            for _ in range(8):
                axes = [np.linspace(c0[a] - width[a] / 2, c0[a] + width[a] / 2, 17) for a in range(2)]
                mesh = np.meshgrid(*axes, indexing="ij")
                pts = np.stack(mesh, axis=-1).reshape(-1, 2)
                d = self.inner_distance(pts)
                k = int(np.argmax(d))
                if d[k] > radius:
                    radius, center = float(d[k]), pts[k]
                c0, width = pts[k], width / 8.0
            return center, radius
        raise GeometryError("inscribed ball of a box union is piecewise; use the cover")


def _box_vertices(lo, hi):
    d = len(lo)
    corners = []
    for bits in range(2**d):
        corners.append([hi[a] if (bits >> a) & 1 else lo[a] for a in range(d)])
    return np.asarray(corners)


def _box_contains(pts, lo, hi, closed, tol):
    if closed:
        m = np.all(pts >= lo - tol, axis=-1) & np.all(pts <= hi + tol, axis=-1)
    else:
        m = np.all(pts > lo + tol, axis=-1) & np.all(pts < hi - tol, axis=-1)
    return m


def _box_outer_distance(pts, lo, hi):
    over = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
    return np.sqrt(np.sum(over**2, axis=-1))


def _polygon_edge_distance(pts, v):
    flat = pts.reshape(-1, 2)
    best = np.full(len(flat), np.inf)
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        e = b - a
        ee = float(e @ e)
        t = np.clip(((flat - a) @ e) / ee, 0.0, 1.0)
        proj = a + t[:, None] * e
        best = np.minimum(best, np.sqrt(np.sum((flat - proj) ** 2, axis=-1)))
    return best.reshape(pts.shape[:-1])


def _ball_boundary(center, radius, pitch):
    d = len(center)
    if d == 1:
        return np.array([[center[0] - radius], [center[0] + radius]])
    if d == 2:
        m = max(8, int(math.ceil(2 * math.pi * radius / pitch)))
        th = 2 * math.pi * np.arange(m) / m
        return center + radius * np.stack([np.cos(th), np.sin(th)], axis=-1)
    m = max(32, int(math.ceil(4 * math.pi * radius**2 / pitch**2)))
    i = np.arange(m) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i  # golden angle
    z = 1.0 - 2.0 * i / m
    rho = np.sqrt(np.maximum(0.0, 1.0 - z**2))
    sph = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    return center + radius * sph


def _box_boundary(lo, hi, pitch):
    d = len(lo)
    if d == 1:
        return np.array([[lo[0]], [hi[0]]])
    pts = []
    for a in range(d):
        other = [b for b in range(d) if b != a]
        axes = [np.linspace(lo[b], hi[b], max(2, int(math.ceil((hi[b] - lo[b]) / pitch)) + 1)) for b in other]
        mesh = np.meshgrid(*axes, indexing="ij") if axes else []
        base = np.stack([m.ravel() for m in mesh], axis=-1) if axes else np.zeros((1, 0))
        for val in (lo[a], hi[a]):
            face = np.empty((len(base), d))
            face[:, a] = val
            for k, b in enumerate(other):
                face[:, b] = base[:, k]
            pts.append(face)
    return np.concatenate(pts)


class Intersection:
    """Lightweight region U ∩ Ω used for the star-shaped cover pieces."""

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.dim = a.dim

    def contains(self, pts, closed=True, tol=1e-12):
        return self.a.contains(pts, closed, tol) & self.b.contains(pts, closed, tol)

    def bounding_box(self):
        lo1, hi1 = self.a.bounding_box()
        lo2, hi2 = self.b.bounding_box()
        return np.maximum(lo1, lo2), np.minimum(hi1, hi2)

    @property
    def diameter(self):
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))


# ---------------------------------------------------------------------------
# star shapes and squeezing


def _ball_lattice(center, radius, per_axis=5):
    d = len(center)
    ax = np.linspace(-radius, radius, per_axis)
    mesh = np.meshgrid(*([ax] * d), indexing="ij")
    pts = center + np.stack(mesh, axis=-1).reshape(-1, d)
    keep = np.sum((pts - center) ** 2, axis=-1) <= (radius * (1 - 1e-9)) ** 2
    return pts[keep]


def _directions(dim, count):
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        th = 2 * math.pi * np.arange(count) / count
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    i = np.arange(count) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z**2))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def is_star_shaped(region, x0, radius, ray_count=64, step=None):
    """Ray test: from sampled ball points, the inside indicator along every
    direction must switch inside->outside exactly once.

    Returns (ok, witness); witness holds the offending origin/direction.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    diam = region.diameter
    step = step or diam / 400.0
    origins = _ball_lattice(x0, radius, per_axis=5)
    inside_org = region.contains(origins)
    if not bool(np.all(inside_org)):
        bad = origins[~inside_org][0]
        raise GeometryError(f"ball of radius {radius} around {x0} is not inside the region (witness {bad})")
    dirs = _directions(len(x0), ray_count)
    nt = int(math.ceil(1.2 * diam / step)) + 2
    t = step * np.arange(1, nt + 1)
    pts = origins[:, None, None, :] + dirs[None, :, None, :] * t[None, None, :, None]
    inside = region.contains(pts)  # (n_origin, n_dir, n_t)
    left_before = np.concatenate(
        [np.zeros_like(inside[..., :1], dtype=bool), np.maximum.accumulate(~inside, axis=2)[..., :-1]],
        axis=2,
    )
    reenter = inside & left_before
    if np.any(reenter):
        o, dd, _ = np.argwhere(reenter)[0]
        return False, {"origin": origins[o].tolist(), "direction": dirs[dd].tolist(), "step": step}
    return True, None


def shrink_factor(epsilon, R):
    """Inward scaling 1 - 4*eps/R, valid for 0 < eps <= R/8."""
    if not (0 < epsilon <= R / 8.0 + 1e-15):
        raise GeometryError(f"epsilon={epsilon} outside (0, R/8] with R={R}")
    return 1.0 - 4.0 * epsilon / R


@dataclass
class ShrinkReport:
    min_distance: float
    required: float
    pitch: float
    passed: bool
    kappa: float


def verify_shrink_distance(region, x0, R, epsilon, pitch=1e-3):
    """Measure dist between the shrunk boundary and the original boundary;
    the shrunk copy of a region star-shaped around the ball must clear 2*eps."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if epsilon == 0:
        return ShrinkReport(0.0, 0.0, pitch, True, 1.0)
    kappa = shrink_factor(epsilon, R)
    bp = region.boundary_points(pitch)
    shrunk = x0 + kappa * (bp - x0)
    tree = cKDTree(bp)
    d, _ = tree.query(shrunk)
    measured = float(d.min())
    required = 2.0 * epsilon - 2.0 * pitch
    return ShrinkReport(measured, 2.0 * epsilon, pitch, measured >= required, kappa)


def squeeze_point(x, x_i, kappa, y):
    """Preimage map of the squeezing operator: x_i + (x - x_i - y)/kappa."""
    x = np.asarray(x, dtype=float)
    x_i = np.asarray(x_i, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (0 < kappa < 1 or kappa == 1.0):
        raise GeometryError("kappa must lie in (0, 1]")
    return x_i + (x - x_i - y) / kappa


def squeeze_locality_constant(domain, R):
    """8*diam/R + 2: radius multiplier bounding how far the squeeze map moves
    points (per unit epsilon)."""
    if R <= 0:
        raise GeometryError("R must be positive")
    return 8.0 * domain.diameter / R + 2.0


# ---------------------------------------------------------------------------
# covers


@dataclass
class CoverPiece:
    u_region: Domain          # open piece U_i of the cover
    center: np.ndarray        # x_i
    radius: float             # R_i
    piece_region: object      # U_i ∩ Ω (the star-shaped set)


@dataclass
class StarCover:
    domain: Domain
    pieces: list
    inflation: float

    @property
    def R(self):
        return min(p.radius for p in self.pieces)


def _inflated_box(lo, hi, margin):
    return Domain.box(lo - margin, hi + margin)


def build_cover(domain: Domain, verify_rays=48) -> StarCover:
    """One piece for ball/convex shapes, one per box for unions of
    overlapping axis boxes (each inflated by 25% of its width)."""
    if domain.kind == "ball":
        c, r = domain.inscribed_ball()
        u = Domain.ball(c, r * 1.1)
        return StarCover(domain, [CoverPiece(u, c, r, domain)], 0.1 * r)
    if domain.kind == "box":
        lo, hi = domain._data["lo"], domain._data["hi"]
        margin = 0.1 * float(np.min(hi - lo))
        c, r = domain.inscribed_ball()
        u = _inflated_box(lo, hi, margin)
        return StarCover(domain, [CoverPiece(u, c, r, domain)], margin)
    if domain.kind == "polygon":
        v = domain._data["vertices"]
        centroid = v.mean(axis=0)
        u = Domain.polygon(centroid + 1.1 * (v - centroid))
        c, r = domain.inscribed_ball()
        return StarCover(domain, [CoverPiece(u, c, r, domain)], None)
    if domain.kind != "box_union":
        raise GeometryError("decomposition not implemented for this shape")

    boxes = domain._data["boxes"]
    pieces = []
    min_margin = np.inf
    for i, (lo, hi) in enumerate(boxes):
        margin = 0.25 * float(np.min(hi - lo))
        min_margin = min(min_margin, margin)
        u = _inflated_box(lo, hi, margin)
        # Ball placement: the ball must sit inside every neighbour box that
        # protrudes into U_i beyond box_i. Each point of the piece then lies
        # in some box the ball also lies in, and segments stay inside that
        # convex box clipped by U_i, which makes the piece star-shaped.
        feas_lo, feas_hi = lo.copy(), hi.copy()
        ulo, uhi = u._data["lo"], u._data["hi"]
        for j, (lo2, hi2) in enumerate(boxes):
            if i == j:
                continue
            clo, chi = np.maximum(lo2, ulo), np.minimum(hi2, uhi)
            if np.any(chi <= clo):
                continue
            protrudes = bool(np.any(clo < lo - 1e-12) or np.any(chi > hi + 1e-12))
            if not protrudes:
                continue
            feas_lo = np.maximum(feas_lo, lo2)
            feas_hi = np.minimum(feas_hi, hi2)
        if np.any(feas_hi <= feas_lo):
            raise GeometryError("decomposition not implemented: no feasible star center")
        center = (feas_lo + feas_hi) / 2.0
        radius = float(np.min(feas_hi - feas_lo) / 2.0)
        piece = Intersection(u, domain)
        ok, witness = is_star_shaped(piece, center, radius, ray_count=verify_rays)
        tries = 0
        while not ok and tries < 3:
            radius /= 2.0
            ok, witness = is_star_shaped(piece, center, radius, ray_count=verify_rays)
            tries += 1
        if not ok:
            raise GeometryError(f"piece {i} is not star-shaped w.r.t. any tried ball; witness {witness}")
        pieces.append(CoverPiece(u, center, radius, piece))
    return StarCover(domain, pieces, min_margin)


@dataclass
class CoverReport:
    covered: bool
    balls_inside: bool
    star_shaped: bool
    lattice: int
    pitch: float


def verify_cover(cover: StarCover, lattice=48, pitch=None) -> CoverReport:
    dom = cover.domain
    lo, hi = dom.bounding_box()
    pitch = pitch or dom.diameter / 400.0
    axes = [np.linspace(lo[a], hi[a], lattice) for a in range(dom.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, dom.dim)
    pts = pts[dom.contains(pts)]
    pts = np.concatenate([pts, dom.boundary_points(pitch)])
    in_any = np.zeros(len(pts), dtype=bool)
    for p in cover.pieces:
        in_any |= p.u_region.contains(pts)
    covered = bool(np.all(in_any))
    balls = True
    star = True
    for p in cover.pieces:
        ball_pts = _ball_lattice(p.center, p.radius, per_axis=7)
        balls &= bool(np.all(p.piece_region.contains(ball_pts)))
        ok, _ = is_star_shaped(p.piece_region, p.center, p.radius, ray_count=32)
        star &= ok
    return CoverReport(covered, balls, star, lattice, pitch)


# ---------------------------------------------------------------------------
# partition of unity


@dataclass
class PartitionOfUnity:
    grid: Grid
    weights: list  # one ndarray per cover piece
    smoothing_radius: float


def _shrunk_region_mask(piece: CoverPiece, grid: Grid, margin):
    """Node mask of U_i shrunk by the margin."""
    u = piece.u_region
    nodes = grid.nodes()
    return u.inner_distance(nodes) >= margin


def build_partition(cover: StarCover, grid: Grid, smoothing_radius) -> PartitionOfUnity:
    """Mollified indicators of margin-shrunk pieces, normalized to sum to 1.

    The margin is twice the smoothing radius, so every weight's support stays
    at least one smoothing radius inside its piece.
    """
    rho = float(smoothing_radius)
    eta = Mollifier(rho, grid.h, grid.dim)
    raws = []
    for piece in cover.pieces:
        ind = _shrunk_region_mask(piece, grid, 2.0 * rho).astype(float)
        sm = ndimage.convolve(ind, eta.weights, mode="constant", cval=0.0)
        raws.append(sm)
    total = np.sum(raws, axis=0)
    closed = cover.domain.grid_mask(grid, closed=True)
    holes = closed & (total <= 0)
    if np.any(holes):
        where = grid.nodes()[holes][0]
        raise GeometryError(
            f"overlap too thin for smoothing radius {rho}: no piece covers node {where}; "
            f"thin pair near that node"
        )
    weights = []
    safe = np.where(total > 0, total, 1.0)
    for sm in raws:
        w = np.where(total > 0, sm / safe, 0.0)
        weights.append(w)
    return PartitionOfUnity(grid, weights, rho)


@dataclass
class PartitionReport:
    max_sum_error: float
    min_support_clearance: float
    in_range: bool
    passed: bool


def verify_partition(pou: PartitionOfUnity, cover: StarCover, tol=1e-10) -> PartitionReport:
    grid = pou.grid
    closed = cover.domain.grid_mask(grid, closed=True)
    total = np.sum(pou.weights, axis=0)
    sum_err = float(np.max(np.abs(total[closed] - 1.0))) if closed.any() else 0.0
    in_range = all(float(w.min()) >= -tol and float(w.max()) <= 1 + tol for w in pou.weights)
    clearance = np.inf
    nodes = grid.nodes()
    for w, piece in zip(pou.weights, cover.pieces):
        supp = w > 0
        if not supp.any():
            continue
        d = piece.u_region.inner_distance(nodes[supp])
        clearance = min(clearance, float(d.min()))
    need = pou.smoothing_radius - grid.h * math.sqrt(grid.dim)
    passed = sum_err <= tol and in_range and clearance >= need
    return PartitionReport(sum_err, clearance, in_range, passed)
