"""Domain shapes: indicator, signed distance, and boundary samplers.

All shapes are anchored so that the origin is the boundary point under
study.  The sign convention is: signed distance < 0 inside the domain.
Lipschitz shapes expose an interior cone-opening constant (the radius
ratio delta such that B(x, r) intersected with the closed domain contains
a ball of radius delta*r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainShape",
    "halfspace",
    "sector",
    "quadrant",
    "polygon",
    "wedge",
    "lipschitz_graph",
    "fullspace",
    "empty",
]


@dataclass(frozen=True)
class DomainShape:
    """A domain with indicator/signed-distance callables and boundary access."""

    kind: str
    dim: int
    sdf: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    cone_opening: float | None = None
    _boundary: Callable[[float, int, np.random.Generator], np.ndarray] | None = None

    def signed_distance(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.sdf(pts)

    def indicator(self, pts) -> np.ndarray:
        """1.0 strictly inside, 0.0 outside (boundary counts as outside)."""
        return (self.signed_distance(pts) < 0).astype(float)

    def contains(self, pts) -> np.ndarray:
        return self.signed_distance(pts) < 0

    def boundary_points(
        self, r_max: float, count: int, rng: np.random.Generator | None = None
    ) -> np.ndarray:
        """Sample points of the boundary inside the ball of radius r_max."""
        if self._boundary is None:
            raise ValueError(f"shape kind {self.kind!r} has no boundary sampler")
        if rng is None:
            rng = np.random.default_rng(0)
        pts = self._boundary(r_max, count, rng)
        return pts[np.linalg.norm(pts, axis=1) <= r_max]


def _dist_to_ray(pts: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Distance from 2D points to the ray {t*d : t >= 0}, |d| = 1."""
    proj = np.clip(pts @ d, 0.0, None)
    closest = proj[:, None] * d[None, :]
    return np.linalg.norm(pts - closest, axis=1)


def halfspace(e: Sequence[float]) -> DomainShape:
    """Half-space {x . e > 0} through the origin."""
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    n = len(e)

    def sdf(pts):
        return -(pts @ e)

    def boundary(r_max, count, rng):
        # orthonormal basis of the plane e-perp
        basis = np.linalg.svd(e[None, :])[2][1:]
        coef = rng.uniform(-r_max, r_max, size=(count, n - 1))
        return coef @ basis

    return DomainShape(
        "halfspace", n, sdf, {"e": tuple(e)}, cone_opening=0.5, _boundary=boundary
    )


def _sector_sdf(theta0: float):
    d0 = np.array([1.0, 0.0])
    d1 = np.array([math.cos(theta0), math.sin(theta0)])

    def sdf(pts):
        ang = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
        inside = (ang > 0) & (ang < theta0)
        dist = np.minimum(_dist_to_ray(pts, d0), _dist_to_ray(pts, d1))
        return np.where(inside, -dist, dist)

    return sdf, (d0, d1)


def sector(theta0: float) -> DomainShape:
    """Planar sector of opening theta0, spanning angles (0, theta0)."""
    if not 0 < theta0 < 2 * math.pi:
        raise ValueError("sector angle must lie in (0, 2*pi)")
    sdf, (d0, d1) = _sector_sdf(theta0)

    def boundary(r_max, count, rng):
        t = rng.uniform(0.0, r_max, size=count)
        pick = rng.integers(0, 2, size=count)
        dirs = np.where(pick[:, None] == 0, d0[None, :], d1[None, :])
        return t[:, None] * dirs

    # interior cone property constant for the sector
    opening = min(theta0, 2 * math.pi - theta0) / 2
    return DomainShape(
        "sector",
        2,
        sdf,
        {"theta0": theta0},
        cone_opening=math.sin(min(opening, math.pi / 2)) / 2,
        _boundary=boundary,
    )


def quadrant() -> DomainShape:
    """First quadrant {x1 > 0, x2 > 0}."""
    s = sector(math.pi / 2)
    return DomainShape("quadrant", 2, s.sdf, {"theta0": math.pi / 2},
                       cone_opening=s.cone_opening, _boundary=s._boundary)


def polygon(vertices: Sequence[Sequence[float]]) -> DomainShape:
    """Simple closed polygon; vertices in order (either orientation)."""
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
        raise ValueError("polygon needs at least 3 planar vertices")
    edges = list(zip(verts, np.roll(verts, -1, axis=0)))

    def _inside(pts):
        # even-odd ray casting
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(len(pts), dtype=bool)
        for (x1, y1), (x2, y2) in edges:
            cond = (y1 > y) != (y2 > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= cond & (x < xint)
        return inside

    def _dist_edges(pts):
        d = np.full(len(pts), np.inf)
        for (a, b) in edges:
            ab = b - a
            tt = np.clip(((pts - a) @ ab) / (ab @ ab), 0.0, 1.0)
            proj = a + tt[:, None] * ab[None, :]
            d = np.minimum(d, np.linalg.norm(pts - proj, axis=1))
        return d

    def sdf(pts):
        d = _dist_edges(pts)
        return np.where(_inside(pts), -d, d)

    def boundary(r_max, count, rng):
        lengths = np.array([np.linalg.norm(b - a) for a, b in edges])
        probs = lengths / lengths.sum()
        pick = rng.choice(len(edges), size=count, p=probs)
        t = rng.uniform(0, 1, size=count)
        out = np.empty((count, 2))
        for i, (a, b) in enumerate(edges):
            sel = pick == i
            out[sel] = a + t[sel, None] * (b - a)[None, :]
        return out

    return DomainShape("polygon", 2, sdf, {"vertices": verts.tolist()},
                       cone_opening=None, _boundary=boundary)


def wedge(theta0: float) -> DomainShape:
    """3D edge wedge: planar sector (angles (0, theta0)) times the x3 line."""
    sdf2, (d0, d1) = _sector_sdf(theta0)

    def sdf(pts):
        return sdf2(pts[:, :2])

    def boundary(r_max, count, rng):
        t = rng.uniform(0.0, r_max, size=count)
        pick = rng.integers(0, 2, size=count)
        dirs = np.where(pick[:, None] == 0, d0[None, :], d1[None, :])
        x3 = rng.uniform(-r_max, r_max, size=count)
        return np.column_stack([t[:, None] * dirs, x3])

    s2 = sector(theta0)
    return DomainShape("wedge", 3, sdf, {"theta0": theta0},
                       cone_opening=s2.cone_opening, _boundary=boundary)


def lipschitz_graph(eta: Callable[[np.ndarray], np.ndarray],
                    lipschitz_const: float = 1.0) -> DomainShape:
    """2D supergraph domain {x2 > eta(x1)} with eta(0) = 0.

    The signed distance is the vertical distance scaled by the Lipschitz
    slope bound (a valid two-sided distance estimate, not exact).
    """
    scale = 1.0 / math.hypot(1.0, lipschitz_const)

    def sdf(pts):
        return (eta(pts[:, 0]) - pts[:, 1]) * scale

    def boundary(r_max, count, rng):
        t = rng.uniform(-r_max, r_max, size=count)
        return np.column_stack([t, eta(t)])

    delta = scale / 2
    return DomainShape("lipschitz-graph", 2, sdf,
                       {"lipschitz_const": lipschitz_const},
                       cone_opening=delta, _boundary=boundary)


def fullspace(n: int = 2) -> DomainShape:
    return DomainShape("fullspace", n, lambda pts: np.full(len(pts), -1.0), {})


def empty(n: int = 2) -> DomainShape:
    return DomainShape("empty", n, lambda pts: np.full(len(pts), 1.0), {})
