"""Quadrature rules on circles, spheres and balls.

Radial integration uses Gauss-Legendre.  On the unit circle the rule is
either the uniform trapezoid rule (spectrally exact for trigonometric
polynomials) or, when the integrand is only piecewise smooth with known
angular cut points, composite Gauss-Legendre per arc.  On S^2 a product
rule (Gauss-Legendre in the polar cosine x trapezoid in azimuth) is used;
it integrates spherical polynomials exactly at matching degree and
restricts cleanly to the upper hemisphere.
"""

from __future__ import annotations

import numpy as np

__all__ = ["gauss_legendre", "circle_rule", "sphere_rule", "ball_rule"]


def gauss_legendre(num: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(num)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def circle_rule(
    count: int, arcs: list[tuple[float, float]] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Angles and weights integrating f(theta) d(theta) over S^1.

    ``arcs=None`` gives the uniform trapezoid rule on [0, 2pi).  With arcs,
    a Gauss-Legendre rule with ``count`` nodes is placed on each arc; the
    integrand is assumed to vanish off the arcs.
    """
    if arcs is None:
        theta = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        w = np.full(count, 2 * np.pi / count)
        return theta, w
    thetas, weights = [], []
    for a, b in arcs:
        t, w = gauss_legendre(count, a, b)
        thetas.append(t)
        weights.append(w)
    return np.concatenate(thetas), np.concatenate(weights)


def sphere_rule(
    n: int,
    count: int,
    support: object = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Unit-sphere nodes (N, n) and weights for S^{n-1}, n in {2, 3}.

    ``support`` restricts the rule: for n=2 a list of angular arcs, for
    n=3 the string "upper" (hemisphere x_3 > 0).  Off-support the
    integrand is assumed to vanish.
    """
    if n == 2:
        theta, w = circle_rule(count, support)
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return pts, w
    if n == 3:
        if support is None:
            t, wt = gauss_legendre(count, -1.0, 1.0)
        elif support == "upper":
            t, wt = gauss_legendre(count, 0.0, 1.0)
        else:
            raise ValueError(f"unsupported S^2 restriction {support!r}")
        n_phi = 2 * count
        phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
        wphi = 2 * np.pi / n_phi
        s = np.sqrt(1.0 - t**2)
        pts = np.empty((len(t) * n_phi, 3))
        w = np.empty(len(t) * n_phi)
        for i in range(len(t)):
            sl = slice(i * n_phi, (i + 1) * n_phi)
            pts[sl, 0] = s[i] * np.cos(phi)
            pts[sl, 1] = s[i] * np.sin(phi)
            pts[sl, 2] = t[i]
            w[sl] = wt[i] * wphi
        return pts, w
    raise ValueError("sphere_rule supports n in {2, 3} only")


def ball_rule(
    n: int,
    radius: float,
    radial: int,
    sphere_count: int,
    support: object = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for integration over the ball of given radius.

    Weights include the s^{n-1} radial Jacobian.
    """
    omega, w_omega = sphere_rule(n, sphere_count, support)
    s, w_s = gauss_legendre(radial, 0.0, radius)
    pts = (s[:, None, None] * omega[None, :, :]).reshape(-1, n)
    w = ((w_s * s ** (n - 1))[:, None] * w_omega[None, :]).reshape(-1)
    return pts, w
