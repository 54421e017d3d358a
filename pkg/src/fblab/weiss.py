"""Scale-normalised energy W(r, u), its correction F(r, u), monotonicity
scans, and the closed-form half-space energy.

Definitions (k = m+2 is the natural vanishing order of u, n the dimension):

    W(r, u) = r^-(2m+n+2) int_{B_r} (|grad u|^2 + 2 H u) dx
              - (m+2) r^-(2m+n+3) int_{dB_r} u^2 dS

    F(r, u) = 2 int_0^r int_{B_1} s^-m R(sx) d_s u_s dx ds
              - 2 int_0^r int_{B_1} s^2 q(sx) u_s d_s u_s dx ds

with u_s(x) = u(sx)/s^{m+2} and

    d_s u_s(x) = -(m+2) s^{-m-3} u(sx) + s^{-m-2} x . grad u(sx).

W + F is nondecreasing in r for solutions of (Lap + q) u = (H + R) chi,
and for a half-space solution with harmonic homogeneous H of degree m

    W(1, v) = 1/(2(2m+n+2)) * 1/(lam_{m+2} - lam_m) * int_{S^{n-1}} H^2,

where lam_k = k(k+n-2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fields import Field, as_field, quad_support
from .halfspace import HalfspaceSolution, antipodal_extension
from .polyfield import MultiPoly, is_harmonic, sphere_l2, sphere_l2_exact
from .quadrature import ball_rule, gauss_legendre, sphere_rule

__all__ = [
    "QuadratureSpec",
    "WeissConfig",
    "WeissRecord",
    "WeissReport",
    "UnresolvedRadiusError",
    "weiss_W",
    "weiss_F",
    "weiss_closed_form",
    "weiss_closed_form_exact",
    "monotonicity_scan",
    "angular_profile_check",
    "profile_residuals",
    "AngularProfileResult",
]


class UnresolvedRadiusError(ValueError):
    """Radius too small for the grid resolution of a sampled field."""


@dataclass(frozen=True)
class QuadratureSpec:
    radial: int = 48
    angular: int = 256
    refine: int = 1

    def effective(self) -> tuple[int, int]:
        f = 2 ** (self.refine - 1)
        return self.radial * f, self.angular * f

    def bumped(self) -> "QuadratureSpec":
        return QuadratureSpec(self.radial, self.angular, self.refine + 1)


@dataclass(frozen=True)
class WeissConfig:
    m: int
    n: int
    r_grid: tuple[float, ...]
    quadrature: QuadratureSpec = dc_field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if self.n not in (2, 3):
            raise ValueError("quadrature is implemented for n in {2, 3}")
        rg = tuple(float(r) for r in self.r_grid)
        if not rg or any(r <= 0 for r in rg) or max(rg) > 1.0:
            raise ValueError("r_grid must be positive with max <= 1")
        if any(a <= b for a, b in zip(rg, rg[1:])):
            raise ValueError("r_grid must be strictly decreasing")
        radial, angular = self.quadrature.effective()
        if radial < self.m + 4 or angular < 8 * (self.m + 3):
            raise ValueError("quadrature too coarse for the target degree")
        object.__setattr__(self, "r_grid", rg)

    @classmethod
    def default(cls, m: int, n: int, r_min: float = 2.0**-8, steps: int = 17,
                quadrature: QuadratureSpec | None = None) -> "WeissConfig":
        rg = tuple(np.geomspace(1.0, r_min, steps))
        return cls(m, n, rg, quadrature or QuadratureSpec())


@dataclass(frozen=True)
class WeissRecord:
    r: float
    W: float
    F: float
    W_plus_F: float


@dataclass(frozen=True)
class WeissReport:
    records: tuple[WeissRecord, ...]  # sorted by increasing r
    monotone_verdict: bool
    max_violation: float
    tolerance: float
    limit_estimate: float


def _check_resolution(u: Field, r: float) -> None:
    h = getattr(u, "grid_h", None)
    if h is not None and r < 4 * h:
        raise UnresolvedRadiusError(
            f"radius {r:.3e} below 4x grid spacing {h:.3e}"
        )


def _grad_step(r: float) -> float:
    return r / 64.0


def _weiss_W_once(u: Field, H: MultiPoly, cfg: WeissConfig, r: float,
                  quad: QuadratureSpec) -> float:
    n = cfg.n
    m = cfg.m
    radial, angular = quad.effective()
    support = quad_support(getattr(u, "support", None), n)
    pts, w = ball_rule(n, r, radial, angular, support)
    grad = u.gradient(pts, step=_grad_step(r))
    vol = float(np.dot(w, np.sum(grad * grad, axis=1)
                       + 2.0 * np.asarray(H.evaluate(pts), float) * u(pts)))
    spts, sw = sphere_rule(n, angular, support)
    uvals = u(r * spts)
    surf = float(np.dot(sw, uvals * uvals)) * r ** (n - 1)
    return r ** -(2 * m + n + 2) * vol - (m + 2) * r ** -(2 * m + n + 3) * surf


def weiss_W(u, H: MultiPoly, cfg: WeissConfig, r: float,
            return_error: bool = False):
    """Scale-normalised energy at radius r, by quadrature.

    With ``return_error=True`` also returns a quadrature-error estimate
    (difference against a once-refined rule).
    """
    uf = as_field(u, cfg.n)
    _check_resolution(uf, r)
    val = _weiss_W_once(uf, H, cfg, r, cfg.quadrature)
    if not return_error:
        return val
    ref = _weiss_W_once(uf, H, cfg, r, cfg.quadrature.bumped())
    return val, abs(val - ref)


def weiss_F(u, R: Callable | None, q: Callable | None, cfg: WeissConfig,
            r: float) -> float:
    """Correction functional F(r, u) by nested quadrature.

    ``R`` and ``q`` are callables on (N, n) point arrays (or ``None`` for
    identically zero).  The s-integrand has an integrable endpoint at 0 and
    is extended by 0 there; Gauss-Legendre nodes never touch the endpoint.
    """
    if R is None and q is None:
        return 0.0
    uf = as_field(u, cfg.n)
    _check_resolution(uf, r)
    n, m = cfg.n, cfg.m
    radial, angular = cfg.quadrature.effective()
    support = quad_support(getattr(uf, "support", None), n)
    x, wx = ball_rule(n, 1.0, radial, angular, support)
    s_nodes, s_w = gauss_legendre(64, 0.0, r)
    total = 0.0
    for s, ws in zip(s_nodes, s_w):
        sx = s * x
        uvals = uf(sx)
        grad = uf.gradient(sx, step=_grad_step(s))
        du_s = (-(m + 2) * s ** (-m - 3) * uvals
                + s ** (-m - 2) * np.sum(x * grad, axis=1))
        if not np.all(np.isfinite(du_s)):
            raise ValueError("divergent inner integrand in F; check growth bounds")
        inner = 0.0
        if R is not None:
            inner += 2.0 * float(np.dot(wx, s ** (-m) * np.asarray(R(sx), float) * du_s))
        if q is not None:
            u_s = uvals * s ** (-m - 2)
            inner -= 2.0 * float(
                np.dot(wx, s**2 * np.asarray(q(sx), float) * u_s * du_s)
            )
        total += ws * inner
    return total


def _lam(k: int, n: int) -> int:
    return k * (k + n - 2)


def weiss_closed_form_exact(H: MultiPoly, n: int | None = None) -> tuple[Fraction, int]:
    """Exact half-space energy for harmonic homogeneous H, as (c, p) = c*pi^p."""
    if n is None:
        n = H.dim
    if n != H.dim:
        raise ValueError("n does not match the polynomial dimension")
    if not is_harmonic(H):
        raise ValueError("H must be harmonic")
    if not H.is_homogeneous():
        raise ValueError("H must be homogeneous")
    m = max(H.degree(), 0)
    l2, power = sphere_l2_exact(H)
    c = Fraction(1, 2 * (2 * m + n + 2)) * Fraction(1, _lam(m + 2, n) - _lam(m, n))
    return c * l2, power


def weiss_closed_form(H: MultiPoly, n: int | None = None) -> float:
    """W(1, v) for the half-space solution with rhs H: depends on H only
    through its squared L2 norm on the unit sphere."""
    if n is None:
        n = H.dim
    if n != H.dim:
        raise ValueError("n does not match the polynomial dimension")
    if not is_harmonic(H):
        raise ValueError("H must be harmonic")
    if not H.is_homogeneous():
        raise ValueError("H must be homogeneous")
    m = max(H.degree(), 0)
    denom = 2 * (2 * m + n + 2) * (_lam(m + 2, n) - _lam(m, n))
    return sphere_l2(H) / denom


def monotonicity_scan(u, H: MultiPoly, R: Callable | None, q: Callable | None,
                      cfg: WeissConfig) -> WeissReport:
    """Evaluate W and F on the configured radius grid and check that W + F
    is nondecreasing in r.  A false verdict is a finding, not an error."""
    uf = as_field(u, cfg.n)
    recs = []
    for r in cfg.r_grid:
        W = weiss_W(uf, H, cfg, r)
        F = weiss_F(uf, R, q, cfg, r)
        recs.append(WeissRecord(r=r, W=W, F=F, W_plus_F=W + F))
    recs.sort(key=lambda rec: rec.r)
    wf = [rec.W_plus_F for rec in recs]
    tol = 1e-8 * (1.0 + max(abs(rec.W) for rec in recs))
    violation = max(
        [wf[i] - wf[i + 1] for i in range(len(wf) - 1)], default=0.0
    )
    violation = max(0.0, violation)
    return WeissReport(
        records=tuple(recs),
        monotone_verdict=violation <= tol,
        max_violation=violation,
        tolerance=tol,
        limit_estimate=wf[0],
    )


# ---------------------------------------------------------------------------
# Angular profile of homogeneous half-space solutions (n = 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AngularProfileResult:
    ode_residual: float
    harmonic_fit_residual: float


def profile_residuals(phi: np.ndarray, Hvals: np.ndarray, m: int,
                      n: int = 2) -> AngularProfileResult:
    """Residuals for an angular profile sampled on a uniform theta grid.

    Checks (d^2/dt^2 + (m+2)^2) phi = H on S^1 (derivatives taken
    spectrally, exact for trigonometric polynomials below the Nyquist
    degree), and that phi - H/(lam_{m+2}-lam_m) is a pure degree-(m+2)
    circular harmonic.
    """
    N = len(phi)
    k = np.fft.fftfreq(N, d=1.0 / N)
    phi_hat = np.fft.fft(phi)
    # drop rounding-level modes before the k^2 amplification of d^2/dt^2
    floor = 1e-13 * np.max(np.abs(phi_hat)) if np.any(phi_hat) else 0.0
    phi_hat = np.where(np.abs(phi_hat) < floor, 0.0, phi_hat)
    d2phi = np.fft.ifft(-(k**2) * phi_hat).real
    ode_res = float(np.max(np.abs(d2phi + (m + 2) ** 2 * phi - Hvals)))

    psi = phi - Hvals / (_lam(m + 2, n) - _lam(m, n))
    psi_hat = np.fft.fft(psi)
    keep = np.abs(k) == (m + 2)
    qres = float(np.max(np.abs(np.fft.ifft(np.where(keep, 0.0, psi_hat)))))
    return AngularProfileResult(ode_residual=ode_res, harmonic_fit_residual=qres)


def angular_profile_check(v: HalfspaceSolution, n_theta: int = 1024) -> AngularProfileResult:
    """Angular sanity check of a 2D half-space solution.

    The antipodal polynomial extension restricted to the unit circle is the
    full angular profile; it must satisfy the circle ODE against the rhs and
    differ from H/(lam_{m+2}-lam_m) by a degree-(m+2) circular harmonic.
    """
    if v.dim != 2:
        raise ValueError("angular profile check is two-dimensional")
    ext = antipodal_extension(v)
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    circ = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    phi = np.asarray(ext.evaluate(circ), float)
    Hvals = np.asarray(v.rhs.evaluate(circ), float)
    return profile_residuals(phi, Hvals, v.m)
