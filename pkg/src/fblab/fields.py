"""Field objects: values + derivatives on R^n, with optional support shape.

A *field* is anything exposing ``dim``, ``__call__(points) -> values`` and
``gradient(points) -> (N, dim)``.  Concrete kinds:

 - :class:`PolyField`          polynomial, analytic derivatives (exact formulas)
 - :class:`RestrictedField`    a field multiplied by a domain indicator
 - :class:`CallableField`      arbitrary formula, finite-difference fallback
 - :class:`SampledField`       regular-grid samples with optional analytic
   backing; without backing, evaluation uses cubic interpolation

Quadrature code consults ``field.support`` (a :class:`~fblab.shapes.DomainShape`
or ``None``) to pick rules that respect known discontinuity interfaces.
"""

from __future__ import annotations

import json
import math
import os
from typing import Callable, Sequence

import numpy as np

from .polyfield import MultiPoly, gradient as poly_gradient
from .shapes import DomainShape

__all__ = [
    "Field",
    "PolyField",
    "RestrictedField",
    "CallableField",
    "SampledField",
    "as_field",
    "quad_support",
    "save_field",
    "load_field",
]


class Field:
    """Base class; concrete fields override value/gradient evaluation."""

    dim: int
    support: DomainShape | None = None
    grid_h: float | None = None  # set for purely sampled fields

    def __call__(self, pts) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, pts, step: float | None = None) -> np.ndarray:
        """Default: centered finite differences of the value function."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        h = step if step is not None else 1e-6
        out = np.empty_like(pts)
        for i in range(self.dim):
            dp = np.zeros(self.dim)
            dp[i] = h
            out[:, i] = (self(pts + dp) - self(pts - dp)) / (2 * h)
        return out

    def hessian(self, pts, step: float | None = None) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        h = step if step is not None else 1e-4
        n = self.dim
        out = np.empty((len(pts), n, n))
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = h
            for j in range(i, n):
                ej = np.zeros(n)
                ej[j] = h
                val = (
                    self(pts + ei + ej)
                    - self(pts + ei - ej)
                    - self(pts - ei + ej)
                    + self(pts - ei - ej)
                ) / (4 * h * h)
                out[:, i, j] = val
                out[:, j, i] = val
        return out


class PolyField(Field):
    def __init__(self, p: MultiPoly, support: DomainShape | None = None):
        self.poly = p
        self.dim = p.dim
        self.support = support
        self._grads = poly_gradient(p)
        self._hess = [[g.derivative(j) for j in range(p.dim)] for g in self._grads]

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.poly.evaluate(pts), dtype=float)

    def gradient(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.stack([np.asarray(g.evaluate(pts), float) for g in self._grads], axis=1)

    def hessian(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = self.dim
        out = np.empty((len(pts), n, n))
        for i in range(n):
            for j in range(n):
                out[:, i, j] = np.asarray(self._hess[i][j].evaluate(pts), float)
        return out


class RestrictedField(Field):
    """base * indicator(shape); valid a.e. for C^{1,1} fields vanishing on
    the boundary together with their gradient."""

    def __init__(self, base: Field, shape: DomainShape):
        if base.dim != shape.dim:
            raise ValueError("field/shape dimension mismatch")
        self.base = base
        self.dim = base.dim
        self.support = shape

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.base(pts) * self.support.indicator(pts)

    def gradient(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        chi = self.support.indicator(pts)
        return self.base.gradient(pts, step) * chi[:, None]

    def hessian(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        chi = self.support.indicator(pts)
        return self.base.hessian(pts, step) * chi[:, None, None]


class CallableField(Field):
    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        dim: int,
        grad: Callable[[np.ndarray], np.ndarray] | None = None,
        hess: Callable[[np.ndarray], np.ndarray] | None = None,
        support: DomainShape | None = None,
        fd_step: float = 1e-6,
    ):
        self.func = func
        self.dim = dim
        self._grad = grad
        self._hess = hess
        self.support = support
        self.fd_step = fd_step

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self.func(pts), dtype=float)

    def gradient(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self._grad is not None:
            return np.asarray(self._grad(pts), dtype=float)
        return super().gradient(pts, step if step is not None else self.fd_step)

    def hessian(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self._hess is not None:
            return np.asarray(self._hess(pts), dtype=float)
        return super().hessian(pts, step)


class SampledField(Field):
    """Function samples on a regular origin-centred grid over [-extent, extent]^n.

    When an analytic backing formula is attached, evaluation and derivatives
    use it directly (the grid then only documents the resolution); otherwise
    cubic interpolation on the grid is used and the resolvable scale is
    limited by the spacing ``h``.
    """

    def __init__(
        self,
        dim: int,
        extent: float,
        values: np.ndarray,
        m: int | None = None,
        backing: Callable | None = None,
        backing_grad: Callable | None = None,
        backing_hess: Callable | None = None,
        backing_laplacian: Callable | None = None,
        support: DomainShape | None = None,
    ):
        values = np.asarray(values, dtype=float)
        if values.ndim != dim or len(set(values.shape)) != 1:
            raise ValueError("values must be a cubical array of rank dim")
        if not np.all(np.isfinite(values)):
            raise ValueError("field samples must be finite")
        self.dim = dim
        self.extent = float(extent)
        self.values = values
        self.m = m
        self.nodes = np.linspace(-extent, extent, values.shape[0])
        self.h = float(self.nodes[1] - self.nodes[0])
        self.backing = backing
        self.backing_grad = backing_grad
        self.backing_hess = backing_hess
        self.backing_laplacian = backing_laplacian
        self.support = support
        self.grid_h = None if backing is not None else self.h
        self._interp = None
        if backing is not None:
            self._check_backing()

    @classmethod
    def from_function(
        cls,
        func: Callable,
        dim: int,
        extent: float = 2.0,
        n: int | None = None,
        m: int | None = None,
        grad: Callable | None = None,
        hess: Callable | None = None,
        laplacian: Callable | None = None,
        support: DomainShape | None = None,
        keep_backing: bool = True,
    ) -> "SampledField":
        if n is None:
            n = 257 if dim == 2 else (65 if dim == 3 else 513)
        nodes = np.linspace(-extent, extent, n)
        mesh = np.meshgrid(*([nodes] * dim), indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=1)
        values = np.asarray(func(pts), dtype=float).reshape((n,) * dim)
        return cls(
            dim,
            extent,
            values,
            m=m,
            backing=func if keep_backing else None,
            backing_grad=grad if keep_backing else None,
            backing_hess=hess if keep_backing else None,
            backing_laplacian=laplacian if keep_backing else None,
            support=support,
        )

    def _check_backing(self, n_check: int = 64, tol: float = 1e-14) -> None:
        rng = np.random.default_rng(7)
        idx = tuple(
            rng.integers(0, self.values.shape[0], size=n_check)
            for _ in range(self.dim)
        )
        pts = np.stack([self.nodes[i] for i in idx], axis=1)
        ref = np.asarray(self.backing(pts), dtype=float)
        got = self.values[idx]
        scale = 1.0 + np.max(np.abs(self.values))
        if np.max(np.abs(ref - got)) > tol * scale:
            raise ValueError("grid samples disagree with the analytic backing")

    def _interpolator(self):
        if self._interp is None:
            from scipy.interpolate import RegularGridInterpolator

            self._interp = RegularGridInterpolator(
                (self.nodes,) * self.dim, self.values, method="cubic",
                bounds_error=True,
            )
        return self._interp

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.backing is not None:
            return np.asarray(self.backing(pts), dtype=float)
        return self._interpolator()(pts)

    def gradient(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.backing_grad is not None:
            return np.asarray(self.backing_grad(pts), dtype=float)
        h = step if step is not None else (self.h / 4 if self.backing is None else 1e-6)
        return super().gradient(pts, h)

    def hessian(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.backing_hess is not None:
            return np.asarray(self.backing_hess(pts), dtype=float)
        h = step if step is not None else (self.h / 2 if self.backing is None else 1e-4)
        return super().hessian(pts, h)

    def laplacian_values(self, pts, step=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.backing_laplacian is not None:
            return np.asarray(self.backing_laplacian(pts), dtype=float)
        hess = self.hessian(pts, step)
        return np.trace(hess, axis1=1, axis2=2)


def as_field(u, dim: int | None = None) -> Field:
    """Wrap polynomials, callables or (value, grad) pairs as a Field."""
    if isinstance(u, Field):
        return u
    if isinstance(u, MultiPoly):
        return PolyField(u)
    if isinstance(u, tuple) and len(u) == 2 and callable(u[0]):
        if dim is None:
            raise ValueError("dim required to wrap a callable pair")
        return CallableField(u[0], dim, grad=u[1])
    if callable(u):
        if dim is None:
            raise ValueError("dim required to wrap a callable")
        return CallableField(u, dim)
    raise TypeError(f"cannot interpret {type(u)!r} as a field")


def quad_support(shape: DomainShape | None, n: int):
    """Translate a support shape into a quadrature restriction spec."""
    if shape is None or shape.kind == "fullspace":
        return None
    if n == 2:
        if shape.kind == "halfspace":
            e = shape.params["e"]
            phi = math.atan2(e[1], e[0])
            return [(phi - math.pi / 2, phi + math.pi / 2)]
        if shape.kind in ("sector", "quadrant"):
            return [(0.0, shape.params["theta0"])]
        return None
    if n == 3:
        if shape.kind == "halfspace":
            e = shape.params["e"]
            if abs(e[0]) < 1e-15 and abs(e[1]) < 1e-15 and e[2] > 0:
                return "upper"
        return None
    return None


# ---------------------------------------------------------------------------
# Field files: CSV of x1,...,xn,value plus a JSON header (n, h, extent, m)
# ---------------------------------------------------------------------------


def _header_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".json"


def save_field(field: SampledField, csv_path: str) -> None:
    header = {
        "n": field.dim,
        "h": field.h,
        "extent": field.extent,
        "m": field.m,
    }
    with open(_header_path(csv_path), "w") as fh:
        json.dump(header, fh, indent=1, sort_keys=True)
        fh.write("\n")
    coords = [field.nodes] * field.dim
    with open(csv_path, "w") as fh:
        fh.write(",".join(f"x{i + 1}" for i in range(field.dim)) + ",value\n")
        for idx in np.ndindex(*field.values.shape):
            row = [f"{coords[d][i]:.17g}" for d, i in enumerate(idx)]
            row.append(f"{field.values[idx]:.17g}")
            fh.write(",".join(row) + "\n")


def load_field(csv_path: str) -> SampledField:
    with open(_header_path(csv_path)) as fh:
        header = json.load(fh)
    dim = int(header["n"])
    extent = float(header["extent"])
    h = float(header["h"])
    n_nodes = round(2 * extent / h) + 1
    nodes = np.linspace(-extent, extent, n_nodes)
    values = np.full((n_nodes,) * dim, np.nan)
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    if data.shape[1] != dim + 1:
        raise ValueError("CSV column count does not match header dimension")
    idx = np.rint((data[:, :dim] + extent) / h).astype(int)
    if np.any(idx < 0) or np.any(idx >= n_nodes):
        raise ValueError("CSV contains points off the declared grid")
    values[tuple(idx.T)] = data[:, dim]
    if np.any(np.isnan(values)):
        raise ValueError("CSV does not cover the full grid")
    m = header.get("m")
    return SampledField(dim, extent, values, m=None if m is None else int(m))
