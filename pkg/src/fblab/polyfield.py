"""Exact sparse multivariate polynomial arithmetic.

A polynomial is stored as a mapping from exponent multi-indices (one
non-negative integer per variable) to coefficients.  Coefficients are kept
as :class:`fractions.Fraction` whenever the inputs are exact (``int`` or
``Fraction``), so differential identities can be verified by exact equality
instead of with tolerances.  Float and complex coefficients are supported
as a fallback for fitted quantities.

Beyond ring arithmetic the module provides the differential and integral
operators the rest of the package is built on: Laplacian, harmonicity
tests, exact monomial integrals over unit spheres / hemispheres / balls,
homogeneous decompositions, leading-part extraction from sampled data, and
an exact basis of harmonic homogeneous polynomials in any dimension.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

__all__ = [
    "MultiPoly",
    "HomogeneousDecomp",
    "LeadingPartError",
    "laplacian",
    "is_harmonic",
    "gradient",
    "derivative",
    "compose_linear",
    "homogeneous_decomposition",
    "sphere_integral_monomial",
    "sphere_integral_monomial_exact",
    "hemisphere_integral_monomial",
    "hemisphere_integral_monomial_exact",
    "ball_integral_monomial",
    "sphere_l2",
    "sphere_l2_exact",
    "sphere_integral",
    "ball_integral",
    "halfball_integral",
    "halfball_integral_exact",
    "leading_part",
    "monomial_basis",
    "harmonic_basis",
    "parse_poly",
]


def _normalize_coeff(c):
    """Ints become Fractions; Fractions, floats and complex pass through."""
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, float, complex)):
        return c
    if isinstance(c, np.integer):
        return Fraction(int(c))
    if isinstance(c, np.floating):
        return float(c)
    if isinstance(c, np.complexfloating):
        return complex(c)
    raise TypeError(f"unsupported coefficient type {type(c)!r}")


def _grlex_key(alpha: Exponent):
    return (sum(alpha), alpha)


class MultiPoly:
    """Immutable sparse polynomial in ``dim`` variables x1..x{dim}.

    Zero coefficients are never stored, and the term order used for
    printing/serialization is graded lexicographic, so equal polynomials
    always produce identical text.
    """

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, object] | None = None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        clean: dict[Exponent, object] = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise ValueError(f"bad multi-index {alpha} for dim={dim}")
            c = _normalize_coeff(c)
            if c == 0:
                continue
            if alpha in clean:
                c = clean[alpha] + c
                if c == 0:
                    del clean[alpha]
                    continue
            clean[alpha] = c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "MultiPoly":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, c) -> "MultiPoly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, i: int) -> "MultiPoly":
        """The polynomial x_{i+1} (0-based index i)."""
        if not 0 <= i < dim:
            raise ValueError(f"variable index {i} out of range for dim={dim}")
        alpha = [0] * dim
        alpha[i] = 1
        return cls(dim, {tuple(alpha): 1})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c=1) -> "MultiPoly":
        alpha = tuple(int(a) for a in alpha)
        return cls(len(alpha), {alpha: c})

    # -- basic queries -----------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(a) for a in self._terms)

    def is_homogeneous(self, k: int | None = None) -> bool:
        if not self._terms:
            return True
        degs = {sum(a) for a in self._terms}
        if len(degs) != 1:
            return False
        return True if k is None else degs.pop() == k

    def coefficient(self, alpha: Sequence[int]):
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            return other
        return MultiPoly.constant(self.dim, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out.get(a, Fraction(0)) + c
        return MultiPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.dim, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = _normalize_coeff(other)
            return MultiPoly(self.dim, {a: v * c for a, v in self._terms.items()})
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out: dict[Exponent, object] = {}
        for a1, c1 in self._terms.items():
            for a2, c2 in other._terms.items():
                a = tuple(i + j for i, j in zip(a1, a2))
                out[a] = out.get(a, Fraction(0)) + c1 * c2
        return MultiPoly(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "MultiPoly":
        if isinstance(scalar, MultiPoly):
            raise TypeError("polynomial division is not supported")
        c = _normalize_coeff(scalar)
        if isinstance(c, Fraction):
            return self * Fraction(1, 1) / 1 if c == 1 else self * (Fraction(1) / c)
        return self * (1.0 / c)

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.dim == other.dim and self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    # -- calculus ----------------------------------------------------------

    def derivative(self, i: int, order: int = 1) -> "MultiPoly":
        p = self
        for _ in range(order):
            out: dict[Exponent, object] = {}
            for a, c in p._terms.items():
                if a[i] == 0:
                    continue
                b = list(a)
                b[i] -= 1
                out[tuple(b)] = c * a[i]
            p = MultiPoly(self.dim, out)
        return p

    def substitute_zero(self, i: int) -> "MultiPoly":
        """Set variable i to 0 (keeps the ambient dimension)."""
        out = {a: c for a, c in self._terms.items() if a[i] == 0}
        return MultiPoly(self.dim, out)

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return MultiPoly(self.dim, {a: c for a, c in self._terms.items() if sum(a) == k})

    # -- evaluation --------------------------------------------------------

    def __call__(self, pts):
        return self.evaluate(pts)

    def evaluate(self, pts):
        """Evaluate at an (n,) point or an (..., n) array of points."""
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[-1] != self.dim:
            raise ValueError("point dimension mismatch")
        any_complex = any(isinstance(c, complex) for c in self._terms.values())
        out = np.zeros(pts.shape[:-1], dtype=complex if any_complex else float)
        for a, c in self._terms.items():
            mono = np.ones(pts.shape[:-1])
            for i, ai in enumerate(a):
                if ai:
                    mono = mono * pts[..., i] ** ai
            out = out + (complex(c) if any_complex else float(c)) * mono
        return out[0] if single else out

    def evaluate_exact(self, point: Sequence) -> Fraction:
        """Exact evaluation at a point with Fraction/int coordinates."""
        total = Fraction(0)
        for a, c in self._terms.items():
            v = c
            for i, ai in enumerate(a):
                v = v * Fraction(point[i]) ** ai
            total += v
        return total

    # -- printing / parsing ------------------------------------------------

    @staticmethod
    def _coeff_str(c) -> str:
        if isinstance(c, Fraction):
            return str(c)
        if isinstance(c, complex):
            return f"({c.real:.17g}{c.imag:+.17g}j)"
        return f"{c:.17g}"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for a in sorted(self._terms, key=_grlex_key):
            c = self._terms[a]
            factors = " ".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                for i, e in enumerate(a)
                if e
            )
            cs = self._coeff_str(c)
            parts.append(f"{cs} * {factors}" if factors else cs)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({self.dim}, '{self}')"


@dataclass(frozen=True)
class HomogeneousDecomp:
    """Split of a polynomial into its homogeneous parts."""

    dim: int
    parts: tuple[tuple[int, MultiPoly], ...]

    def reassemble(self) -> MultiPoly:
        total = MultiPoly.zero(self.dim)
        for _, p in self.parts:
            total = total + p
        return total


def homogeneous_decomposition(p: MultiPoly) -> HomogeneousDecomp:
    by_deg: dict[int, dict[Exponent, object]] = {}
    for a, c in p.items():
        by_deg.setdefault(sum(a), {})[a] = c
    parts = tuple(
        (k, MultiPoly(p.dim, terms)) for k, terms in sorted(by_deg.items())
    )
    return HomogeneousDecomp(p.dim, parts)


def derivative(p: MultiPoly, i: int, order: int = 1) -> MultiPoly:
    return p.derivative(i, order)


def gradient(p: MultiPoly) -> tuple[MultiPoly, ...]:
    return tuple(p.derivative(i) for i in range(p.dim))


def laplacian(p: MultiPoly) -> MultiPoly:
    """Sum of second partials; exact when the coefficients are exact."""
    out = MultiPoly.zero(p.dim)
    for i in range(p.dim):
        out = out + p.derivative(i, 2)
    return out


def is_harmonic(p: MultiPoly) -> bool:
    return laplacian(p).is_zero()


def compose_linear(p: MultiPoly, matrix) -> MultiPoly:
    """Return p(A x) for a square matrix A (rows index new linear forms)."""
    n = p.dim
    rows = [list(r) for r in matrix]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("matrix must be square of size dim")
    forms = [
        MultiPoly(n, {tuple(int(j == k) for k in range(n)): rows[i][j] for j in range(n)})
        for i in range(n)
    ]
    # memoized powers of each linear form
    powers: list[list[MultiPoly]] = [[MultiPoly.constant(n, 1)] for _ in range(n)]
    out = MultiPoly.zero(n)
    for a, c in p.items():
        term = MultiPoly.constant(n, c)
        for i, ai in enumerate(a):
            while len(powers[i]) <= ai:
                powers[i].append(powers[i][-1] * forms[i])
            term = term * powers[i][ai]
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Exact integrals of monomials over spheres, hemispheres and balls.
# ---------------------------------------------------------------------------


def _gamma_half(j: int) -> tuple[Fraction, int]:
    """Gamma(j/2) as (rational, s) meaning rational * sqrt(pi)**s."""
    if j <= 0:
        raise ValueError("argument must be positive")
    if j % 2 == 0:
        return Fraction(math.factorial(j // 2 - 1)), 0
    t = (j - 1) // 2
    return Fraction(math.factorial(2 * t), 4**t * math.factorial(t)), 1


def sphere_integral_monomial_exact(alpha: Sequence[int]) -> tuple[Fraction, int]:
    """Integral of x^alpha over the unit sphere S^{n-1}, as (c, p) = c*pi**p.

    Vanishes if any exponent is odd; otherwise equals
    2*Gamma(b_1)...Gamma(b_n)/Gamma(b_1+...+b_n) with b_i=(alpha_i+1)/2.
    """
    alpha = tuple(int(a) for a in alpha)
    n = len(alpha)
    if n < 2:
        raise ValueError("sphere integrals need dimension n >= 2")
    if any(a % 2 for a in alpha):
        return Fraction(0), 0
    num = Fraction(2)
    s = 0
    for a in alpha:
        c, si = _gamma_half(a + 1)
        num *= c
        s += si
    cden, sden = _gamma_half(sum(alpha) + n)
    num /= cden
    s -= sden
    if s % 2:  # cannot happen: all alpha even makes the power of pi integral
        raise AssertionError("non-integral power of pi")
    return num, s // 2


def sphere_integral_monomial(alpha: Sequence[int], n: int | None = None) -> float:
    if n is not None and n != len(alpha):
        raise ValueError("n does not match the multi-index length")
    c, p = sphere_integral_monomial_exact(alpha)
    return float(c) * math.pi**p


def hemisphere_integral_monomial_exact(alpha: Sequence[int]) -> tuple[Fraction, int]:
    """Integral of x^alpha over the hemisphere {x in S^{n-1} : x_n > 0}.

    The last exponent may be odd; any odd exponent among the first n-1
    makes the integral vanish.  Result as (c, p) = c*pi**p.
    """
    alpha = tuple(int(a) for a in alpha)
    n = len(alpha)
    if n < 2:
        raise ValueError("sphere integrals need dimension n >= 2")
    if any(a % 2 for a in alpha[:-1]):
        return Fraction(0), 0
    num = Fraction(1)
    s = 0
    for a in alpha:
        c, si = _gamma_half(a + 1)
        num *= c
        s += si
    cden, sden = _gamma_half(sum(alpha) + n)
    num /= cden
    s -= sden
    if s % 2:
        raise AssertionError("non-integral power of pi")
    return num, s // 2


def hemisphere_integral_monomial(alpha: Sequence[int]) -> float:
    c, p = hemisphere_integral_monomial_exact(alpha)
    return float(c) * math.pi**p


def ball_integral_monomial(alpha: Sequence[int], radius: float = 1.0) -> float:
    """Integral of x^alpha over the ball of given radius centred at 0."""
    k = sum(alpha) + len(alpha)
    return sphere_integral_monomial(alpha) * radius**k / k


def sphere_integral(p: MultiPoly) -> float:
    return sum(
        float(c) * sphere_integral_monomial(a) if not isinstance(c, complex)
        else complex(c) * sphere_integral_monomial(a)
        for a, c in p.items()
    )


def sphere_l2_exact(p: MultiPoly) -> tuple[Fraction, int]:
    """Exact integral of p^2 over the unit sphere, as (c, p) = c*pi**p."""
    if not p.is_exact():
        raise ValueError("exact sphere L2 requires rational coefficients")
    sq = p * p
    total = Fraction(0)
    power = None
    for a, c in sq.items():
        val, pw = sphere_integral_monomial_exact(a)
        if val == 0:
            continue
        if power is None:
            power = pw
        elif power != pw:  # all even |alpha| share one power of pi
            raise AssertionError("inconsistent pi powers")
        total += c * val
    return total, (power if power is not None else 0)


def sphere_l2(p: MultiPoly) -> float:
    """Integral of p^2 over the unit sphere S^{n-1}."""
    if p.is_exact():
        c, pw = sphere_l2_exact(p)
        return float(c) * math.pi**pw
    sq = p * p
    return float(sum(float(c) * sphere_integral_monomial(a) for a, c in sq.items()))


def ball_integral(p: MultiPoly, radius: float = 1.0) -> float:
    return float(sum(float(c) * ball_integral_monomial(a, radius) for a, c in p.items()))


def halfball_integral(p: MultiPoly, radius: float = 1.0) -> float:
    """Integral of p over {|x| < radius, x_n > 0}."""
    total = 0.0
    n = p.dim
    for a, c in p.items():
        k = sum(a) + n
        total += float(c) * hemisphere_integral_monomial(a) * radius**k / k
    return total


def halfball_integral_exact(p: MultiPoly) -> dict[int, Fraction]:
    """Exact integral over the unit upper half-ball, as {pi_power: coeff}."""
    if not p.is_exact():
        raise ValueError("exact half-ball integral requires rational coefficients")
    out: dict[int, Fraction] = {}
    n = p.dim
    for a, c in p.items():
        val, pw = hemisphere_integral_monomial_exact(a)
        if val == 0:
            continue
        contrib = c * val / (sum(a) + n)
        out[pw] = out.get(pw, Fraction(0)) + contrib
    return {pw: v for pw, v in out.items() if v != 0}


# ---------------------------------------------------------------------------
# Leading homogeneous part
# ---------------------------------------------------------------------------


class LeadingPartError(ValueError):
    """Raised when no clean degree-m leading part exists at the origin."""


def monomial_basis(n: int, d: int) -> list[Exponent]:
    """All exponent multi-indices of total degree exactly d, graded-lex order."""
    if d == 0:
        return [(0,) * n]
    out = []
    for combo in combinations_with_replacement(range(n), d):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 1
        out.append(tuple(alpha))
    return sorted(set(out))


def _sphere_directions(n: int, count: int, seed: int = 20240) -> np.ndarray:
    if n == 2:
        theta = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def leading_part(
    f,
    m: int,
    *,
    tol: float = 1e-6,
    radii: Sequence[float] | None = None,
    n_directions: int | None = None,
) -> MultiPoly:
    """Extract the degree-m homogeneous leading part of ``f`` at the origin.

    For a :class:`MultiPoly` the split is exact: the degree-m part must be
    nonzero and no terms of lower degree may be present.  For a sampled or
    callable field, coefficients of the degree-m monomials are fitted by
    least squares on spheres of dyadic radii (the smallest radius provides
    the returned coefficients) and a fit residual above ``tol`` raises
    :class:`LeadingPartError`.
    """
    if isinstance(f, MultiPoly):
        for a in f.terms:
            if sum(a) < m:
                raise LeadingPartError(
                    f"terms of degree < {m} present; remainder is not o(|x|^{m})"
                )
        part = f.homogeneous_part(m)
        if part.is_zero():
            raise LeadingPartError(f"degree-{m} part is zero")
        return part

    dim = getattr(f, "dim", None)
    if dim is None:
        raise TypeError("sampled input must expose a .dim attribute")
    if radii is None:
        radii = [2.0**-j for j in range(4, 13)]
    radii = sorted(radii, reverse=True)
    monos = monomial_basis(dim, m)
    if n_directions is None:
        n_directions = max(64, 6 * len(monos))
    dirs = _sphere_directions(dim, n_directions)
    design = np.stack(
        [np.prod(dirs ** np.asarray(a), axis=1) for a in monos], axis=1
    )

    coeffs_per_r = []
    resid_per_r = []
    for r in radii:
        vals = np.asarray(f(r * dirs), dtype=float) / r**m
        sol, *_ = np.linalg.lstsq(design, vals, rcond=None)
        coeffs_per_r.append(sol)
        resid_per_r.append(float(np.max(np.abs(design @ sol - vals))))

    coeffs = coeffs_per_r[-1]
    drift = float(np.max(np.abs(coeffs_per_r[-1] - coeffs_per_r[-2])))
    residual = max(resid_per_r[-1], drift)
    if residual > tol:
        raise LeadingPartError(
            f"no clean degree-{m} leading part: fit residual {residual:.3e} > {tol:.3e}"
        )
    terms = {a: float(c) for a, c in zip(monos, coeffs) if abs(c) > tol}
    if not terms:
        raise LeadingPartError(f"degree-{m} part is zero within tolerance")
    return MultiPoly(dim, terms)


# ---------------------------------------------------------------------------
# Harmonic homogeneous basis (exact)
# ---------------------------------------------------------------------------


def _nullspace_exact(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Nullspace basis of a rational matrix via fraction-exact elimination."""
    mat = [list(r) for r in rows]
    nrows = len(mat)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * ncols
        vec[fcol] = Fraction(1)
        for prow, pcol in enumerate(pivots):
            vec[pcol] = -mat[prow][fcol]
        basis.append(vec)
    return basis


def harmonic_basis(n: int, m: int) -> list[MultiPoly]:
    """Exact basis of harmonic homogeneous polynomials of degree m in n vars."""
    if m == 0:
        return [MultiPoly.constant(n, 1)]
    cols = monomial_basis(n, m)
    col_index = {a: j for j, a in enumerate(cols)}
    target = monomial_basis(n, m - 2) if m >= 2 else []
    if not target:
        return [MultiPoly.monomial(a) for a in cols]
    row_index = {b: i for i, b in enumerate(target)}
    rows = [[Fraction(0)] * len(cols) for _ in target]
    for a, j in col_index.items():
        lap = laplacian(MultiPoly.monomial(a))
        for b, c in lap.items():
            rows[row_index[b]][j] += Fraction(c)
    basis_vecs = _nullspace_exact(rows, len(cols))
    out = []
    for vec in basis_vecs:
        terms = {cols[j]: vec[j] for j in range(len(cols)) if vec[j] != 0}
        out.append(MultiPoly(n, terms))
    return out


# ---------------------------------------------------------------------------
# Text format: "c * x1^a1 x2^a2 ..." with rational c as p/q
# ---------------------------------------------------------------------------

_VAR_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def _parse_coeff(tok: str):
    tok = tok.strip()
    if "/" in tok:
        return Fraction(tok)
    try:
        return Fraction(int(tok))
    except ValueError:
        return float(tok)


def parse_poly(text: str, dim: int | None = None) -> MultiPoly:
    """Parse the textual polynomial format produced by ``str(MultiPoly)``.

    Also accepts human-friendly input: omitted coefficients ("x1^2"),
    omitted '*', and binary minus ("x1^2 - 2 x2").
    """
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial string")
    # binary minus -> plus negative coefficient (not inside exponents like 1e-3)
    s = re.sub(r"(?<=[0-9a-zA-Z)\s])-", "+-", s[0] + s[1:])
    s = s.replace("e+-", "e-").replace("E+-", "E-")
    s = re.sub(r"\+\s*-\s*", "+-", s)
    if s.startswith("-"):
        s = "-" + s[1:].lstrip()
    raw_terms = [t.strip() for t in s.split("+")]
    parsed: list[tuple[object, dict[int, int]]] = []
    max_var = 0
    for raw in raw_terms:
        if not raw:
            continue
        toks = [t for t in raw.replace("*", " ").split() if t]
        coeff = Fraction(1)
        powers: dict[int, int] = {}
        seen_coeff = False
        for tok in toks:
            if tok.startswith("-") and _VAR_RE.match(tok[1:]):
                coeff = -coeff
                tok = tok[1:]
            mvar = _VAR_RE.match(tok)
            if mvar:
                idx = int(mvar.group(1))
                if idx < 1:
                    raise ValueError(f"bad variable {tok!r}")
                powers[idx] = powers.get(idx, 0) + int(mvar.group(2) or 1)
                max_var = max(max_var, idx)
            else:
                if seen_coeff:
                    coeff = coeff * _parse_coeff(tok)
                else:
                    coeff = _parse_coeff(tok)
                    seen_coeff = True
        if tok == "-" or (not seen_coeff and not powers):
            raise ValueError(f"cannot parse term {raw!r}")
        parsed.append((coeff, powers))
    n = dim if dim is not None else max(max_var, 1)
    if max_var > n:
        raise ValueError(f"variable x{max_var} exceeds dim={n}")
    total = MultiPoly.zero(n)
    for coeff, powers in parsed:
        alpha = [0] * n
        for idx, p in powers.items():
            alpha[idx - 1] = p
        total = total + MultiPoly(n, {tuple(alpha): coeff})
    return total
