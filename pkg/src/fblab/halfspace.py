"""Explicit half-space solutions and global normal forms.

``solve_halfspace_poly`` builds, for a polynomial right-hand side f of
degree m, the unique polynomial v of degree m+2 with

    Lap v = f in {x_n > 0},   v = dv/dx_n = 0 on {x_n = 0},

via the explicit sum

    v(x', x_n) = sum_{k=2}^{m+2} x_n^k/k! *
                 sum_j  d_n^{k-2-2j} (-Lap_{x'})^j f(x', 0).

``halfspace_blowup_2d`` produces the same objects in two dimensions from
the circular-harmonic data (m, a, b) with rhs H = a r^m e^{im t} + b r^m
e^{-im t}, normalised so that Lap v = H holds exactly.  (The raw
combination |z|^2 z^m - ((m+1)/(m+2)) z^{m+2} - (1/(m+2)) zbar^{m+2} with
z = x1 + i x2 has Laplacian 4(m+1) z^m, so the whole block is divided by
4(m+1).)  All arithmetic is exact for rational inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .fields import Field, PolyField, RestrictedField
from .polyfield import MultiPoly, homogeneous_decomposition, is_harmonic, laplacian
from .shapes import DomainShape, fullspace, halfspace as halfspace_shape

__all__ = [
    "HalfspaceSolution",
    "BlowupNormalForm",
    "solve_halfspace_poly",
    "halfspace_blowup_2d",
    "antipodal_extension",
    "fullspace_form",
    "halfspace_normal_form",
    "halfspace_operator_matrix",
    "operator_matrix_rank",
]


@dataclass(frozen=True)
class HalfspaceSolution:
    """Polynomial v with Lap v = rhs on {x . normal > 0} and v, normal
    derivative vanishing on the wall; zero across the wall."""

    dim: int
    m: int
    rhs: MultiPoly
    solution: MultiPoly
    normal: tuple[float, ...]

    def field(self) -> Field:
        """The solution as a field supported on the half-space."""
        return RestrictedField(PolyField(self.solution), halfspace_shape(self.normal))

    def rhs_field(self) -> Field:
        return RestrictedField(PolyField(self.rhs), halfspace_shape(self.normal))


@dataclass(frozen=True)
class BlowupNormalForm:
    """Normal form of a homogeneous blowup: empty, half-space or full space."""

    kind: str  # "empty" | "halfspace" | "fullspace"
    payload: MultiPoly | None
    support: DomainShape | None


def _check_wall_conditions(v: MultiPoly) -> None:
    n = v.dim
    for alpha in v.terms:
        if alpha[n - 1] < 2:
            raise AssertionError("solution does not vanish to second order on the wall")


def solve_halfspace_poly(f: MultiPoly, n: int | None = None) -> HalfspaceSolution:
    """Solve Lap v = f in the upper half-space with v = d_n v = 0 on the wall.

    The normal is fixed to e_n; rotate inputs beforehand if needed.  The
    returned solution is verified exactly (Lap v == f as polynomials)
    before being handed back.
    """
    if n is None:
        n = f.dim
    if n != f.dim:
        raise ValueError("n does not match the polynomial dimension")
    m = max(f.degree(), 0)

    def minus_lap_tangential(p: MultiPoly) -> MultiPoly:
        out = MultiPoly.zero(n)
        for i in range(n - 1):
            out = out - p.derivative(i, 2)
        return out

    v = MultiPoly.zero(n)
    xn = MultiPoly.variable(n, n - 1)
    for k in range(2, m + 3):
        inner = MultiPoly.zero(n)
        for j in range(0, (k - 2) // 2 + 1):
            term = minus_lap_tangential(f) if j else f
            for _ in range(j - 1):
                term = minus_lap_tangential(term)
            term = term.derivative(n - 1, k - 2 - 2 * j)
            inner = inner + term.substitute_zero(n - 1)
        v = v + xn**k * inner * Fraction(1, math.factorial(k))

    if laplacian(v) != f:
        raise AssertionError("half-space solve failed the exact Laplacian check")
    if not v.is_zero():
        _check_wall_conditions(v)
    e = tuple(0.0 if i < n - 1 else 1.0 for i in range(n))
    return HalfspaceSolution(dim=n, m=m, rhs=f, solution=v, normal=e)


def _re_im_zpow(k: int) -> tuple[MultiPoly, MultiPoly]:
    """Exact real/imaginary parts of (x1 + i x2)^k."""
    re_terms: dict[tuple[int, int], Fraction] = {}
    im_terms: dict[tuple[int, int], Fraction] = {}
    for j in range(k + 1):
        c = Fraction(math.comb(k, j))
        if j % 2 == 0:
            re_terms[(k - j, j)] = c * (-1) ** (j // 2)
        else:
            im_terms[(k - j, j)] = c * (-1) ** ((j - 1) // 2)
    return MultiPoly(2, re_terms), MultiPoly(2, im_terms)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))  # exact binary expansion of the float


def _split_complex(z) -> tuple[Fraction, Fraction]:
    if isinstance(z, complex):
        return _to_fraction(z.real), _to_fraction(z.imag)
    return _to_fraction(z), Fraction(0)


def halfspace_blowup_2d(m: int, a, b=None) -> HalfspaceSolution:
    """Half-space solution in 2D for rhs H = a r^m e^{imt} + b r^m e^{-imt}.

    Normalised so that Lap v = H exactly.  For m = 0, ``a`` is the real
    constant H == a and ``b`` is ignored.  The output has real (exact
    rational) coefficients whenever b = conj(a); otherwise the solution
    carries complex coefficients.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        ar, ai = _split_complex(a)
        if ai != 0:
            raise ValueError("for m = 0 the constant a must be real")
        v = MultiPoly(2, {(0, 2): ar / 2})
        H = MultiPoly.constant(2, ar)
        return HalfspaceSolution(dim=2, m=0, rhs=H, solution=v,
                                 normal=(0.0, 1.0))
    if b is None:
        raise ValueError("b is required for m >= 1")
    ar, ai = _split_complex(a)
    br, bi = _split_complex(b)

    Pm, Qm = _re_im_zpow(m)
    Pm2, Qm2 = _re_im_zpow(m + 2)
    r2 = MultiPoly(2, {(2, 0): 1, (0, 2): 1})
    # A := |z|^2 z^m - ((m+1)/(m+2)) z^{m+2} - (1/(m+2)) zbar^{m+2}
    reA = r2 * Pm - Pm2
    imA = r2 * Qm - Qm2 * Fraction(m, m + 2)
    scale = Fraction(1, 4 * (m + 1))
    v_re = (reA * (ar + br) + imA * (bi - ai)) * scale
    v_im = (reA * (ai + bi) + imA * (ar - br)) * scale
    H_re = Pm * (ar + br) + Qm * (bi - ai)
    H_im = Pm * (ai + bi) + Qm * (ar - br)

    if v_im.is_zero() and H_im.is_zero():
        v, H = v_re, H_re
    else:
        def _complexify(pre, pim):
            terms: dict[tuple[int, int], complex] = {}
            for alpha, c in pre.items():
                terms[alpha] = complex(float(c), 0.0)
            for alpha, c in pim.items():
                terms[alpha] = terms.get(alpha, 0j) + complex(0.0, float(c))
            return MultiPoly(2, terms)

        v, H = _complexify(v_re, v_im), _complexify(H_re, H_im)

    if laplacian(v) != H:
        raise AssertionError("2D half-space construction failed the Laplacian check")
    if not v.is_zero():
        _check_wall_conditions(v)
    return HalfspaceSolution(dim=2, m=m, rhs=H, solution=v, normal=(0.0, 1.0))


def antipodal_extension(v: HalfspaceSolution) -> MultiPoly:
    """Global polynomial extension of a half-space solution.

    For a homogeneous rhs of degree m the solution polynomial is
    (m+2)-homogeneous, so its values on the reflected half-space already
    realise the antipodally even/odd (m even/odd) extension of the
    angular profile: the extension *is* the polynomial, with
    Lap v = rhs on all of R^n and v(-x) = (-1)^m v(x).
    """
    if not v.rhs.is_homogeneous():
        raise ValueError("antipodal extension requires a homogeneous rhs")
    p = v.solution
    if not p.is_homogeneous(v.m + 2) and not p.is_zero():
        raise AssertionError("solution is not homogeneous of degree m+2")
    if laplacian(p) != v.rhs:
        raise AssertionError("extension does not solve the equation globally")
    return p


def fullspace_form(H: MultiPoly, w: MultiPoly) -> BlowupNormalForm:
    """Global 2D solution (1/(4m+4)) |x|^2 H + w with Lap = H everywhere."""
    if H.dim != 2 or w.dim != 2:
        raise ValueError("fullspace form is two-dimensional")
    if not is_harmonic(H):
        raise ValueError("H must be harmonic")
    if not H.is_homogeneous():
        raise ValueError("H must be homogeneous")
    m = max(H.degree(), 0)
    if not is_harmonic(w):
        raise ValueError("w must be harmonic")
    if not w.is_zero() and not w.is_homogeneous(m + 2):
        raise ValueError(f"w must be homogeneous of degree {m + 2}")
    r2 = MultiPoly(2, {(2, 0): 1, (0, 2): 1})
    payload = r2 * H * Fraction(1, 4 * m + 4) + w
    if laplacian(payload) != H:
        raise AssertionError("fullspace form failed the Laplacian check")
    return BlowupNormalForm(kind="fullspace", payload=payload, support=fullspace(2))


def halfspace_normal_form(sol: HalfspaceSolution) -> BlowupNormalForm:
    return BlowupNormalForm(
        kind="halfspace",
        payload=sol.solution,
        support=halfspace_shape(sol.normal),
    )


def halfspace_operator_matrix(n: int, m: int) -> list[list[Fraction]]:
    """Matrix of Lap : x_n^2 P_m -> P_m in the monomial bases (P_m = all
    polynomials of degree <= m).  Bijectivity of this map is what makes the
    half-space solve well posed."""
    from .polyfield import monomial_basis

    basis_src = [a for d in range(m + 1) for a in monomial_basis(n, d)]
    col_polys = []
    for alpha in basis_src:
        beta = list(alpha)
        beta[n - 1] += 2
        col_polys.append(laplacian(MultiPoly.monomial(tuple(beta))))
    row_index = {a: i for i, a in enumerate(basis_src)}
    mat = [[Fraction(0)] * len(basis_src) for _ in basis_src]
    for j, p in enumerate(col_polys):
        for alpha, c in p.items():
            mat[row_index[alpha]][j] = Fraction(c)
    return mat


def operator_matrix_rank(mat: list[list[Fraction]]) -> int:
    """Exact rank by fraction Gaussian elimination."""
    rows = [list(r) for r in mat]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][c]
        rows[rank] = [v / pv for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank
