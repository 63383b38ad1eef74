"""Numerical subspace and *-algebra toolkit for dense complex matrices.

All operations use the Hilbert-Schmidt inner product <x, y> = trace(x* y),
under which a matrix is just its flattened complex vector.  Rank decisions
go through SVD with the relative cutoff ``eps_rank``; identity-type checks
use the absolute Frobenius threshold ``eps_eq``.  Both live in `Tolerance`.

The row-level helpers (`orthonormal_rows`, `relation_transport`, ...) work
on arrays whose rows are coordinates in *any* orthonormal frame, so the
tensor-leg machinery elsewhere can reuse them without densifying.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "cmatrix",
    "hs_inner",
    "hs_norm",
    "Subspace",
    "AlgebraBasis",
    "span_basis",
    "subspace_equal",
    "multiplicative_closure",
    "internal_unit",
    "center",
    "LinearMap",
    "find_generator_isomorphism",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds: eps_rank for rank cuts, eps_eq for residuals."""

    eps_rank: float = 1e-9
    eps_eq: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("eps_rank", "eps_eq"):
            v = getattr(self, name)
            if not (0.0 < v < 1e-3):
                raise ValueError(f"{name} must lie in (0, 1e-3), got {v}")


DEFAULT_TOL = Tolerance()


def cmatrix(a, dim: int | None = None) -> np.ndarray:
    """Validate and cast input to a square complex128 matrix."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ValueError(f"expected ambient dimension {dim}, got {m.shape[0]}")
    return m


def hs_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product trace(x* y)."""
    return complex(np.vdot(x, y))


def hs_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


# ---------------------------------------------------------------------------
# row-coordinate core


def orthonormal_rows(rows: np.ndarray, eps_rank: float) -> np.ndarray:
    """Orthonormal basis (as rows) of the row space, cut at eps_rank."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    if rows.size == 0:
        return np.zeros((0, rows.shape[-1]), dtype=np.complex128)
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, rows.shape[-1]), dtype=np.complex128)
    r = int(np.sum(s > eps_rank * s[0]))
    return vh[:r]


def residual_outside(rows: np.ndarray, onb: np.ndarray) -> np.ndarray:
    """Frobenius distance of each row from the span of the orthonormal rows."""
    rows = np.atleast_2d(rows)
    if onb.shape[0] == 0:
        return np.linalg.norm(rows, axis=1)
    rem = rows - (rows @ onb.conj().T) @ onb
    return np.linalg.norm(rem, axis=1)


def left_null_rows(rows: np.ndarray, eps_rank: float) -> np.ndarray:
    """Rows c with c @ rows == 0 (coefficient relations among the rows)."""
    rows = np.atleast_2d(rows)
    m = rows.shape[0]
    if m == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(rows, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.sum(s > eps_rank * s[0]))
    return u.conj().T[r:]


def relation_transport(
    coords1: np.ndarray, coords2: np.ndarray, tol: Tolerance
) -> float | None:
    """Check that index-aligned families satisfy the same linear relations.

    Returns the worst transported-relation residual if every null combination
    of either family annihilates the other, else None.  This is the exact
    condition for "send family 1 to family 2" to extend to a well defined
    linear bijection of the spans.
    """
    worst = 0.0
    for a, b in ((coords1, coords2), (coords2, coords1)):
        null = left_null_rows(a, tol.eps_rank)
        if null.shape[0] == 0:
            continue
        scale = max(1.0, float(np.max(np.linalg.norm(b, axis=1), initial=0.0)))
        res = float(np.max(np.linalg.norm(null @ b, axis=1), initial=0.0))
        if res > tol.eps_eq * scale:
            return None
        worst = max(worst, res)
    return worst


def expand_in_rows(
    rows: np.ndarray, family: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares coefficients expressing each row in the family's span.

    Returns (coeffs, residuals) with coeffs @ family ~= rows.
    """
    rows = np.atleast_2d(rows)
    gram = family @ family.conj().T
    rhs = rows @ family.conj().T
    coeffs = np.linalg.lstsq(gram.T, rhs.T, rcond=None)[0].T
    res = np.linalg.norm(rows - coeffs @ family, axis=1)
    return coeffs, res


# ---------------------------------------------------------------------------
# subspaces of a matrix algebra


@dataclass(frozen=True)
class Subspace:
    """HS-orthonormally based linear subspace of the n x n matrices."""

    ambient_dim: int
    basis: np.ndarray  # shape (dim, n, n), orthonormal rows when flattened

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coords(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def contains(self, mat: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.contains_residual(mat) <= tol.eps_eq * max(1.0, hs_norm(mat))

    def contains_residual(self, mat: np.ndarray) -> float:
        mat = cmatrix(mat, self.ambient_dim)
        return float(residual_outside(mat.reshape(1, -1), self.coords())[0])

    def project(self, mat: np.ndarray) -> np.ndarray:
        mat = cmatrix(mat, self.ambient_dim)
        c = self.coords()
        return ((mat.reshape(1, -1) @ c.conj().T) @ c).reshape(mat.shape)


@dataclass(frozen=True)
class AlgebraBasis:
    """Subspace certified closed under products and adjoints.

    closure_residual is the worst Frobenius distance of a basis product or
    adjoint from the span; contains_identity refers to the ambient identity.
    """

    space: Subspace
    contains_identity: bool
    closure_residual: float

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis


def span_basis(mats, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Orthonormalized span of a list of same-shaped square matrices."""
    mats = [cmatrix(m) for m in mats]
    if not mats:
        raise ValueError("cannot infer ambient dimension from an empty list")
    n = mats[0].shape[0]
    rows = np.stack([m.reshape(-1) for m in (cmatrix(m, n) for m in mats)])
    onb = orthonormal_rows(rows, tol.eps_rank)
    return Subspace(ambient_dim=n, basis=onb.reshape(-1, n, n))


def subspace_equal(a: Subspace, b: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Mutual-projection test for equality of two subspaces."""
    if a.ambient_dim != b.ambient_dim or a.dim != b.dim:
        return False
    if a.dim == 0:
        return True
    ra = float(np.max(residual_outside(a.coords(), b.coords())))
    rb = float(np.max(residual_outside(b.coords(), a.coords())))
    return max(ra, rb) <= tol.eps_eq


def multiplicative_closure(generators, tol: Tolerance = DEFAULT_TOL) -> AlgebraBasis:
    """Smallest *-subalgebra span containing the generators.

    Alternates span extension with pairwise products (lexicographic order)
    and adjoints until the dimension stabilizes.  Deterministic for a fixed
    generator order.
    """
    gens = [cmatrix(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].shape[0]
    gens = [cmatrix(g, n) for g in gens]
    coords = orthonormal_rows(np.stack([g.reshape(-1) for g in gens]), tol.eps_rank)
    while True:
        basis = coords.reshape(-1, n, n)
        k = basis.shape[0]
        prods = np.einsum("iab,jbc->ijac", basis, basis).reshape(k * k, n * n)
        adjs = basis.conj().transpose(0, 2, 1).reshape(k, n * n)
        stacked = np.vstack([coords, prods, adjs])
        new = orthonormal_rows(stacked, tol.eps_rank)
        if new.shape[0] == k:
            worst = float(np.max(residual_outside(np.vstack([prods, adjs]), new)))
            ident = np.eye(n, dtype=np.complex128).reshape(1, -1)
            id_res = float(residual_outside(ident, new)[0])
            return AlgebraBasis(
                space=Subspace(ambient_dim=n, basis=new.reshape(-1, n, n)),
                contains_identity=id_res <= tol.eps_eq * np.sqrt(n),
                closure_residual=worst,
            )
        coords = new


def internal_unit(alg: AlgebraBasis, tol: Tolerance = DEFAULT_TOL) -> np.ndarray | None:
    """Unit element of the algebra (its support identity), or None.

    Solves e * b = b = b * e over e in the span; every finite-dimensional
    algebra closed under products and adjoints has one, so None signals
    that the input was not actually closed.
    """
    basis = alg.basis
    d, n = alg.dim, alg.ambient_dim
    if d == 0:
        return None
    if alg.contains_identity:
        return np.eye(n, dtype=np.complex128)
    # rows indexed by (j, entry), columns by the coefficient index i
    left = np.einsum("iab,jbc->jaci", basis, basis).reshape(d * n * n, d)
    right = np.einsum("jab,ibc->jaci", basis, basis).reshape(d * n * n, d)
    rhs = basis.reshape(d * n * n)
    coeff, *_ = np.linalg.lstsq(
        np.vstack([left, right]), np.concatenate([rhs, rhs]), rcond=None
    )
    e = np.einsum("i,iab->ab", coeff, basis)
    worst = max(
        float(np.linalg.norm(e @ m - m)) + float(np.linalg.norm(m @ e - m))
        for m in basis
    )
    if worst > tol.eps_eq * d:
        return None
    return e


def center(alg: AlgebraBasis, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Commutant-within: null space of the stacked commutator map on alg."""
    basis = alg.basis
    d, n = alg.dim, alg.ambient_dim
    if d == 0:
        return Subspace(ambient_dim=n, basis=np.zeros((0, n, n), dtype=np.complex128))
    # column i holds all commutators [basis_i, basis_k], stacked
    comms = np.einsum("iab,kbc->ikac", basis, basis) - np.einsum(
        "kab,ibc->ikac", basis, basis
    )
    mat = comms.reshape(d, d * n * n).T  # (d*n*n, d)
    # mat is tall, so the reduced vh already spans all d coefficient
    # directions; the full left factor would be d*n*n square
    _, s, vh = np.linalg.svd(mat, full_matrices=False)
    # basis rows are HS-orthonormal, so singular values are O(1); the floor
    # keeps a numerically-zero commutator stack from inflating the rank
    cutoff = tol.eps_rank * max(1.0, s[0] if s.size else 0.0)
    r = int(np.sum(s > cutoff))
    null_coeffs = vh.conj()[r:]  # rows: coefficient vectors in the basis
    if null_coeffs.shape[0] == 0:
        return Subspace(ambient_dim=n, basis=np.zeros((0, n, n), dtype=np.complex128))
    mats = np.einsum("ci,iab->cab", null_coeffs, basis)
    onb = orthonormal_rows(mats.reshape(-1, n * n), tol.eps_rank)
    return Subspace(ambient_dim=n, basis=onb.reshape(-1, n, n))


# ---------------------------------------------------------------------------
# generator-transport isomorphisms


@dataclass
class LinearMap:
    """Linear map between matrix subspaces, with certification residuals."""

    source_dim: int
    target_dim: int
    _pinv: np.ndarray = field(repr=False)
    _images: np.ndarray = field(repr=False)
    report: dict = field(default_factory=dict)

    def apply(self, mat: np.ndarray) -> np.ndarray:
        mat = cmatrix(mat, self.source_dim)
        row = mat.reshape(1, -1) @ self._pinv @ self._images
        return row.reshape(self.target_dim, self.target_dim)


def _enrich_families(alg1, fam1, alg2, fam2, tol):
    """Extend index-aligned generating families by forced words.

    Products and adjoints of the current span basis are appended on both
    sides in lockstep until family 1 linearly spans alg1.
    """
    n1, n2 = alg1.ambient_dim, alg2.ambient_dim
    x1 = np.stack([cmatrix(m, n1).reshape(-1) for m in fam1])
    x2 = np.stack([cmatrix(m, n2).reshape(-1) for m in fam2])
    target = alg1.dim
    while True:
        onb1 = orthonormal_rows(x1, tol.eps_rank)
        r = onb1.shape[0]
        if r >= target:
            return x1, x2
        coeff, _ = expand_in_rows(onb1, x1)
        forced2 = coeff @ x2
        b1 = onb1.reshape(r, n1, n1)
        b2 = forced2.reshape(r, n2, n2)
        prod1 = np.einsum("iab,jbc->ijac", b1, b1).reshape(r * r, -1)
        prod2 = np.einsum("iab,jbc->ijac", b2, b2).reshape(r * r, -1)
        adj1 = b1.conj().transpose(0, 2, 1).reshape(r, -1)
        adj2 = b2.conj().transpose(0, 2, 1).reshape(r, -1)
        x1 = np.vstack([x1, prod1, adj1])
        x2 = np.vstack([x2, prod2, adj2])
        if orthonormal_rows(x1, tol.eps_rank).shape[0] == r:
            raise ValueError("marked family does not generate its algebra")


def find_generator_isomorphism(
    alg1: AlgebraBasis,
    family1,
    alg2: AlgebraBasis,
    family2,
    tol: Tolerance = DEFAULT_TOL,
) -> LinearMap | None:
    """Search for a *-isomorphism sending one marked family to the other.

    The families are extended by forced words until they span, the linear
    relations are transported both ways, and the induced map is certified
    multiplicative, adjoint-preserving and bijective.  Returns None when
    any of these obstructions fires.
    """
    if alg1.dim != alg2.dim or alg1.dim == 0:
        return None
    if len(family1) != len(family2):
        raise ValueError("families must be index-aligned")
    x1, x2 = _enrich_families(alg1, family1, alg2, family2, tol)
    if relation_transport(x1, x2, tol) is None:
        return None

    n1, n2 = alg1.ambient_dim, alg2.ambient_dim
    pinv = np.linalg.pinv(x1, rcond=tol.eps_rank)
    images = x2
    # certify on an orthonormal basis of the source span
    onb1 = orthonormal_rows(x1, tol.eps_rank)
    coeff, _ = expand_in_rows(onb1, x1)
    img = coeff @ x2
    d = onb1.shape[0]
    if orthonormal_rows(img, tol.eps_rank).shape[0] != d:
        return None
    b1 = onb1.reshape(d, n1, n1)
    b2 = img.reshape(d, n2, n2)
    scale = max(1.0, float(np.max(np.abs(img))))

    def map_rows(rows):
        return rows @ pinv @ images

    prod1 = np.einsum("iab,jbc->ijac", b1, b1).reshape(d * d, -1)
    prod2 = np.einsum("iab,jbc->ijac", b2, b2).reshape(d * d, -1)
    mult_res = float(np.max(np.linalg.norm(map_rows(prod1) - prod2, axis=1)))
    adj1 = b1.conj().transpose(0, 2, 1).reshape(d, -1)
    adj2 = b2.conj().transpose(0, 2, 1).reshape(d, -1)
    star_res = float(np.max(np.linalg.norm(map_rows(adj1) - adj2, axis=1)))
    transport_res = float(np.max(np.linalg.norm(map_rows(x1) - x2, axis=1)))
    if max(mult_res, star_res, transport_res) > tol.eps_eq * max(scale, 1.0) * d:
        return None
    return LinearMap(
        source_dim=n1,
        target_dim=n2,
        _pinv=pinv,
        _images=images,
        report={
            "multiplicativity": mult_res,
            "star": star_res,
            "family_transport": transport_res,
            "dim": d,
        },
    )
