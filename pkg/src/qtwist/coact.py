"""Group gradings as coactions, covariant representations and cocycles.

A coaction of a finite abelian group G on a matrix-realized algebra C is
the same thing as a G-grading C = sum of C_g; the realized map is
gamma(c) = sum_g c_g (x) lambda_g.  Gradings are the stored normal form;
a raw linear map can be converted back by diagonalizing the induced
action of the dual group.  All axioms (comodule identity, injectivity,
Podles density) are verified numerically against the conjugation-form
comultiplication of the quantum-group model, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .abgroup import Bicharacter, FinAbGroup, GroupHom, dual_group, pairing_value
from .matspan import (
    DEFAULT_TOL,
    AlgebraBasis,
    Subspace,
    Tolerance,
    cmatrix,
    expand_in_rows,
    hs_norm,
    internal_unit,
    multiplicative_closure,
    orthonormal_rows,
    residual_outside,
    span_basis,
)
from .qgroup import QuantumGroupModel, build_model, translations

__all__ = [
    "GradedAlgebra",
    "graded_algebra",
    "trivial_grading",
    "delta_grading",
    "character_grading",
    "ad_grading",
    "direct_sum_grading",
    "conjugate_grading",
    "transport_grading",
    "CoactionMap",
    "grading_to_coaction",
    "verify_coaction",
    "coaction_from_map",
    "GradedHilbertSpace",
    "hilbert_grading",
    "corep_unitary",
    "CovariantRep",
    "canonical_covariant_rep",
    "verify_covariant",
    "action_from_bicharacter",
    "Cocycle",
    "validate_cocycle",
    "make_cocycle",
    "twist_by_cocycle",
]


# ---------------------------------------------------------------------------
# graded algebras


@dataclass
class GradedAlgebra:
    """A *-subalgebra of M_n decomposed into degree components over G.

    components maps group elements to orthonormally based subspaces; only
    nonzero components are stored.  The validation report records the
    direct-sum, degree-additivity and adjoint-flip residuals.
    """

    group: FinAbGroup
    ambient: AlgebraBasis
    components: dict[tuple[int, ...], Subspace]
    report: dict = field(default_factory=dict)

    @property
    def ambient_dim(self) -> int:
        return self.ambient.ambient_dim

    @property
    def dim(self) -> int:
        return self.ambient.dim

    def degrees(self) -> list[tuple[int, ...]]:
        """Degrees with a nonzero component, in group element order."""
        return [g for g in self.group.elements() if g in self.components]

    def component(self, g) -> Subspace:
        g = self.group.reduce(g)
        if g in self.components:
            return self.components[g]
        n = self.ambient_dim
        return Subspace(ambient_dim=n, basis=np.zeros((0, n, n), dtype=np.complex128))

    def homogeneous_basis(self) -> list[tuple[tuple[int, ...], np.ndarray]]:
        """Degree-labeled basis of the whole algebra, in deterministic order."""
        out = []
        for g in self.degrees():
            for m in self.components[g].basis:
                out.append((g, m))
        return out

    def decompose(self, x, tol: Tolerance = DEFAULT_TOL) -> dict:
        """Degree components of an algebra element; raises outside the span."""
        x = cmatrix(x, self.ambient_dim)
        labeled = self.homogeneous_basis()
        rows = np.stack([m.reshape(-1) for _, m in labeled])
        coeffs, res = expand_in_rows(x.reshape(1, -1), rows)
        if res[0] > tol.eps_eq * max(1.0, hs_norm(x)):
            raise ValueError("element is not in the graded algebra")
        parts: dict = {}
        for c, (g, m) in zip(coeffs[0], labeled):
            parts[g] = parts.get(g, 0) + c * m
        return parts

    def degree_of(self, x, tol: Tolerance = DEFAULT_TOL):
        """The unique degree of a homogeneous element, else None."""
        parts = self.decompose(x, tol)
        norms = {g: hs_norm(p) for g, p in parts.items()}
        total = max(norms.values(), default=0.0)
        live = [g for g, v in norms.items() if v > tol.eps_eq * max(1.0, total)]
        return live[0] if len(live) == 1 else None


def graded_algebra(
    group: FinAbGroup, parts, tol: Tolerance = DEFAULT_TOL
) -> GradedAlgebra:
    """Build and validate a graded algebra from degree -> matrices.

    Never raises on a bad grading; the violations land in report and flip
    report["passed"].
    """
    comps: dict[tuple[int, ...], Subspace] = {}
    mats_all = []
    for g, mats in parts.items():
        g = group.reduce(g)
        mats = [cmatrix(m) for m in mats]
        if not mats:
            continue
        sp = span_basis(mats, tol)
        if sp.dim == 0:
            continue
        if g in comps:
            sp = span_basis(list(comps[g].basis) + list(sp.basis), tol)
        comps[g] = sp
        mats_all.extend(mats)
    if not mats_all:
        raise ValueError("grading needs at least one nonzero component")

    total = span_basis(mats_all, tol)
    closure = multiplicative_closure(mats_all, tol)
    rep: dict = {}
    rep["total_dim"] = total.dim
    rep["component_dims"] = {g: comps[g].dim for g in comps}
    rep["direct_sum_ok"] = sum(s.dim for s in comps.values()) == total.dim
    rep["closed_under_products"] = closure.dim == total.dim
    rep["closure_residual"] = closure.closure_residual

    ortho = 0.0
    keys = sorted(comps)
    for i, g in enumerate(keys):
        for h in keys[i + 1 :]:
            overlap = comps[g].coords() @ comps[h].coords().conj().T
            ortho = max(ortho, float(np.max(np.abs(overlap))))
    rep["component_orthogonality"] = ortho

    mult = 0.0
    for g in keys:
        for h in keys:
            gh = group.add(g, h)
            for a in comps[g].basis:
                for b in comps[h].basis:
                    p = a @ b
                    if gh in comps:
                        r = comps[gh].contains_residual(p)
                    else:
                        r = hs_norm(p)
                    mult = max(mult, r)
    rep["multiplication_residual"] = mult

    adj = 0.0
    for g in keys:
        ng = group.neg(g)
        for a in comps[g].basis:
            s = a.conj().T
            if ng in comps:
                adj = max(adj, comps[ng].contains_residual(s))
            else:
                adj = max(adj, hs_norm(s))
    rep["adjoint_residual"] = adj

    rep["passed"] = (
        rep["direct_sum_ok"]
        and rep["closed_under_products"]
        and ortho <= tol.eps_eq
        and mult <= tol.eps_eq
        and adj <= tol.eps_eq
    )
    ambient = AlgebraBasis(
        space=total,
        contains_identity=closure.contains_identity,
        closure_residual=closure.closure_residual,
    )
    return GradedAlgebra(group=group, ambient=ambient, components=comps, report=rep)


def trivial_grading(
    group: FinAbGroup, mats, tol: Tolerance = DEFAULT_TOL
) -> GradedAlgebra:
    """Everything in degree zero."""
    return graded_algebra(group, {group.zero(): list(mats)}, tol)


def delta_grading(group: FinAbGroup, tol: Tolerance = DEFAULT_TOL) -> GradedAlgebra:
    """The group algebra of G on l2(G), graded by deg lambda_g = g."""
    lam = translations(group)
    return graded_algebra(group, {g: [lam[g]] for g in group.elements()}, tol)


def character_grading(group: FinAbGroup, tol: Tolerance = DEFAULT_TOL) -> GradedAlgebra:
    """The function algebra of G on l2(G), graded over the dual group.

    The degree-p component is spanned by the character function
    k |-> <k, p>, acting as a diagonal matrix.
    """
    dg = dual_group(group)
    parts = {}
    for p in dg.elements():
        diag = np.diag(
            [pairing_value(group, k, p) for k in group.elements()]
        ).astype(np.complex128)
        parts[p] = [diag]
    return graded_algebra(dg, parts, tol)


def ad_grading(
    group: FinAbGroup, degrees, tol: Tolerance = DEFAULT_TOL
) -> GradedAlgebra:
    """All of M_n graded by a degree assignment to the basis vectors.

    The matrix unit E_ij gets degree d_i - d_j, so multiplication is
    degree-additive by construction.
    """
    degrees = [group.reduce(d) for d in degrees]
    n = len(degrees)
    parts: dict = {}
    for i in range(n):
        for j in range(n):
            g = group.add(degrees[i], group.neg(degrees[j]))
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = 1.0
            parts.setdefault(g, []).append(e)
    return graded_algebra(group, parts, tol)


def direct_sum_grading(
    a: GradedAlgebra, b: GradedAlgebra, tol: Tolerance = DEFAULT_TOL
) -> GradedAlgebra:
    """Block-diagonal sum of two gradings over the same group."""
    if a.group != b.group:
        raise ValueError("gradings must share the group")
    na, nb = a.ambient_dim, b.ambient_dim
    parts: dict = {}
    for g in a.degrees():
        for m in a.component(g).basis:
            big = np.zeros((na + nb, na + nb), dtype=np.complex128)
            big[:na, :na] = m
            parts.setdefault(g, []).append(big)
    for g in b.degrees():
        for m in b.component(g).basis:
            big = np.zeros((na + nb, na + nb), dtype=np.complex128)
            big[na:, na:] = m
            parts.setdefault(g, []).append(big)
    return graded_algebra(a.group, parts, tol)


def conjugate_grading(
    graded: GradedAlgebra, u: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> GradedAlgebra:
    """Transport a grading along a unitary: components u C_g u*."""
    u = cmatrix(u, graded.ambient_dim)
    parts = {
        g: [u @ m @ u.conj().T for m in graded.component(g).basis]
        for g in graded.degrees()
    }
    return graded_algebra(graded.group, parts, tol)


def transport_grading(
    graded: GradedAlgebra, f: GroupHom, tol: Tolerance = DEFAULT_TOL
) -> GradedAlgebra:
    """Regrade over the target group: degree g2 collects all f(g) = g2."""
    if f.source != graded.group:
        raise ValueError("hom must start at the grading group")
    parts: dict = {}
    for g in graded.degrees():
        parts.setdefault(f.apply(g), []).extend(graded.component(g).basis)
    return graded_algebra(f.target, parts, tol)


# ---------------------------------------------------------------------------
# coactions


@dataclass
class CoactionMap:
    """Realized coaction: right side c |-> sum c_g (x) lambda_g, left side
    c |-> sum lambda_g (x) c_g."""

    graded: GradedAlgebra
    model: QuantumGroupModel
    side: str = "right"
    report: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        if self.model.group != self.graded.group:
            raise ValueError("model group must match the grading group")

    @property
    def target_dim(self) -> int:
        return self.graded.ambient_dim * self.model.order

    def apply(self, c, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        parts = self.graded.decompose(c, tol)
        lam = translations(self.model.group)
        n = self.target_dim
        out = np.zeros((n, n), dtype=np.complex128)
        for g, cg in parts.items():
            if self.side == "right":
                out += np.kron(cg, lam[g])
            else:
                out += np.kron(lam[g], cg)
        return out


def grading_to_coaction(
    graded: GradedAlgebra, side: str = "right", tol: Tolerance = DEFAULT_TOL
) -> CoactionMap:
    """The coaction attached to a grading, over the certified model of G."""
    del tol
    return CoactionMap(graded=graded, model=build_model(graded.group), side=side)


def verify_coaction(gamma: CoactionMap, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Check the coaction axioms; returns a report, never raises.

    Covers the grading invariants, injectivity, image containment in
    C (x) A, the comodule identity against the conjugation-form
    comultiplication, and the Podles density with the algebra's own unit.
    """
    graded, model, side = gamma.graded, gamma.model, gamma.side
    group = graded.group
    lam = translations(group)
    rep: dict = {"side": side, "grading_passed": graded.report.get("passed", True)}

    basis = graded.ambient.basis
    images = [gamma.apply(b, tol) for b in basis]
    stacked = np.stack([m.reshape(-1) for m in images])
    rank = orthonormal_rows(stacked, tol.eps_rank).shape[0]
    rep["injective"] = rank == graded.dim

    if side == "right":
        prod_span = [np.kron(b, lam[g]) for b in basis for g in group.elements()]
    else:
        prod_span = [np.kron(lam[g], b) for b in basis for g in group.elements()]
    ca = span_basis(prod_span, tol)
    rep["image_in_c_tensor_a"] = float(
        max(ca.contains_residual(m) for m in images)
    )

    big = 0.0
    for b in basis:
        parts = graded.decompose(b, tol)
        if side == "right":
            # (gamma (x) id) gamma(b)  vs  (id (x) Delta) gamma(b)
            lhs = sum(
                np.kron(gamma.apply(cg, tol), lam[g]) for g, cg in parts.items()
            )
            rhs = sum(
                np.kron(cg, model.comultiplication(lam[g])) for g, cg in parts.items()
            )
        else:
            # (id (x) gamma) gamma(b)  vs  (Delta (x) id) gamma(b)
            lhs = sum(
                np.kron(lam[g], gamma.apply(cg, tol)) for g, cg in parts.items()
            )
            rhs = sum(
                np.kron(model.comultiplication(lam[g]), cg) for g, cg in parts.items()
            )
        big = max(big, float(np.linalg.norm(lhs - rhs)))
    rep["comodule_identity"] = big

    unit = internal_unit(graded.ambient, tol)
    if unit is None:
        rep["podles_dim"] = -1
        rep["podles_ok"] = False
    else:
        if side == "right":
            pod = [m @ np.kron(unit, lam[g]) for m in images for g in group.elements()]
        else:
            pod = [np.kron(lam[g], unit) @ m for m in images for g in group.elements()]
        pdim = span_basis(pod, tol).dim
        rep["podles_dim"] = pdim
        rep["podles_ok"] = pdim == graded.dim * group.order

    rep["passed"] = (
        rep["grading_passed"]
        and rep["injective"]
        and rep["image_in_c_tensor_a"] <= tol.eps_eq
        and rep["comodule_identity"] <= tol.eps_eq * max(1.0, graded.dim)
        and rep["podles_ok"]
    )
    return rep


def _partial_trace_components(
    raw_images: list[np.ndarray], n_c: int, group: FinAbGroup, side: str
) -> dict[tuple[int, ...], list[np.ndarray]]:
    """Spectral components P_g(c) = (id (x) tau_g) gamma(c) of a raw map."""
    lam = translations(group)
    n = group.order
    comps: dict = {g: [] for g in group.elements()}
    for m in raw_images:
        if side == "right":
            m4 = m.reshape(n_c, n, n_c, n)
            for g in group.elements():
                comps[g].append(np.einsum("aibj,ij->ab", m4, lam[g].conj()) / n)
        else:
            m4 = m.reshape(n, n_c, n, n_c)
            for g in group.elements():
                comps[g].append(np.einsum("iajb,ij->ab", m4, lam[g].conj()) / n)
    return comps


def coaction_from_map(
    algebra: AlgebraBasis,
    raw_map,
    group: FinAbGroup,
    side: str = "right",
    tol: Tolerance = DEFAULT_TOL,
) -> CoactionMap:
    """Recover the grading normal form of a raw coaction map.

    raw_map sends a matrix in the algebra to a matrix on the tensor
    ambient.  The degree components are cut out by slicing against the
    translations on the A leg; if the map was not a coaction the rebuilt
    grading or the axioms fail and a ValueError is raised.
    """
    basis = algebra.basis
    n_c = algebra.ambient_dim
    raw_images = [cmatrix(raw_map(b), n_c * group.order) for b in basis]
    comps = _partial_trace_components(raw_images, n_c, group, side)
    parts = {g: mats for g, mats in comps.items() if mats}
    graded = graded_algebra(group, parts, tol)
    if not graded.report["passed"]:
        raise ValueError(f"raw map does not define a grading: {graded.report}")
    if graded.dim != algebra.dim:
        raise ValueError("recovered grading does not span the algebra")
    gamma = grading_to_coaction(graded, side, tol)

    recon = max(
        float(np.linalg.norm(gamma.apply(b, tol) - img))
        for b, img in zip(basis, raw_images)
    )
    if recon > tol.eps_eq * max(1.0, float(max(np.linalg.norm(i) for i in raw_images))):
        raise ValueError(f"raw map is not of coaction form (residual {recon:.2e})")
    rep = verify_coaction(gamma, tol)
    rep["reconstruction_residual"] = recon
    if not rep["passed"]:
        raise ValueError(f"raw map fails the coaction axioms: {rep}")
    gamma.report = rep
    return gamma


# ---------------------------------------------------------------------------
# graded Hilbert spaces, corepresentations, covariant representations


@dataclass(frozen=True)
class GradedHilbertSpace:
    """Degree assignment to the standard basis vectors of C^dim."""

    group: FinAbGroup
    degrees: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.degrees)

    def projection(self, g) -> np.ndarray:
        g = self.group.reduce(g)
        d = np.array([1.0 if dg == g else 0.0 for dg in self.degrees])
        return np.diag(d).astype(np.complex128)

    def projections(self) -> dict[tuple[int, ...], np.ndarray]:
        return {g: self.projection(g) for g in self.group.elements()}


def hilbert_grading(group: FinAbGroup, degrees) -> GradedHilbertSpace:
    return GradedHilbertSpace(
        group=group, degrees=tuple(group.reduce(d) for d in degrees)
    )


def corep_unitary(grading: GradedHilbertSpace, model: QuantumGroupModel) -> np.ndarray:
    """The corepresentation unitary U = sum_g E_g (x) lambda_g."""
    if model.group != grading.group:
        raise ValueError("model group must match the grading group")
    lam = translations(model.group)
    return sum(
        np.kron(grading.projection(g), lam[g]) for g in model.group.elements()
    )


@dataclass
class CovariantRep:
    """A representation of a graded algebra compatible with a space grading."""

    graded: GradedAlgebra
    grading: GradedHilbertSpace
    images: np.ndarray  # (dim, K, K), aligned with graded.ambient.basis
    report: dict = field(default_factory=dict)

    @property
    def carrier_dim(self) -> int:
        return self.grading.dimension

    def apply(self, c, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        c = cmatrix(c, self.graded.ambient_dim)
        coords = self.graded.ambient.space.coords()
        row = c.reshape(1, -1) @ coords.conj().T
        res = float(np.linalg.norm(c.reshape(-1) - (row @ coords)[0]))
        if res > tol.eps_eq * max(1.0, hs_norm(c)):
            raise ValueError("element is not in the represented algebra")
        return np.einsum("i,iab->ab", row[0], self.images)


def verify_covariant(rep: CovariantRep, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Certify *-homomorphism, faithfulness and the covariance condition."""
    basis = rep.graded.ambient.basis
    out: dict = {}
    hom = 0.0
    star = 0.0
    for i, a in enumerate(basis):
        fa = rep.images[i]
        star = max(star, float(np.linalg.norm(rep.apply(a.conj().T) - fa.conj().T)))
        for j, b in enumerate(basis):
            hom = max(
                hom, float(np.linalg.norm(rep.apply(a @ b) - fa @ rep.images[j]))
            )
    out["homomorphism"] = hom
    out["star"] = star
    stacked = rep.images.reshape(len(basis), -1)
    out["faithful"] = orthonormal_rows(stacked, tol.eps_rank).shape[0] == len(basis)

    cov = 0.0
    projections = rep.grading.projections()
    for g in rep.graded.degrees():
        for m in rep.graded.component(g).basis:
            fm = rep.apply(m)
            for h, eh in projections.items():
                target = projections[rep.graded.group.add(g, h)]
                cov = max(cov, float(np.linalg.norm(target @ fm @ eh - fm @ eh)))
    out["covariance"] = cov
    out["passed"] = (
        out["faithful"]
        and hom <= tol.eps_eq * max(1.0, len(basis))
        and star <= tol.eps_eq
        and cov <= tol.eps_eq
    )
    return out


def canonical_covariant_rep(
    graded: GradedAlgebra, tol: Tolerance = DEFAULT_TOL
) -> CovariantRep:
    """Faithful covariant representation on (carrier of C) (x) l2(G).

    Homogeneous c of degree g acts as c (x) lambda_g; the second leg is
    graded by the group itself.  This is exactly the realized coaction,
    reread as a representation.
    """
    group = graded.group
    gamma = grading_to_coaction(graded, "right", tol)
    images = np.stack([gamma.apply(b, tol) for b in graded.ambient.basis])
    degrees = tuple(
        k for _ in range(graded.ambient_dim) for k in group.elements()
    )
    grading = hilbert_grading(group, degrees)
    rep = CovariantRep(graded=graded, grading=grading, images=images)
    rep.report = verify_covariant(rep, tol)
    if not rep.report["passed"]:
        raise RuntimeError(f"canonical covariant representation failed: {rep.report}")
    return rep


# ---------------------------------------------------------------------------
# bicharacter-induced automorphism action


def action_from_bicharacter(
    graded: GradedAlgebra, chi: Bicharacter, tol: Tolerance = DEFAULT_TOL
) -> tuple[dict, dict]:
    """The H-indexed automorphisms theta_h(c) = chi(g, h) c on degree g.

    Returns (thetas, report): thetas[h] is the spectral form of theta_h,
    a dict degree -> scalar, since the map acts by a scalar on each
    component.  The report certifies that each theta_h is a *-automorphism
    on the graded basis and that h |-> theta_h is additive.
    """
    if chi.group_g != graded.group:
        raise ValueError("bicharacter first leg must match the grading group")
    H = chi.group_h
    thetas = {
        h: {g: chi.value(g, h) for g in graded.degrees()} for h in H.elements()
    }

    def apply_theta(h, x):
        parts = graded.decompose(x, tol)
        return sum(thetas[h][g] * cg for g, cg in parts.items())

    rep: dict = {}
    labeled = graded.homogeneous_basis()
    mult = 0.0
    for h in H.elements():
        for _, a in labeled:
            for _, b in labeled:
                lhs = apply_theta(h, a @ b)
                rhs = apply_theta(h, a) @ apply_theta(h, b)
                mult = max(mult, float(np.linalg.norm(lhs - rhs)))
    rep["multiplicative"] = mult
    add = 0.0
    for h1 in H.elements():
        for h2 in H.elements():
            h12 = H.add(h1, h2)
            for _, m in labeled:
                lhs = apply_theta(h12, m)
                rhs = apply_theta(h1, apply_theta(h2, m))
                add = max(add, float(np.linalg.norm(lhs - rhs)))
    rep["additive_in_h"] = add
    star = 0.0
    for h in H.elements():
        for _, m in labeled:
            star = max(
                star,
                float(
                    np.linalg.norm(
                        apply_theta(h, m.conj().T) - apply_theta(h, m).conj().T
                    )
                ),
            )
    rep["star"] = star
    rep["passed"] = max(mult, add, star) <= tol.eps_eq
    return thetas, rep


# ---------------------------------------------------------------------------
# cocycles and twisted coactions


@dataclass
class Cocycle:
    """A unitary in C (x) A satisfying the cocycle identity for gamma."""

    coaction: CoactionMap
    matrix: np.ndarray
    report: dict = field(default_factory=dict)


def validate_cocycle(
    gamma: CoactionMap, u: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> dict:
    """Residuals for unitarity, membership, the cocycle identity and density.

    The cocycle identity for a right coaction gamma reads
    (u (x) 1) ((gamma (x) id) u) = (id (x) Delta) u.
    """
    if gamma.side != "right":
        raise ValueError("cocycles are implemented for right coactions")
    graded, model = gamma.graded, gamma.model
    group = graded.group
    n_c, n = graded.ambient_dim, group.order
    u = cmatrix(u, n_c * n)
    lam = translations(group)
    rep: dict = {}
    rep["unitary"] = float(np.linalg.norm(u @ u.conj().T - np.eye(n_c * n)))

    # Fourier pieces u = sum_k c_k (x) lambda_k
    pieces = _partial_trace_components([u], n_c, group, "right")
    ck = {g: mats[0] for g, mats in pieces.items()}
    rebuilt = sum(np.kron(ck[g], lam[g]) for g in group.elements())
    rep["a_leg_form"] = float(np.linalg.norm(u - rebuilt))
    rep["membership"] = float(
        max(
            graded.ambient.space.contains_residual(ck[g])
            for g in group.elements()
        )
    )

    if rep["a_leg_form"] <= tol.eps_eq and rep["membership"] <= tol.eps_eq:
        lhs = np.kron(u, np.eye(n)) @ sum(
            np.kron(gamma.apply(ck[g], tol), lam[g]) for g in group.elements()
        )
        rhs = sum(
            np.kron(ck[g], model.comultiplication(lam[g])) for g in group.elements()
        )
        rep["cocycle_identity"] = float(np.linalg.norm(lhs - rhs))
    else:
        rep["cocycle_identity"] = float("inf")

    unit = internal_unit(graded.ambient, tol)
    if unit is None:
        rep["density_dim"] = -1
        rep["density_ok"] = False
    else:
        pod = [
            gamma.apply(b, tol) @ u.conj().T @ np.kron(unit, lam[g])
            for b in graded.ambient.basis
            for g in group.elements()
        ]
        ddim = span_basis(pod, tol).dim
        rep["density_dim"] = ddim
        rep["density_ok"] = ddim == graded.dim * n
    rep["passed"] = (
        rep["unitary"] <= tol.eps_eq
        and rep["a_leg_form"] <= tol.eps_eq
        and rep["membership"] <= tol.eps_eq
        and rep["cocycle_identity"] <= tol.eps_eq * max(1.0, n)
        and rep["density_ok"]
    )
    return rep


def make_cocycle(
    gamma: CoactionMap, u: np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> Cocycle:
    rep = validate_cocycle(gamma, u, tol)
    return Cocycle(coaction=gamma, matrix=cmatrix(u), report=rep)


def twist_by_cocycle(
    gamma: CoactionMap, u: Cocycle | np.ndarray, tol: Tolerance = DEFAULT_TOL
) -> CoactionMap:
    """The twisted coaction Ad_u after gamma, regraded to normal form."""
    if isinstance(u, Cocycle):
        umat = u.matrix
        rep = u.report if u.coaction is gamma else validate_cocycle(gamma, umat, tol)
    else:
        umat = cmatrix(u, gamma.target_dim)
        rep = validate_cocycle(gamma, umat, tol)
    if not rep["passed"]:
        raise ValueError(f"cocycle validation failed: {rep}")

    def twisted(c):
        return umat @ gamma.apply(c, tol) @ umat.conj().T

    return coaction_from_map(
        gamma.graded.ambient, twisted, gamma.graded.group, gamma.side, tol
    )
