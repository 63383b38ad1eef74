"""Weyl pairs for a bicharacter on a pair of finite abelian groups.

A chi-Heisenberg pair is a pair of unitary representations, U of G and
V of H on one space, obeying U_g V_h = chi(g,h) V_h U_g; the anti
variant carries the scalar on the other side.  These relations are the
only way the twist enters the twisted tensor product, so everything
here is certified numerically: representation axioms at construction,
the Weyl relation on all element pairs, and the three-leg operator form
of the same identity as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .abgroup import Bicharacter, FinAbGroup
from .matspan import DEFAULT_TOL, Tolerance, cmatrix
from .qgroup import QuantumGroupModel, build_model, indicators, translations

__all__ = [
    "RepPair",
    "rep_pair",
    "is_heisenberg",
    "is_anti_heisenberg",
    "canonical_heisenberg",
    "composite_heisenberg",
    "amplify_pair",
    "conjugate_pair",
    "swap_pair",
    "commutation_check",
    "heisenberg_leg_residual",
    "anti_heisenberg_leg_residual",
    "pentagon_pair_residual",
]


@dataclass
class RepPair:
    """Unitary representations U of G and V of H on a common space."""

    group_g: FinAbGroup
    group_h: FinAbGroup
    space_dim: int
    U: dict
    V: dict
    report: dict = field(default_factory=dict)


def _rep_residual(group: FinAbGroup, rep: dict, dim: int) -> float:
    """Worst unitarity / homomorphism defect of one family."""
    eye = np.eye(dim)
    worst = 0.0
    for g in group.elements():
        m = rep[g]
        worst = max(worst, float(np.linalg.norm(m @ m.conj().T - eye)))
    for g in group.elements():
        for h in group.elements():
            d = rep[group.add(g, h)] - rep[g] @ rep[h]
            worst = max(worst, float(np.linalg.norm(d)))
    return worst


def rep_pair(
    group_g: FinAbGroup,
    group_h: FinAbGroup,
    U: dict,
    V: dict,
    tol: Tolerance = DEFAULT_TOL,
) -> RepPair:
    """Bundle two families into a certified pair; raises if either family
    is not a unitary representation."""
    U = {group_g.reduce(g): cmatrix(m) for g, m in U.items()}
    V = {group_h.reduce(h): cmatrix(m) for h, m in V.items()}
    if set(U) != set(group_g.elements()):
        raise ValueError("U must be defined on every element of G")
    if set(V) != set(group_h.elements()):
        raise ValueError("V must be defined on every element of H")
    dims = {m.shape[0] for m in U.values()} | {m.shape[0] for m in V.values()}
    if len(dims) != 1:
        raise ValueError("all representing matrices must act on one space")
    dim = dims.pop()
    ru = _rep_residual(group_g, U, dim)
    rv = _rep_residual(group_h, V, dim)
    report = {"u_representation": ru, "v_representation": rv}
    report["passed"] = max(ru, rv) <= tol.eps_eq * max(1.0, dim)
    if not report["passed"]:
        raise ValueError(f"families are not unitary representations: {report}")
    return RepPair(
        group_g=group_g,
        group_h=group_h,
        space_dim=dim,
        U=U,
        V=V,
        report=report,
    )


def _check_compatible(p: RepPair, chi: Bicharacter) -> None:
    if chi.group_g != p.group_g or chi.group_h != p.group_h:
        raise ValueError("bicharacter groups must match the pair")


def is_heisenberg(
    p: RepPair, chi: Bicharacter, tol: Tolerance = DEFAULT_TOL
) -> tuple[bool, float]:
    """Weyl relation U_g V_h = chi(g,h) V_h U_g; returns (ok, max residual)."""
    _check_compatible(p, chi)
    worst = 0.0
    for g in p.group_g.elements():
        for h in p.group_h.elements():
            d = p.U[g] @ p.V[h] - chi.value(g, h) * (p.V[h] @ p.U[g])
            worst = max(worst, float(np.linalg.norm(d)))
    return worst <= tol.eps_eq * max(1.0, p.space_dim), worst


def is_anti_heisenberg(
    p: RepPair, chi: Bicharacter, tol: Tolerance = DEFAULT_TOL
) -> tuple[bool, float]:
    """Flipped relation V_h U_g = chi(g,h) U_g V_h; returns (ok, residual)."""
    _check_compatible(p, chi)
    worst = 0.0
    for g in p.group_g.elements():
        for h in p.group_h.elements():
            d = p.V[h] @ p.U[g] - chi.value(g, h) * (p.U[g] @ p.V[h])
            worst = max(worst, float(np.linalg.norm(d)))
    return worst <= tol.eps_eq * max(1.0, p.space_dim), worst


def canonical_heisenberg(chi: Bicharacter, tol: Tolerance = DEFAULT_TOL) -> RepPair:
    """Clock-and-shift normal form on l2(H).

    U_g multiplies pointwise by k |-> chi(g,k) and V_h translates by h,
    so U_g V_h picks up exactly chi(g,h) when moved past V_h.
    """
    H = chi.group_h
    U = {
        g: np.diag([chi.value(g, k) for k in H.elements()]).astype(np.complex128)
        for g in chi.group_g.elements()
    }
    return rep_pair(chi.group_g, H, U, translations(H), tol)


def composite_heisenberg(chi: Bicharacter, tol: Tolerance = DEFAULT_TOL) -> RepPair:
    """The same relation realized on l2(G) (x) l2(H).

    U_g = lambda_g (x) (multiplication by chi(g, .)), V_h = 1 (x)
    (translation by h).  Lives on a different space than the canonical
    pair, which makes it a useful independent witness.
    """
    G, H = chi.group_g, chi.group_h
    lam_g, lam_h = translations(G), translations(H)
    eye_g = np.eye(G.order, dtype=np.complex128)
    U = {
        g: np.kron(
            lam_g[g],
            np.diag([chi.value(g, k) for k in H.elements()]).astype(np.complex128),
        )
        for g in G.elements()
    }
    V = {h: np.kron(eye_g, lam_h[h]) for h in H.elements()}
    return rep_pair(G, H, U, V, tol)


def amplify_pair(p: RepPair, extra_dim: int, tol: Tolerance = DEFAULT_TOL) -> RepPair:
    """Tensor both families with the identity on an extra leg."""
    if extra_dim < 1:
        raise ValueError("extra dimension must be positive")
    eye = np.eye(extra_dim, dtype=np.complex128)
    U = {g: np.kron(m, eye) for g, m in p.U.items()}
    V = {h: np.kron(m, eye) for h, m in p.V.items()}
    return rep_pair(p.group_g, p.group_h, U, V, tol)


def conjugate_pair(p: RepPair, tol: Tolerance = DEFAULT_TOL) -> RepPair:
    """Entrywise conjugate of both families.

    Conjugating the Weyl relation flips chi to its conjugate, so this
    swaps Heisenberg with anti-Heisenberg for the same chi.
    """
    U = {g: m.conj() for g, m in p.U.items()}
    V = {h: m.conj() for h, m in p.V.items()}
    return rep_pair(p.group_g, p.group_h, U, V, tol)


def swap_pair(p: RepPair, tol: Tolerance = DEFAULT_TOL) -> RepPair:
    """Exchange the two families: (V, U) over (H, G).

    p is chi-Heisenberg exactly when the swap is Heisenberg for the
    dual bicharacter.
    """
    return rep_pair(p.group_h, p.group_g, p.V, p.U, tol)


def _doubled_family(
    rep1: dict, rep2: dict, model: QuantumGroupModel
) -> dict:
    """Images of Delta(lambda_g) under the product of two representations.

    Expands the comultiplication in the lambda_a (x) lambda_b frame and
    substitutes rep1 for the first leg, rep2 for the second.
    """
    group = model.group
    lam = translations(group)
    els = group.elements()
    n = group.order
    out = {}
    for g in els:
        m4 = model.comultiplication(lam[g]).reshape(n, n, n, n)
        acc = np.zeros(
            (rep1[g].shape[0] * rep2[g].shape[0],) * 2, dtype=np.complex128
        )
        for a in els:
            for b in els:
                c = np.einsum("ij,kl,ikjl->", lam[a].conj(), lam[b].conj(), m4)
                c /= n * n
                if abs(c) > 1e-14:
                    acc += c * np.kron(rep1[a], rep2[b])
        out[g] = acc
    return out


def commutation_check(
    p1: RepPair,
    p2: RepPair,
    model_g: QuantumGroupModel | None = None,
    model_h: QuantumGroupModel | None = None,
) -> float:
    """Max commutator norm between the doubled G and H families.

    The doubled families are the images of the comultiplied generators:
    g acts by U_g (x) U'_g and h by V_h (x) V'_h, both obtained by
    pushing Delta(lambda) through the product representation.  When p1
    is chi-Heisenberg and p2 is chi-anti-Heisenberg the two scalars
    cancel and the commutators vanish.
    """
    if p1.group_g != p2.group_g or p1.group_h != p2.group_h:
        raise ValueError("pairs must share both groups")
    model_g = model_g if model_g is not None else build_model(p1.group_g)
    model_h = model_h if model_h is not None else build_model(p1.group_h)
    doubled_u = _doubled_family(p1.U, p2.U, model_g)
    doubled_v = _doubled_family(p1.V, p2.V, model_h)
    worst = 0.0
    for g in p1.group_g.elements():
        for h in p1.group_h.elements():
            a, b = doubled_u[g], doubled_v[h]
            worst = max(worst, float(np.linalg.norm(a @ b - b @ a)))
    return worst


def _leg_operators(p: RepPair, chi: Bicharacter):
    """Three-leg matrices on l2(G) (x) l2(H) (x) K for the operator form."""
    _check_compatible(p, chi)
    G, H = chi.group_g, chi.group_h
    ind_g, ind_h = indicators(G), indicators(H)
    eye_g = np.eye(G.order, dtype=np.complex128)
    eye_h = np.eye(H.order, dtype=np.complex128)
    eye_k = np.eye(p.space_dim, dtype=np.complex128)
    w1u = sum(
        np.kron(np.kron(ind_g[g], eye_h), p.U[g]) for g in G.elements()
    )
    w2v = sum(
        np.kron(np.kron(eye_g, ind_h[h]), p.V[h]) for h in H.elements()
    )
    chi12 = np.kron(chi.as_diagonal(), eye_k)
    return w1u, w2v, chi12


def heisenberg_leg_residual(p: RepPair, chi: Bicharacter) -> float:
    """Operator form of the Heisenberg relation in three legs.

    Assembles W1U = sum 1_g (x) 1 (x) U_g and W2V = sum 1 (x) 1_h (x) V_h
    and returns the norm of W1U W2V - W2V W1U chi12.  Evaluating at the
    point (g,h) of the first two legs recovers the scalar relation, so
    this residual vanishes exactly for Heisenberg pairs.
    """
    w1u, w2v, chi12 = _leg_operators(p, chi)
    return float(np.linalg.norm(w1u @ w2v - w2v @ w1u @ chi12))


def anti_heisenberg_leg_residual(p: RepPair, chi: Bicharacter) -> float:
    """Operator form of the anti relation: W2V W1U - chi12 W1U W2V."""
    w1u, w2v, chi12 = _leg_operators(p, chi)
    return float(np.linalg.norm(w2v @ w1u - chi12 @ (w1u @ w2v)))


def pentagon_pair_residual(model: QuantumGroupModel) -> float:
    """The regular pair read as a three-leg Heisenberg identity.

    With pi the translations and pihat the indicator functions both
    acting on the middle leg, the identity
    W_{pihat,3} W_{1,pi} = W_{1,pi} W_13 W_{pihat,3} is the pentagon
    equation of the model's multiplicative unitary.
    """
    group = model.group
    n = group.order
    lam, ind = translations(group), indicators(group)
    eye = np.eye(n, dtype=np.complex128)
    w_1pi = sum(np.kron(np.kron(ind[g], lam[g]), eye) for g in group.elements())
    w_pihat3 = sum(np.kron(np.kron(eye, ind[g]), lam[g]) for g in group.elements())
    w_13 = sum(np.kron(np.kron(ind[g], eye), lam[g]) for g in group.elements())
    return float(np.linalg.norm(w_pihat3 @ w_1pi - w_1pi @ w_13 @ w_pihat3))
