"""Standard-form reduction and phase-damping decompositions of unital qubit channels.

Every unital qubit channel factors as rotation * diagonal * rotation with the
diagonal ordered so its third entry dominates in absolute value. The main
construction here rewrites such a channel, for any fixed qubit state r, as a
convex combination of maps W Psi_lam(U . U+) W+ whose inner unitaries U all
move r onto the equator of the Bloch sphere (Tr sz U r U+ = 0). The pieces:

- the CP cross-section at height lam is a hexagon (lam >= 1/3) or square
  (lam <= 1/3), and its corner maps reduce, via coordinate permutations and
  sign flips, to the four extreme maps (1,lam,lam), (lam,1,lam),
  (-1,-lam,lam), (-lam,-1,lam), each a conjugated phase-damping map;
- the fully symmetric corners pull any diagonalizing unitary through, and the
  partially symmetric corners pull axis rotations through, which is what
  makes the equator condition achievable term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import nnls
from scipy.spatial.transform import Rotation

from .channels import UnitalQubitChannel, conjugation_channel, is_completely_positive
from .linalg import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    as_matrix,
    assert_density_matrix,
    bloch_vector,
    hermitian_eigensystem,
)

WEIGHT_CUTOFF = 1e-13

# Unitary whose conjugation permutes Bloch axes x -> z -> y -> x.
V_CYCLIC = 0.5 * (I2 + 1j * (SIGMA_X + SIGMA_Y + SIGMA_Z))
_RV = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])


def su2_from_so3(r) -> np.ndarray:
    """Lift a rotation matrix to a 2 x 2 unitary u with u s_j u+ = sum_i R_ij s_i.

    Either sheet of the double cover may be returned.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise ValueError(f"rotation matrix must be 3 x 3, got {r.shape}")
    if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-10 or abs(np.linalg.det(r) - 1.0) > 1e-10:
        raise ValueError("input is not special orthogonal within 1e-10")
    x, y, z, w = Rotation.from_matrix(r).as_quat()
    u = w * I2 - 1j * (x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)
    err = max(
        np.max(np.abs(u @ s @ u.conj().T - sum(r[i, j] * p for i, p in enumerate((SIGMA_X, SIGMA_Y, SIGMA_Z)))))
        for j, s in enumerate((SIGMA_X, SIGMA_Y, SIGMA_Z))
    )
    if err > 1e-10:
        raise ValueError(f"double-cover lift failed, conjugation error {err:.3e}")
    return u


@dataclass(frozen=True)
class StandardForm:
    """Channel = conjugation(u_post) o diag(lambdas) o conjugation(u_pre)."""

    lambdas: np.ndarray
    u_pre: np.ndarray
    u_post: np.ndarray

    def to_channel(self) -> UnitalQubitChannel:
        r_pre = conjugation_channel(self.u_pre).t
        r_post = conjugation_channel(self.u_post).t
        return UnitalQubitChannel(r_post @ np.diag(self.lambdas) @ r_pre)


def standard_form(phi: UnitalQubitChannel) -> StandardForm:
    """Signed singular decomposition with the dominant factor in third place.

    Both rotations are special orthogonal; an improper SVD factor is absorbed
    by flipping the sign of one diagonal entry, and the diagonal is permuted
    cyclically so lambdas[2] >= max(|lambdas[0]|, |lambdas[1]|) >= 0 is
    impossible to violate. Already-standard diagonal transfers pass through
    with identity unitaries.
    """
    t = np.asarray(phi.t, dtype=float)
    diag = np.diag(np.diag(t))
    if np.max(np.abs(t - diag)) <= 1e-13 and t[2, 2] >= max(abs(t[0, 0]), abs(t[1, 1])):
        lams = np.diag(t).copy()
        u_pre = u_post = I2.copy()
    else:
        u, s, vt = np.linalg.svd(t)
        if np.linalg.det(u) < 0:
            u[:, 2] *= -1
            s[2] *= -1
        if np.linalg.det(vt) < 0:
            vt[2, :] *= -1
            s[2] *= -1
        p = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        lams = np.array([s[1], s[2], s[0]])
        u_post = su2_from_so3(u @ p.T)
        u_pre = su2_from_so3(p @ vt)
    if not is_completely_positive(lams, atol=1e-9):
        raise ValueError(f"standard-form diagonal {lams} is not completely positive")
    sf = StandardForm(lambdas=lams, u_pre=u_pre, u_post=u_post)
    err = _channel_distance(sf.to_channel(), phi)
    if err > 1e-10:
        raise ValueError(f"standard-form recomposition failed, error {err:.3e}")
    return sf


def _channel_distance(a: UnitalQubitChannel, b: UnitalQubitChannel) -> float:
    worst = 0.0
    for basis in _QUBIT_BASIS:
        worst = max(worst, np.max(np.abs(a.apply(basis) - b.apply(basis))))
    return worst


_QUBIT_BASIS = (
    I2 / 2,
    (I2 + SIGMA_X) / 2,
    (I2 + SIGMA_Y) / 2,
    (I2 + SIGMA_Z) / 2,
)


@dataclass(frozen=True)
class CrossSectionDecomposition:
    """Convex weights over the extreme points of the standard-form cross-section."""

    lam: float
    vertices: tuple[tuple[float, np.ndarray], ...]


def _hexagon_vertices(lam: float) -> np.ndarray:
    return np.array(
        [
            [lam, lam],
            [2 * lam - 1, lam],
            [lam, 2 * lam - 1],
            [-lam, -lam],
            [1 - 2 * lam, -lam],
            [-lam, 1 - 2 * lam],
        ]
    )


def _square_vertices(lam: float) -> np.ndarray:
    return np.array([[lam, lam], [-lam, lam], [lam, -lam], [-lam, -lam]])


# Canonical vertex indices listed in cyclic hull order, for fan triangulation.
_HEX_CYCLE = (0, 1, 5, 3, 4, 2)
_SQUARE_CYCLE = (0, 1, 3, 2)


def _cross_section_weights(lambdas) -> list[tuple[float, int]]:
    """Convex weights of (l1, l2) over the cross-section corners at height l3.

    Returns (weight, canonical vertex index) pairs. Fan triangulation with a
    barycentric solve; a nonnegative least-squares fallback covers
    near-degenerate sections.
    """
    l1, l2, lam = (float(x) for x in lambdas)
    if not is_completely_positive(lambdas, atol=1e-10):
        raise ValueError(f"triple {tuple(lambdas)} is not completely positive")
    if lam < max(abs(l1), abs(l2)) - 1e-10:
        raise ValueError(f"triple {tuple(lambdas)} is not in standard order")
    if lam <= 1e-12:
        return [(1.0, 0)]
    hexagon = lam >= 1 / 3
    verts = _hexagon_vertices(lam) if hexagon else _square_vertices(lam)
    cycle = _HEX_CYCLE if hexagon else _SQUARE_CYCLE
    p = np.array([l1, l2])

    for idx, v in enumerate(verts):
        if np.max(np.abs(p - v)) <= 1e-12:
            return [(1.0, idx)]

    if 1 - lam <= 1e-12:
        # hexagon collapsed to the segment (t, t); CP forces |l1 - l2| <= 1 - lam
        tm = (l1 + l2) / 2
        return [(w, i) for w, i in (((1 + tm) / 2, 0), ((1 - tm) / 2, 3)) if w > WEIGHT_CUTOFF]

    best = None
    for k in range(1, len(cycle) - 1):
        tri = (cycle[0], cycle[k], cycle[k + 1])
        a = np.vstack([verts[list(tri)].T, np.ones(3)])
        try:
            w = np.linalg.solve(a, np.append(p, 1.0))
        except np.linalg.LinAlgError:
            continue
        if best is None or w.min() > best[0].min():
            best = (w, tri)
    weights: list[tuple[float, int]] = []
    if best is not None and best[0].min() >= -1e-13:
        for w, idx in zip(*best):
            if w > WEIGHT_CUTOFF:
                weights.append((float(w), int(idx)))
    else:
        a = np.vstack([verts.T, np.ones(len(verts))])
        w, resid = nnls(a, np.append(p, 1.0))
        if resid > 1e-10:
            raise ValueError(f"point {p} lies outside the cross-section, residual {resid:.3e}")
        weights = [(float(x), int(i)) for i, x in enumerate(w) if x > WEIGHT_CUTOFF]
    total = sum(w for w, _ in weights)
    return [(w / total, i) for w, i in weights]


def cross_section_decompose(lambdas) -> CrossSectionDecomposition:
    """Decompose a standard-form triple over its cross-section corner points."""
    lam = float(lambdas[2])
    verts = _hexagon_vertices(lam) if lam >= 1 / 3 else _square_vertices(lam)
    pairs = tuple((w, verts[i].copy()) for w, i in _cross_section_weights(lambdas))
    return CrossSectionDecomposition(lam=lam, vertices=pairs)


class PhaseDampingTerm(NamedTuple):
    weight: float
    post: np.ndarray  # W, applied after the damping
    pre: np.ndarray   # U, applied before the damping


@dataclass(frozen=True)
class PhaseDampingDecomposition:
    """Channel = sum_i weight_i * conj(post_i) o Psi_lam o conj(pre_i).

    Built for a specific qubit state: every pre unitary satisfies
    Tr(sz pre r pre+) = 0 for the stored source state r.
    """

    lam: float
    terms: tuple[PhaseDampingTerm, ...]
    source_state: np.ndarray

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        out = np.zeros_like(rho)
        for c, w, u in self.terms:
            out = out + c * (w @ phase_damping_apply(self.lam, u @ rho @ u.conj().T) @ w.conj().T)
        return out


def phase_damping_apply(lam: float, rho) -> np.ndarray:
    """Scale the off-diagonal entries of a 2 x 2 matrix by lam."""
    out = np.array(rho, dtype=complex)
    out[0, 1] *= lam
    out[1, 0] *= lam
    return out


def _axis_rotation(axis: int, s: np.ndarray) -> np.ndarray:
    """Unitary exp(i theta sigma_axis), theta in [0, pi), zeroing one Bloch component.

    axis 1 rotates the (y, z) plane and zeroes the y component; axis 2 rotates
    the (x, z) plane and zeroes the x component. Both leave the other equator
    component untouched and make the z component nonnegative.
    """
    w = bloch_vector(s)
    if axis == 1:
        psi = np.arctan2(w[1], w[2])
        sigma = SIGMA_X
        killed = 1
    elif axis == 2:
        psi = np.arctan2(-w[0], w[2])
        sigma = SIGMA_Y
        killed = 0
    else:
        raise ValueError("axis must be 1 or 2")
    theta = (-psi / 2) % np.pi
    g = np.cos(theta) * I2 + 1j * np.sin(theta) * sigma
    if abs(bloch_vector(g @ s @ g.conj().T)[killed]) > 1e-12:
        raise AssertionError("pull-through rotation failed to zero the Bloch component")
    return g


# The four extreme maps of the cross-section rectangle, as conjugated
# phase-damping maps, with the Bloch component of the input state that each
# pre unitary sends to the z axis. Entries: (post, pre).
_V = V_CYCLIC
_VD = V_CYCLIC.conj().T
_RECT_UNITARIES = (
    (_VD, _V),            # (1,  lam,  lam): needs x component 0
    (_V, _VD),            # (lam,  1,  lam): needs y component 0
    (_VD, _V @ SIGMA_Z),  # (-1, -lam, lam): needs x component 0
    (_V, _VD @ SIGMA_Z),  # (-lam, -1, lam): needs y component 0
)


def _rect_weights(point: np.ndarray, lam: float) -> np.ndarray:
    """Exact bilinear convex weights of a point over the rectangle corners.

    Corners are (1,lam), (lam,1), (-1,-lam), (-lam,-1). For the centre point
    (lam, lam) this reproduces the symmetric split (s, s, t, t) with
    s = (1+3 lam)/(4(1+lam)) and t = (1-lam)/(4(1+lam)).
    """
    c1 = np.array([1.0, lam])
    ea = np.array([lam - 1.0, 1.0 - lam])
    eb = np.array([-lam - 1.0, -1.0 - lam])
    d = point - c1
    na, nb = ea @ ea, eb @ eb
    a = (d @ ea) / na if na > 1e-24 else 0.0
    b = (d @ eb) / nb if nb > 1e-24 else 0.0
    if not (-1e-9 <= a <= 1 + 1e-9 and -1e-9 <= b <= 1 + 1e-9):
        raise ValueError(f"point {point} lies outside the corner rectangle at lam={lam}")
    a, b = min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)
    return np.array([(1 - a) * (1 - b), a * (1 - b), a * b, (1 - a) * b])


def _rect_terms(point, lam: float) -> list[PhaseDampingTerm]:
    """Decompose the map (point[0], point[1], lam) over the rectangle corners.

    Valid only for input states already diagonal in the z basis; the caller
    is responsible for rotating the state first.
    """
    weights = _rect_weights(np.asarray(point, dtype=float), lam)
    return [
        PhaseDampingTerm(float(w), post, pre)
        for w, (post, pre) in zip(weights, _RECT_UNITARIES)
        if w > WEIGHT_CUTOFF
    ]


def _wrap(terms, post=None, pre=None, weight=1.0) -> list[PhaseDampingTerm]:
    return [
        PhaseDampingTerm(
            c * weight,
            w if post is None else post @ w,
            u if pre is None else u @ pre,
        )
        for c, w, u in terms
    ]


def _diagonalizer(s: np.ndarray) -> np.ndarray:
    """Unitary u with u s u+ diagonal (descending), deterministic phases."""
    _, v = hermitian_eigensystem(s)
    return v.conj().T


def _depolarizing_terms(s: np.ndarray, lam: float) -> list[PhaseDampingTerm]:
    """Terms for the uniform contraction (lam, lam, lam) against state s."""
    ud = _diagonalizer(s)
    inner = _rect_terms((lam, lam), lam)
    return _wrap(inner, post=ud.conj().T, pre=ud)


def _depolarizing_neg_terms(s: np.ndarray, lam: float) -> list[PhaseDampingTerm]:
    """Terms for the contraction (-lam, -lam, -lam) against state s.

    Rewritten as conj(sy) o (lam, -lam, lam), which stays at height lam; the
    inner point is inside the rectangle only for lam <= 1/3, the regime where
    this map occurs.
    """
    ud = _diagonalizer(s)
    inner = _rect_terms((lam, -lam), lam)
    return _wrap(inner, post=ud.conj().T @ SIGMA_Y, pre=ud)


_TWO_PAULI_CORNER = {1: (_V, _VD), 2: (_VD, _V)}


def _two_pauli_like_terms(s: np.ndarray, lam: float, permuted: bool) -> list[PhaseDampingTerm]:
    """Terms for (2 lam - 1, lam, lam), or its coordinate-permuted partner
    (lam, 2 lam - 1, lam) when permuted is set, against state s.

    The map commutes with rotations about the axis whose two neighbours carry
    equal entries; one such rotation moves the state into the matching
    coordinate plane, the map then splits into a rectangle corner plus a
    sign-flipped partner of the other kind, and a second rotation finishes
    diagonalizing the state for the rectangle step.
    """
    if lam < 1 / 3 - 1e-12:
        raise ValueError("two-Pauli factors exist only for lam >= 1/3")
    first_axis, second_axis = (2, 1) if permuted else (1, 2)
    g = _axis_rotation(first_axis, s)
    s1 = g @ s @ g.conj().T

    mu = (3 * lam - 1) / (2 * lam)
    terms: list[PhaseDampingTerm] = []
    if mu > WEIGHT_CUTOFF:
        post, pre = _TWO_PAULI_CORNER[first_axis]
        terms.append(PhaseDampingTerm(float(mu), post, pre))
    if 1 - mu > WEIGHT_CUTOFF:
        s2 = SIGMA_Z @ s1 @ SIGMA_Z
        h = _axis_rotation(second_axis, s2)
        s3 = h @ s2 @ h.conj().T
        inner_point = (lam, 2 * lam - 1) if not permuted else (2 * lam - 1, lam)
        inner = _rect_terms(inner_point, lam)
        inner = _wrap(inner, post=h.conj().T, pre=h)
        terms += _wrap(inner, pre=SIGMA_Z, weight=1 - mu)
    return _wrap(terms, post=g.conj().T, pre=g)


def _vertex_terms(branch_hexagon: bool, idx: int, s: np.ndarray, lam: float) -> list[PhaseDampingTerm]:
    if branch_hexagon:
        if idx == 0:
            return _depolarizing_terms(s, lam)
        if idx == 1:
            return _two_pauli_like_terms(s, lam, permuted=False)
        if idx == 2:
            return _two_pauli_like_terms(s, lam, permuted=True)
        sz = SIGMA_Z @ s @ SIGMA_Z
        if idx == 3:
            return _wrap(_depolarizing_terms(sz, lam), pre=SIGMA_Z)
        if idx == 4:
            return _wrap(_two_pauli_like_terms(sz, lam, permuted=False), pre=SIGMA_Z)
        return _wrap(_two_pauli_like_terms(sz, lam, permuted=True), pre=SIGMA_Z)
    if idx == 0:
        return _depolarizing_terms(s, lam)
    if idx == 1:
        sx = SIGMA_X @ s @ SIGMA_X
        return _wrap(_depolarizing_neg_terms(sx, lam), pre=SIGMA_X)
    if idx == 2:
        sy = SIGMA_Y @ s @ SIGMA_Y
        return _wrap(_depolarizing_neg_terms(sy, lam), pre=SIGMA_Y)
    sz = SIGMA_Z @ s @ SIGMA_Z
    return _wrap(_depolarizing_terms(sz, lam), pre=SIGMA_Z)


def phase_damping_decompose(phi: UnitalQubitChannel, r) -> PhaseDampingDecomposition:
    """Write phi as a convex combination of conjugated phase-damping maps
    whose pre unitaries all satisfy Tr(sz U r U+) = 0 for the given state r.

    The damping parameter is the dominant standard-form factor, except for
    channels that already are conjugated phase-damping maps with a compliant
    state, which pass through as a single term.
    """
    r = assert_density_matrix(r, "r")
    if r.shape != (2, 2):
        raise ValueError("r must be a qubit state")
    sf = standard_form(phi)
    l1, l2, l3 = sf.lambdas

    if l3 >= 1 - 1e-12 and abs(l1 - l2) <= 1e-12 and l1 >= 0:
        if abs(np.trace(SIGMA_Z @ sf.u_pre @ r @ sf.u_pre.conj().T).real) <= 1e-12:
            term = PhaseDampingTerm(1.0, sf.u_post, sf.u_pre)
            return PhaseDampingDecomposition(lam=float((l1 + l2) / 2), terms=(term,), source_state=r)

    lam = float(l3)
    r_inner = sf.u_pre @ r @ sf.u_pre.conj().T
    hexagon = lam >= 1 / 3
    terms: list[PhaseDampingTerm] = []
    for weight, idx in _cross_section_weights(sf.lambdas):
        vt = _vertex_terms(hexagon, idx, r_inner, lam)
        terms += _wrap(vt, post=sf.u_post, pre=sf.u_pre, weight=weight)
    terms = [t for t in terms if t.weight > WEIGHT_CUTOFF]
    total = sum(t.weight for t in terms)
    terms = [PhaseDampingTerm(t.weight / total, t.post, t.pre) for t in terms]
    return PhaseDampingDecomposition(lam=lam, terms=tuple(terms), source_state=r)


@dataclass(frozen=True)
class DecompositionReport:
    recomposition_error: float
    trace_condition_error: float
    weight_sum_error: float
    n_terms: int
    passed: bool


def verify_decomposition(
    d: PhaseDampingDecomposition,
    phi: UnitalQubitChannel,
    recomposition_tol: float = 1e-10,
    trace_tol: float = 1e-10,
    weight_tol: float = 1e-12,
) -> DecompositionReport:
    """Machine check of the three decomposition invariants."""
    ws_err = abs(sum(t.weight for t in d.terms) - 1.0)
    rec_err = max(np.max(np.abs(d.apply(b) - phi.apply(b))) for b in _QUBIT_BASIS)
    r = d.source_state
    tc_err = max(abs(np.trace(SIGMA_Z @ t.pre @ r @ t.pre.conj().T).real) for t in d.terms)
    return DecompositionReport(
        recomposition_error=float(rec_err),
        trace_condition_error=float(tc_err),
        weight_sum_error=float(ws_err),
        n_terms=len(d.terms),
        passed=bool(rec_err <= recomposition_tol and tc_err <= trace_tol and ws_err <= weight_tol),
    )


def decomposition_to_json(d: PhaseDampingDecomposition) -> dict:
    from .channels import matrix_to_json

    return {
        "lambda": d.lam,
        "source_state": matrix_to_json(d.source_state),
        "terms": [
            {"weight": t.weight, "post": matrix_to_json(t.post), "pre": matrix_to_json(t.pre)}
            for t in d.terms
        ],
    }


def decomposition_from_json(obj: dict) -> PhaseDampingDecomposition:
    from .channels import matrix_from_json

    terms = tuple(
        PhaseDampingTerm(float(t["weight"]), matrix_from_json(t["post"]), matrix_from_json(t["pre"]))
        for t in obj["terms"]
    )
    return PhaseDampingDecomposition(
        lam=float(obj["lambda"]),
        terms=terms,
        source_state=matrix_from_json(obj["source_state"]),
    )
