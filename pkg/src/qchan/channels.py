"""Channel representations: Kraus form, Pauli-transfer form, named families.

A unital qubit channel is stored as the real 3 x 3 matrix acting on Bloch
vectors in the (sx, sy, sz) basis; the unit-trace component is implicit.
General channels are stored as Kraus operator lists, validated for trace
preservation and complete positivity at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    HERM_ATOL,
    I2,
    PAULIS,
    as_matrix,
    as_rng,
    assert_density_matrix,
    bloch_vector,
    pauli_block_decompose,
    random_unitary,
    state_from_bloch,
    tensor_product,
)

KRAUS_ATOL = 1e-10   # completeness: sum K+ K = I
CHOI_ATOL = 1e-10    # complete positivity: Choi eigenvalues >= -CHOI_ATOL
KRAUS_KEEP = 1e-12   # Choi eigenvalues below this are dropped when extracting Kraus ops


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KrausChannel:
    """Channel as a tuple of Kraus operators (out_dim x in_dim each)."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(_frozen(np.asarray(k, dtype=complex)) for k in self.kraus)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must share a single 2-D shape")
        object.__setattr__(self, "kraus", ops)
        comp = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(comp - np.eye(self.in_dim)))
        if err > KRAUS_ATOL:
            raise ValueError(f"Kraus completeness violated by {err:.3e}")
        w = np.linalg.eigvalsh(self.choi())
        if w[0] < -CHOI_ATOL:
            raise ValueError(f"Choi matrix has eigenvalue {w[0]:.3e}, not CP")

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    @classmethod
    def identity(cls, dim: int = 2) -> "KrausChannel":
        return cls((np.eye(dim, dtype=complex),))

    @classmethod
    def from_unitary(cls, u) -> "KrausChannel":
        u = as_matrix(u)
        if np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) > HERM_ATOL:
            raise ValueError("matrix is not unitary")
        return cls((u,))

    def choi(self) -> np.ndarray:
        """Unnormalized Choi matrix sum_ij |i><j| (x) Phi(|i><j|)."""
        d = self.in_dim
        c = np.zeros((d * self.out_dim, d * self.out_dim), dtype=complex)
        for k in self.kraus:
            v = k.T.reshape(-1)  # v[i*out + a] = K[a, i]
            c += np.outer(v, v.conj())
        return c

    def apply(self, rho) -> np.ndarray:
        rho = assert_density_matrix(rho)
        if rho.shape[0] != self.in_dim:
            raise ValueError(f"state dimension {rho.shape[0]} != channel input {self.in_dim}")
        out = sum(k @ rho @ k.conj().T for k in self.kraus)
        return assert_density_matrix(out, "channel output")


@dataclass(frozen=True)
class UnitalQubitChannel:
    """Unital qubit channel as its 3 x 3 Bloch-vector action."""

    t: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.shape != (3, 3):
            raise ValueError(f"transfer matrix must be 3 x 3, got {t.shape}")
        object.__setattr__(self, "t", _frozen(t))
        w = np.linalg.eigvalsh(self.choi())
        if w[0] < -CHOI_ATOL:
            raise ValueError(f"Choi matrix has eigenvalue {w[0]:.3e}, not CP")

    @property
    def in_dim(self) -> int:
        return 2

    @property
    def out_dim(self) -> int:
        return 2

    def apply(self, rho) -> np.ndarray:
        rho = assert_density_matrix(rho)
        if rho.shape != (2, 2):
            raise ValueError("unital qubit channel acts on 2 x 2 states")
        out = state_from_bloch(np.clip(self.t @ bloch_vector(rho), -1.0, 1.0))
        return assert_density_matrix(out, "channel output")

    def apply_matrix(self, m) -> np.ndarray:
        """Linear extension to arbitrary 2 x 2 matrices (used for the Choi matrix)."""
        m = as_matrix(m)
        w = np.array([np.trace(s @ m) for s in PAULIS])
        wt = self.t @ w
        out = np.trace(m) * I2 / 2
        for c, s in zip(wt, PAULIS):
            out = out + c * s / 2
        return out

    def choi(self) -> np.ndarray:
        c = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[i, j] = 1
                c[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = self.apply_matrix(e)
        return c


Channel = KrausChannel | UnitalQubitChannel


def apply(ch: Channel, rho) -> np.ndarray:
    """Apply either channel representation to a state."""
    return ch.apply(rho)


def apply_half_noisy(ch: Channel, rho) -> np.ndarray:
    """Apply identity (x) ch to a state on C^K (x) C^2."""
    rho = assert_density_matrix(rho)
    d = rho.shape[0]
    if d % 2 != 0:
        raise ValueError("state dimension must be even")
    k = d // 2
    if isinstance(ch, UnitalQubitChannel):
        b = pauli_block_decompose(rho)
        ys = np.stack([b.y1, b.y2, b.y3])
        yt = np.einsum("ij,jkl->ikl", ch.t, ys)
        out = tensor_product(b.x, I2)
        for i in range(3):
            out = out + tensor_product(yt[i], PAULIS[i])
        return out
    if ch.in_dim != 2 or ch.out_dim != 2:
        raise ValueError("apply_half_noisy needs a qubit channel")
    r = rho.reshape(k, 2, k, 2)
    ops = np.stack(ch.kraus)
    out = np.einsum("maq,kqlp,mbp->kalb", ops, r, ops.conj(), optimize=True)
    return out.reshape(d, d)


def tensor(a: Channel, b: Channel) -> KrausChannel:
    """Product channel a (x) b with pairwise Kronecker Kraus operators."""
    ka = a.kraus if isinstance(a, KrausChannel) else kraus_from_transfer(a).kraus
    kb = b.kraus if isinstance(b, KrausChannel) else kraus_from_transfer(b).kraus
    return KrausChannel(tuple(np.kron(x, y) for x in ka for y in kb))


def compose(a: Channel, b: Channel):
    """Channel a after b (apply b first)."""
    if isinstance(a, UnitalQubitChannel) and isinstance(b, UnitalQubitChannel):
        return UnitalQubitChannel(a.t @ b.t)
    ka = a.kraus if isinstance(a, KrausChannel) else kraus_from_transfer(a).kraus
    kb = b.kraus if isinstance(b, KrausChannel) else kraus_from_transfer(b).kraus
    if ka[0].shape[1] != kb[0].shape[0]:
        raise ValueError("inner dimensions do not match")
    return KrausChannel(tuple(x @ y for x in ka for y in kb))


def conjugation_channel(u) -> UnitalQubitChannel:
    """Bloch rotation of the map r -> u r u+ for a 2 x 2 unitary u."""
    u = as_matrix(u)
    if u.shape != (2, 2):
        raise ValueError("conjugation unitary must be 2 x 2")
    if np.max(np.abs(u @ u.conj().T - I2)) > 1e-12:
        raise ValueError("matrix is not unitary within 1e-12")
    r = np.empty((3, 3))
    for j, sj in enumerate(PAULIS):
        c = u @ sj @ u.conj().T
        for i, si in enumerate(PAULIS):
            r[i, j] = 0.5 * np.trace(si @ c).real
    return UnitalQubitChannel(r)


def is_completely_positive(lambdas, atol: float = 1e-12) -> bool:
    """Membership of a diagonal Bloch triple in the CP tetrahedron.

    The tetrahedron with corners (1,1,1), (1,-1,-1), (-1,-1,1), (-1,1,-1) is
    the intersection of the half-spaces 1 + l3 >= |l1 + l2| and
    1 - l3 >= |l1 - l2|.
    """
    l1, l2, l3 = (float(x) for x in lambdas)
    return (1 + l3 >= abs(l1 + l2) - atol) and (1 - l3 >= abs(l1 - l2) - atol)


def _diagonal_channel(lambdas, family: str) -> UnitalQubitChannel:
    if not is_completely_positive(lambdas):
        l1, l2, l3 = lambdas
        raise ValueError(
            f"{family}({l1}, {l2}, {l3}) is not completely positive: "
            f"requires 1+l3 >= |l1+l2| (got {1 + l3:.4g} vs {abs(l1 + l2):.4g}) "
            f"and 1-l3 >= |l1-l2| (got {1 - l3:.4g} vs {abs(l1 - l2):.4g})"
        )
    return UnitalQubitChannel(np.diag(lambdas))


def identity() -> UnitalQubitChannel:
    return UnitalQubitChannel(np.eye(3))


def depolarizing(lam: float) -> UnitalQubitChannel:
    """Uniform Bloch contraction by lam; CP for lam in [-1/3, 1]."""
    return _diagonal_channel((lam, lam, lam), "depolarizing")


def phase_damping(lam: float) -> UnitalQubitChannel:
    """Scales off-diagonal entries by lam, fixes the diagonal; lam in [-1, 1]."""
    return _diagonal_channel((lam, lam, 1.0), "phase_damping")


def two_pauli(lam: float) -> UnitalQubitChannel:
    """Diagonal (2 lam - 1, lam, lam); defined for lam in [1/3, 1]."""
    if not (1 / 3 - 1e-12 <= lam <= 1 + 1e-12):
        raise ValueError(f"two_pauli requires lam in [1/3, 1], got {lam}")
    return _diagonal_channel((2 * lam - 1, lam, lam), "two_pauli")


CORNER_TRIPLES = {
    1: lambda lam: (1.0, lam, lam),
    2: lambda lam: (lam, 1.0, lam),
    3: lambda lam: (-1.0, -lam, lam),
    4: lambda lam: (-lam, -1.0, lam),
}


def corner_map(index: int, lam: float) -> UnitalQubitChannel:
    """One of the four extreme maps of the CP cross-section at height lam."""
    if index not in CORNER_TRIPLES:
        raise ValueError(f"corner index must be 1..4, got {index}")
    return _diagonal_channel(CORNER_TRIPLES[index](lam), f"corner_map[{index}]")


def kraus_from_transfer(ch: UnitalQubitChannel) -> KrausChannel:
    """Extract Kraus operators from the Bloch action via the Choi eigensystem."""
    c = ch.choi()
    w, v = np.linalg.eigh(c)
    if w[0] < -CHOI_ATOL:
        raise ValueError(f"Choi matrix has eigenvalue {w[0]:.3e}, not CP")
    ops = []
    for eig, vec in zip(w, v.T):
        if eig <= KRAUS_KEEP:
            continue
        ops.append(np.sqrt(eig) * vec.reshape(2, 2).T)
    return KrausChannel(tuple(ops))


def transfer_from_kraus(ch: KrausChannel) -> np.ndarray:
    """Bloch-action matrix of a qubit Kraus channel (must be unital to be exact)."""
    if ch.in_dim != 2 or ch.out_dim != 2:
        raise ValueError("transfer matrices only exist for qubit channels")
    t = np.empty((3, 3))
    for j, sj in enumerate(PAULIS):
        out = sum(k @ sj @ k.conj().T for k in ch.kraus)
        for i, si in enumerate(PAULIS):
            t[i, j] = 0.5 * np.trace(si @ out).real
    return t


def random_unital_qubit_channel(seed=None) -> UnitalQubitChannel:
    """Random unital qubit channel: uniform CP diagonal triple, Haar rotations."""
    rng = as_rng(seed)
    while True:
        lam = rng.uniform(-1, 1, size=3)
        if is_completely_positive(lam, atol=0.0):
            break
    r_pre = conjugation_channel(random_unitary(2, rng)).t
    r_post = conjugation_channel(random_unitary(2, rng)).t
    return UnitalQubitChannel(r_post @ np.diag(lam) @ r_pre)


def random_kraus_channel(in_dim: int, out_dim: int | None = None, rank: int | None = None, seed=None) -> KrausChannel:
    """Random CPTP map from a Haar-random isometry (Stinespring picture)."""
    rng = as_rng(seed)
    if out_dim is None:
        out_dim = in_dim
    if rank is None:
        rank = in_dim * out_dim
    z = rng.standard_normal((rank * out_dim, in_dim)) + 1j * rng.standard_normal((rank * out_dim, in_dim))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel(tuple(q[i * out_dim : (i + 1) * out_dim, :] for i in range(rank)))


# JSON wire format: {"kind": "kraus" | "unital_qubit", "data": ...} with
# complex entries as [re, im] pairs.

def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(x[0], x[1]) for x in row] for row in data])


def channel_to_json(ch: Channel) -> dict:
    if isinstance(ch, UnitalQubitChannel):
        return {"kind": "unital_qubit", "data": {"transfer": [[float(x) for x in row] for row in ch.t]}}
    return {
        "kind": "kraus",
        "data": {
            "in_dim": ch.in_dim,
            "out_dim": ch.out_dim,
            "operators": [matrix_to_json(k) for k in ch.kraus],
        },
    }


def channel_from_json(obj: dict) -> Channel:
    kind = obj.get("kind")
    if kind == "unital_qubit":
        return UnitalQubitChannel(np.array(obj["data"]["transfer"], dtype=float))
    if kind == "kraus":
        ops = tuple(matrix_from_json(k) for k in obj["data"]["operators"])
        ch = KrausChannel(ops)
        want = (obj["data"].get("out_dim", ch.out_dim), obj["data"].get("in_dim", ch.in_dim))
        if (ch.out_dim, ch.in_dim) != want:
            raise ValueError(f"declared dims {want} do not match operators {(ch.out_dim, ch.in_dim)}")
        return ch
    raise ValueError(f"unknown channel kind {kind!r}")
