"""Dense complex linear algebra for states on small Hilbert spaces.

States are plain complex numpy arrays (density matrices). Tensor factors
combine in numpy's Kronecker ordering, so a state on C^K (x) C^2 stores the
qubit as the second (fastest) index. All entropic quantities are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
I2 = np.eye(2, dtype=complex)

# Validation tolerances. Eigenvalues in [-PSD_ATOL, 0) are treated as
# rounding noise and clamped to 0; anything more negative rejects the input.
HERM_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10

# How random states are drawn; embedded in report metadata for reproducibility.
STATE_ENSEMBLE = "pure: normalized complex Gaussian; mixed: U diag(Dirichlet) U+ with Haar U"


def as_matrix(a) -> np.ndarray:
    """Coerce input to a square complex 2-D array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m: np.ndarray, atol: float = HERM_ATOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def assert_density_matrix(rho, name: str = "rho") -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array."""
    rho = as_matrix(rho)
    if not is_hermitian(rho):
        raise ValueError(f"{name} is not Hermitian within {HERM_ATOL}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"{name} has trace {tr}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -PSD_ATOL:
        raise ValueError(f"{name} has eigenvalue {w[0]} below -{PSD_ATOL}")
    return rho


def clamp_spectrum(w: np.ndarray, floor: float = -PSD_ATOL, name: str = "matrix") -> np.ndarray:
    """Zero small negative eigenvalues; reject ones below the floor."""
    w = np.asarray(w, dtype=float)
    if w.min(initial=0.0) < floor:
        raise ValueError(f"{name} has eigenvalue {w.min()} below {floor}")
    return np.maximum(w, 0.0)


def tensor_product(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices."""
    if not mats:
        raise ValueError("tensor_product needs at least one factor")
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced state of a bipartite density matrix.

    dims = (d1, d2) are the factor dimensions; keep = 0 traces out the second
    factor, keep = 1 traces out the first.
    """
    rho = assert_density_matrix(rho)
    d1, d2 = int(dims[0]), int(dims[1])
    if d1 * d2 != rho.shape[0]:
        raise ValueError(f"dims {dims} do not factor dimension {rho.shape[0]}")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    r = rho.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijik->jk", r)


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors (columns) of a Hermitian matrix.

    Eigenvector phases are fixed so the first nonzero component of each
    column is real positive, which makes diagonalizing unitaries reproducible.
    """
    m = as_matrix(m)
    if not is_hermitian(m):
        raise ValueError("input is not Hermitian")
    w, v = np.linalg.eigh(m)
    w, v = w[::-1], v[:, ::-1]
    for j in range(v.shape[1]):
        col = v[:, j]
        idx = np.argmax(np.abs(col) > 1e-12)
        pivot = col[idx]
        if abs(pivot) > 1e-12:
            v[:, j] = col * (pivot.conjugate() / abs(pivot))
    return w, v


def schatten_p_norm(rho, p: float) -> float:
    """(Tr rho^p)^(1/p) for a positive semidefinite matrix, p >= 1."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    rho = as_matrix(rho)
    if not is_hermitian(rho):
        raise ValueError("input is not Hermitian")
    w = clamp_spectrum(np.linalg.eigvalsh(rho))
    return float(np.sum(w**p) ** (1.0 / p))


def von_neumann_entropy(rho) -> float:
    """-Tr rho log rho in nats, with 0 log 0 = 0."""
    rho = assert_density_matrix(rho)
    w = clamp_spectrum(np.linalg.eigvalsh(rho))
    nz = w[w > 0]
    return float(-np.sum(nz * np.log(nz)))


def binary_entropy(q: float) -> float:
    """Entropy of (q, 1-q) in nats."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    s = 0.0
    for x in (q, 1.0 - q):
        if x > 0:
            s -= x * np.log(x)
    return float(s)


def relative_entropy(rho, omega) -> float:
    """Tr rho (log rho - log omega) in nats.

    Returns +inf when rho has support outside the support of omega
    (omega eigenvalues below 1e-12 carrying rho weight above 1e-10).
    """
    rho = assert_density_matrix(rho, "rho")
    omega = assert_density_matrix(omega, "omega")
    if rho.shape != omega.shape:
        raise ValueError("rho and omega must have the same dimension")
    wr = clamp_spectrum(np.linalg.eigvalsh(rho))
    nz = wr[wr > 0]
    tr_rho_log_rho = float(np.sum(nz * np.log(nz)))
    wo, vo = np.linalg.eigh(omega)
    wo = clamp_spectrum(wo, name="omega")
    # weight of rho on each eigenvector of omega
    q = np.einsum("ij,jk,ki->i", vo.conj().T, rho, vo).real
    out = tr_rho_log_rho
    for weight, eig in zip(q, wo):
        if eig <= 1e-12:
            if weight > 1e-10:
                return float("inf")
            continue
        out -= weight * np.log(eig)
    return max(out, 0.0)


@dataclass(frozen=True)
class PauliBlocks:
    """Block coefficients of a state on C^K (x) C^2.

    rho = x (x) I + y1 (x) sx + y2 (x) sy + y3 (x) sz, i.e. in qubit-indexed
    blocks rho = [[x + y3, y1 - i y2], [y1 + i y2, x - y3]].
    """

    x: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    y3: np.ndarray

    @property
    def k(self) -> int:
        return self.x.shape[0]

    def assemble(self) -> np.ndarray:
        """Rebuild the full 2K x 2K density matrix."""
        return (
            tensor_product(self.x, I2)
            + tensor_product(self.y1, SIGMA_X)
            + tensor_product(self.y2, SIGMA_Y)
            + tensor_product(self.y3, SIGMA_Z)
        )


def pauli_block_decompose(rho) -> PauliBlocks:
    """Split a state on C^K (x) C^2 into its qubit Pauli blocks."""
    rho = assert_density_matrix(rho)
    d = rho.shape[0]
    if d % 2 != 0:
        raise ValueError(f"dimension {d} is odd, expected K x 2")
    k = d // 2
    r = rho.reshape(k, 2, k, 2)
    b00, b01 = r[:, 0, :, 0], r[:, 0, :, 1]
    b10, b11 = r[:, 1, :, 0], r[:, 1, :, 1]
    return PauliBlocks(
        x=(b00 + b11) / 2,
        y1=(b01 + b10) / 2,
        y2=1j * (b01 - b10) / 2,
        y3=(b00 - b11) / 2,
    )


def bloch_vector(rho) -> np.ndarray:
    """(Tr sx rho, Tr sy rho, Tr sz rho) of a qubit state."""
    rho = as_matrix(rho)
    if rho.shape != (2, 2):
        raise ValueError("bloch_vector expects a 2 x 2 matrix")
    return np.array([np.trace(s @ rho).real for s in PAULIS])


def state_from_bloch(w) -> np.ndarray:
    """Qubit state (I + w . sigma) / 2 from a Bloch vector of length <= 1."""
    w = np.asarray(w, dtype=float)
    if w.shape != (3,):
        raise ValueError("Bloch vector must have 3 components")
    if np.linalg.norm(w) > 1 + 1e-10:
        raise ValueError("Bloch vector must have length <= 1")
    return (I2 + w[0] * SIGMA_X + w[1] * SIGMA_Y + w[2] * SIGMA_Z) / 2


def as_rng(seed) -> np.random.Generator:
    """Pass through Generators, otherwise seed a fresh one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    rng = as_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(dim: int, seed=None) -> np.ndarray:
    """Haar-random pure state as a density matrix."""
    v = random_state_vector(dim, seed)
    return np.outer(v, v.conj())


def random_state_vector(dim: int, seed=None) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    rng = as_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random mixed state U diag(Dirichlet) U+ of the given rank."""
    rng = as_rng(seed)
    if rank is None:
        rank = dim
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    probs = np.zeros(dim)
    probs[:rank] = rng.dirichlet(np.ones(rank))
    u = random_unitary(dim, rng)
    return (u * probs) @ u.conj().T
