"""Derivative-free multi-start search used by the capacity measures.

A batched (1+1) evolution strategy over real parameter vectors: every restart
proposes one Gaussian perturbation per iteration, keeps it if the objective
improves, and adapts its step size. Restarts are vectorized so one numpy call
evaluates the whole population. Results are deterministic functions of
(seed, restarts, max_iters, tolerance); ties are broken by restart index.
"""

from __future__ import annotations

import numpy as np

STEP_INIT = 0.35
STEP_GROW = 1.6
STEP_SHRINK = 0.73
PATTERN_GROW = 2.0
STALL_WINDOW = 150


def direct_search(objective, starts, max_iters, tolerance, rng, project=None, stall_gain=None):
    """Maximize objective over parameter rows; returns (value, best_row).

    objective maps an (R, n) batch to (R,) values; project, if given,
    renormalizes proposal rows before evaluation. Each restart alternates
    Gaussian proposals with doubled repeats of its last accepted direction
    (pattern moves), which speeds travel along curved ridges. A restart
    retires when its step underflows or when a whole stall window passes
    without gaining at least stall_gain (default 10x the tolerance); callers
    chasing a loose check tolerance can pass a larger stall_gain to stop
    the slow tail crawl early.
    """
    x = np.array(starts, dtype=float)
    if project is not None:
        x = project(x)
    fx = np.asarray(objective(x), dtype=float)
    n_restarts = x.shape[0]
    step = np.full(n_restarts, STEP_INIT)
    floor = max(float(tolerance), 1e-8)
    gain_tol = 10.0 * float(tolerance) if stall_gain is None else float(stall_gain)
    direction = np.zeros_like(x)
    has_dir = np.zeros(n_restarts, dtype=bool)
    alive = np.ones(n_restarts, dtype=bool)
    f_mark = fx.copy()
    since_mark = np.zeros(n_restarts, dtype=int)
    for _ in range(max_iters):
        active = alive & (step > floor)
        if not active.any():
            break
        noise = rng.standard_normal(x.shape)
        delta = np.where(has_dir[:, None], PATTERN_GROW * direction, step[:, None] * noise)
        prop = x + delta
        if project is not None:
            prop = project(prop)
        fp = np.asarray(objective(prop), dtype=float)
        accept = (fp > fx) & active
        was_random = ~has_dir
        direction[accept] = prop[accept] - x[accept]
        x[accept] = prop[accept]
        fx[accept] = fp[accept]
        has_dir[accept] = True
        has_dir[~accept] = False
        step[accept & was_random] *= STEP_GROW
        step[~accept & active & was_random] *= STEP_SHRINK
        since_mark[active] += 1
        expired = active & (since_mark >= STALL_WINDOW)
        if expired.any():
            stalled = expired & (fx - f_mark < gain_tol)
            alive[stalled] = False
            f_mark[expired] = fx[expired]
            since_mark[expired] = 0
    best = int(np.argmax(fx))
    return float(fx[best]), x[best]


def encode_states(vecs: np.ndarray) -> np.ndarray:
    """Complex unit vectors (R, d) to real parameter rows (R, 2d)."""
    return np.concatenate([vecs.real, vecs.imag], axis=1)


def decode_states(params: np.ndarray) -> np.ndarray:
    """Real parameter rows to normalized complex vectors."""
    d = params.shape[1] // 2
    v = params[:, :d] + 1j * params[:, d:]
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def normalize_state_params(params: np.ndarray) -> np.ndarray:
    d = params.shape[1] // 2
    norms = np.sqrt(np.sum(params[:, :d] ** 2 + params[:, d:] ** 2, axis=1, keepdims=True))
    return params / norms


def maximize_over_pure_states(state_objective, dim, settings, rng, extra_starts=(), stall_gain=None):
    """Multi-start maximization of a batch objective over pure input vectors.

    state_objective maps (R, dim) complex unit vectors to (R,) values.
    extra_starts rows replace random restarts, letting callers seed the
    search with known candidates.
    """
    n = settings.restarts
    starts = rng.standard_normal((n, 2 * dim))
    for i, v in enumerate(extra_starts):
        if i >= n:
            break
        starts[i] = np.concatenate([np.asarray(v).real, np.asarray(v).imag])
    value, best = direct_search(
        lambda x: state_objective(decode_states(x)),
        starts,
        settings.max_iters,
        settings.tolerance,
        rng,
        project=normalize_state_params,
        stall_gain=stall_gain,
    )
    return value, decode_states(best[None, :])[0]


def kraus_stack(kraus) -> np.ndarray:
    return np.stack([np.asarray(k, dtype=complex) for k in kraus])


def channel_outputs(ops: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Outputs sum_m K_m |v><v| K_m+ for a batch of pure input vectors."""
    w = np.einsum("mab,rb->rma", ops, vecs)
    return np.einsum("rma,rmb->rab", w, w.conj())


def channel_outputs_mixed(ops: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    """Outputs for a batch of density matrices."""
    return np.einsum("mab,rbc,mdc->rad", ops, rhos, ops.conj(), optimize=True)


def psd_eigvals(mats: np.ndarray) -> np.ndarray:
    """Eigenvalues of a batch of PSD Hermitian matrices, clamped at zero."""
    if mats.shape[-1] == 2:
        tr = (mats[..., 0, 0] + mats[..., 1, 1]).real
        det = (mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]).real
        mid = tr / 2
        disc = np.sqrt(np.maximum(mid**2 - det, 0.0))
        w = np.stack([mid - disc, mid + disc], axis=-1)
    else:
        w = np.linalg.eigvalsh(mats)
    return np.clip(w, 0.0, None)


def entropy_from_eigvals(w: np.ndarray) -> np.ndarray:
    """Batched -sum w log w over the last axis, nats."""
    safe = np.where(w > 0, w, 1.0)
    return -np.sum(np.where(w > 0, w * np.log(safe), 0.0), axis=-1)


def schatten_from_eigvals(w: np.ndarray, p: float) -> np.ndarray:
    return np.sum(w**p, axis=-1) ** (1.0 / p)
