"""Channel performance measures: maximal output p-norm, minimal output
entropy, and the Holevo quantity.

Unital qubit channels admit closed forms through their dominant
standard-form factor; everything else runs through multi-start direct
search over pure inputs. Optimizer outputs are certified lower bounds for
suprema (upper bounds for infima), never exact values; the verification
module cross-checks them against the closed forms and independent
representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import Channel, KrausChannel, UnitalQubitChannel, kraus_from_transfer
from .linalg import as_rng, assert_density_matrix, binary_entropy, state_from_bloch
from .optimize import (
    channel_outputs,
    entropy_from_eigvals,
    kraus_stack,
    maximize_over_pure_states,
    psd_eigvals,
    schatten_from_eigvals,
)

# rng stream tags so the measures draw decorrelated starts from one seed
_TAG_NU = 11
_TAG_SMIN = 22
_TAG_HOLEVO = 33
_TAG_OPWSW = 44


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 32
    max_iters: int = 2000
    tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


DEFAULT_SETTINGS = OptimizerSettings()


@dataclass(frozen=True)
class Ensemble:
    """Weighted collection of input states with weights summing to one."""

    weights: tuple[float, ...]
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.states) or not self.states:
            raise ValueError("ensemble needs matching nonempty weights and states")
        if any(w <= 0 for w in self.weights):
            raise ValueError("ensemble weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("ensemble weights must sum to 1")
        dims = {s.shape for s in self.states}
        if len(dims) != 1:
            raise ValueError("ensemble states must share a dimension")
        for s in self.states:
            assert_density_matrix(s, "ensemble state")

    def average_state(self) -> np.ndarray:
        return sum(w * s for w, s in zip(self.weights, self.states))


def m_p(x: float, p: float) -> float:
    """[( (1+x)/2 )^p + ( (1-x)/2 )^p]^(1/p); the output p-norm of a qubit
    state with Bloch length |x|."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if abs(x) > 1 + 1e-12:
        raise ValueError(f"x must be in [-1, 1], got {x}")
    x = min(max(x, -1.0), 1.0)
    return float((((1 + x) / 2) ** p + ((1 - x) / 2) ** p) ** (1.0 / p))


def dominant_contraction(phi: UnitalQubitChannel) -> float:
    """Largest singular value of the Bloch action; the standard-form lambda_3."""
    return float(np.linalg.svd(phi.t, compute_uv=False)[0])


def nu_p_closed_form(phi: UnitalQubitChannel, p: float) -> float:
    """Maximal output p-norm of a unital qubit channel, m_p(lambda_3)."""
    return m_p(dominant_contraction(phi), p)


def min_entropy_closed_form(phi: UnitalQubitChannel) -> float:
    """Minimal output entropy of a unital qubit channel, in nats."""
    lam = dominant_contraction(phi)
    return binary_entropy((1 + lam) / 2)


def nu_p_argmax_state(phi: UnitalQubitChannel) -> np.ndarray:
    """A pure input whose output has the maximal Bloch length lambda_3."""
    _, _, vt = np.linalg.svd(phi.t)
    return state_from_bloch(vt[0, :])


def _as_kraus(ch: Channel) -> KrausChannel:
    if isinstance(ch, UnitalQubitChannel):
        return kraus_from_transfer(ch)
    return ch


class MeasureResult(NamedTuple):
    value: float
    state: np.ndarray


def nu_p_numeric(ch: Channel, p: float, settings: OptimizerSettings | None = None) -> MeasureResult:
    """Multi-start maximization of the output p-norm over pure inputs.

    Pure inputs suffice: the p-norm is convex, so mixing inputs can only
    lower the output norm. The returned value is a certified lower bound on
    the supremum.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    settings = settings or DEFAULT_SETTINGS
    ch = _as_kraus(ch)
    ops = kraus_stack(ch.kraus)
    rng = as_rng([settings.seed, _TAG_NU])

    def objective(vecs):
        return schatten_from_eigvals(psd_eigvals(channel_outputs(ops, vecs)), p)

    value, vec = maximize_over_pure_states(objective, ch.in_dim, settings, rng)
    return MeasureResult(value, np.outer(vec, vec.conj()))


def s_min(
    ch: Channel,
    settings: OptimizerSettings | None = None,
    check_derivative: bool = False,
) -> MeasureResult:
    """Multi-start minimization of the output entropy over pure inputs (nats).

    With check_derivative the result is cross-checked against the one-sided
    p-derivative of the maximal p-norm at p = 1, which must equal the
    negative minimal entropy within 1e-3.
    """
    settings = settings or DEFAULT_SETTINGS
    ch = _as_kraus(ch)
    ops = kraus_stack(ch.kraus)
    rng = as_rng([settings.seed, _TAG_SMIN])

    def objective(vecs):
        return -entropy_from_eigvals(psd_eigvals(channel_outputs(ops, vecs)))

    value, vec = maximize_over_pure_states(objective, ch.in_dim, settings, rng)
    result = MeasureResult(-value, np.outer(vec, vec.conj()))
    if check_derivative:
        h = 1e-5
        nu = nu_p_numeric(ch, 1 + h, settings).value
        fd = (nu - 1.0) / h
        if abs(fd + result.value) > 1e-3:
            raise RuntimeError(
                f"p-norm derivative check failed: d/dp nu_p at 1 is {fd:.6f}, "
                f"-S_min is {-result.value:.6f}"
            )
    return result


class HolevoResult(NamedTuple):
    value: float
    ensemble: Ensemble


def holevo_unital_qubit(phi: UnitalQubitChannel, settings: OptimizerSettings | None = None) -> HolevoResult:
    """Holevo quantity of a unital qubit channel: log 2 - S_min, in nats.

    Also returns the achieving two-state ensemble, the entropy-minimizing
    pure input paired with its Bloch antipode at equal weight.
    """
    settings = settings or DEFAULT_SETTINGS
    ent, state = s_min(phi, settings)
    antipode = np.eye(2, dtype=complex) - state
    ensemble = Ensemble(weights=(0.5, 0.5), states=(state, antipode))
    return HolevoResult(float(np.log(2) - ent), ensemble)


def holevo_ensemble_opt(
    ch: Channel,
    settings: OptimizerSettings | None = None,
    max_states: int | None = None,
) -> HolevoResult:
    """Maximize the ensemble output-entropy gap over pure-state ensembles.

    Ensembles run over at most in_dim^2 pure states (the standard support
    bound; configurable via max_states). The value is a certified lower
    bound on the Holevo quantity.
    """
    settings = settings or DEFAULT_SETTINGS
    ch = _as_kraus(ch)
    d = ch.in_dim
    if d > 4:
        raise ValueError(f"ensemble optimization is desk scale, input dimension {d} > 4")
    m = max_states or d * d
    ops = kraus_stack(ch.kraus)
    rng = as_rng([settings.seed, _TAG_HOLEVO])
    from .optimize import direct_search

    def decode(params):
        states = params[:, : 2 * m * d].reshape(-1, m, 2 * d)
        v = states[..., :d] + 1j * states[..., d:]
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
        logits = np.clip(params[:, 2 * m * d :], -30.0, 30.0)
        e = np.exp(logits - logits.max(axis=1, keepdims=True))
        probs = e / e.sum(axis=1, keepdims=True)
        return v, probs

    def project(params):
        params = params.copy()
        states = params[:, : 2 * m * d].reshape(-1, m, 2 * d)
        norms = np.sqrt(np.sum(states**2, axis=-1, keepdims=True))
        params[:, : 2 * m * d] = (states / norms).reshape(params.shape[0], -1)
        params[:, 2 * m * d :] = np.clip(params[:, 2 * m * d :], -30.0, 30.0)
        return params

    def objective(params):
        v, probs = decode(params)
        w = np.einsum("mab,rkb->rkma", ops, v)
        outs = np.einsum("rkma,rkmb->rkab", w, w.conj())
        s_each = entropy_from_eigvals(psd_eigvals(outs))
        avg = np.einsum("rk,rkab->rab", probs, outs)
        s_avg = entropy_from_eigvals(psd_eigvals(avg))
        return s_avg - np.sum(probs * s_each, axis=1)

    starts = rng.standard_normal((settings.restarts, 2 * m * d + m))
    value, best = direct_search(objective, starts, settings.max_iters, settings.tolerance, rng, project=project)
    v, probs = decode(best[None, :])
    v, probs = v[0], probs[0]
    keep = probs > 1e-8
    probs = probs[keep] / probs[keep].sum()
    states = tuple(np.outer(x, x.conj()) for x in v[keep])
    return HolevoResult(value, Ensemble(weights=tuple(float(x) for x in probs), states=states))


def opwsw_divergence_radius(
    ch: Channel,
    candidate_avg,
    settings: OptimizerSettings | None = None,
) -> float:
    """Maximal output relative entropy against the image of a candidate
    average input, sup over pure inputs of S(ch(omega) | ch(candidate)).

    At the optimal average input this equals the Holevo quantity; at other
    candidates it can only be larger, which is what makes it usable both as
    an upper-bound certificate and as a check that the maximally mixed state
    is optimal for unital qubit channels. Returns inf when some output
    escapes the support of ch(candidate)."""
    settings = settings or DEFAULT_SETTINGS
    ch = _as_kraus(ch)
    candidate_avg = assert_density_matrix(candidate_avg, "candidate_avg")
    if candidate_avg.shape[0] != ch.in_dim:
        raise ValueError("candidate state dimension does not match the channel input")
    sigma = ch.apply(candidate_avg)
    w0, v0 = np.linalg.eigh(sigma)
    support = w0 > 1e-12
    log_sigma = (v0[:, support] * np.log(w0[support])) @ v0[:, support].conj().T
    null_proj = v0[:, ~support] @ v0[:, ~support].conj().T if (~support).any() else None
    ops = kraus_stack(ch.kraus)
    rng = as_rng([settings.seed, _TAG_OPWSW])

    def objective(vecs):
        outs = channel_outputs(ops, vecs)
        vals = -entropy_from_eigvals(psd_eigvals(outs))
        vals = vals - np.einsum("rab,ba->r", outs, log_sigma).real
        if null_proj is not None:
            leak = np.einsum("rab,ba->r", outs, null_proj).real
            vals = np.where(leak > 1e-10, np.inf, vals)
        return vals

    value, _ = maximize_over_pure_states(objective, ch.in_dim, settings, rng)
    return float(max(value, 0.0))
