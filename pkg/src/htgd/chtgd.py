"""Single-factor gradient solver for constant-amplitude channels.

When every channel shares the amplitudes b_k, the weighted Hankel lift
of channel l admits a complex symmetric factorisation Z^l Z^{l,T} whose
Gram matrix Z^l Z^{l,H} is one common Toeplitz matrix for all channels.
The objective couples channels through that shared Gram instead of a
second factor:

    sum_l [ (1/4p) || P_mask(G*(Z^l Z^{l,T}) - y_l) ||^2
            + 1/4 || (I - G G*)(Z^l Z^{l,T}) ||_F^2 ]
    + 1/4 || (I - W W*)(Z^1 Z^{1,H}) ||_F^2
    + 1/4 sum_{l >= 2} || Z^1 Z^{1,H} - Z^l Z^{l,H} ||_F^2

with channel 1 anchoring the Toeplitz structure penalty.  Evaluation and
gradients use the same factored fast paths as the two-factor solver; the
gradient is again the conjugate Wirtinger derivative, so directional
derivatives equal 2 Re<grad, D>.

State layout: one complex array of shape (L, n, K).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .descent import SolverConfig, SolverReport, run_descent
from .lowrank import takagi_lift_truncated, takagi_truncated
from .mhtgd import _prepare_observed
from .retrieval import nmse
from .signals import MultichannelSignal, ProblemDims, SamplingMask

__all__ = [
    "FactorSetC",
    "takagi_truncated",
    "spectral_init_ca",
    "objective_g",
    "grad_g",
    "solve_chtgd",
]


@dataclass(frozen=True)
class FactorSetC:
    """Per-channel symmetric factors, shape (L, n, K)."""

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        object.__setattr__(self, "z", z)
        if z.ndim != 3:
            raise ValueError(f"factors must have shape (L, n, K), got {z.shape}")


def _lifts_from_transform(FZ, n, w):
    """h_l = G*(z_l z_l^T) and hw = W*(z_1 z_1^H) from one cached transform."""
    N = 2 * n - 1
    s_h = (FZ * FZ).sum(axis=-1)
    s_w = (FZ[0] * FZ[0].conj()).sum(axis=-1)
    out = np.fft.ifft(np.concatenate([s_h, s_w[None]], axis=0), axis=-1)
    h = out[:-1, :N] / w
    hw = out[-1, (np.arange(N) - (n - 1)) % FZ.shape[-2]] / w
    return h, hw


def _objective_stacked(z, yT, maskb, p):
    L, n, _ = z.shape
    P = ops.fft_length(n)
    w = ops.weight_vector(2 * n - 1).omega
    FZ = np.fft.fft(z, n=P, axis=-2)
    h, hw = _lifts_from_transform(FZ, n, w)
    resid = np.where(maskb, h - yT, 0.0)
    t1 = np.sum(np.abs(resid) ** 2) / (4.0 * p)
    gram = np.swapaxes(z, -2, -1).conj() @ z
    lr_h = np.sum((gram * gram).real, axis=(-2, -1))
    t2 = 0.25 * np.sum(np.maximum(lr_h - np.sum(np.abs(h) ** 2, axis=-1), 0.0))
    lr_w = float(np.sum(np.abs(gram[0]) ** 2))
    t3 = 0.25 * max(lr_w - float(np.sum(np.abs(hw) ** 2)), 0.0)
    t4 = 0.0
    if L > 1:
        norms = np.sum(np.abs(gram) ** 2, axis=(1, 2))
        cross = z[0].conj().T @ z[1:]
        cross_norms = np.sum(np.abs(cross) ** 2, axis=(1, 2))
        t4 = 0.25 * np.sum(np.maximum(norms[0] + norms[1:] - 2.0 * cross_norms, 0.0))
    return float(t1 + t2 + t3 + t4)


def _grad_and_lift_stacked(z, yT, maskb, p, w):
    L, n, K = z.shape
    P = ops.fft_length(n)
    FZ = np.fft.fft(z, n=P, axis=-2)
    h, hw = _lifts_from_transform(FZ, n, w)
    v = np.where(maskb, h - yT, 0.0) / p - h
    Fvw = np.fft.fft(np.concatenate([v / w, (hw / w)[None]], axis=0), n=P, axis=-1)
    Fv = Fvw[:L, :, None]
    Fw = Fvw[L, :, None]
    mixed = np.fft.ifft(np.concatenate(
        [Fv * FZ.conj(), (Fw * FZ[0])[None]], axis=0), axis=-2)
    gv_zc = mixed[:L, :n, :]  # G(v_l) conj(z_l)
    ww_z1 = mixed[L, n - 1:2 * n - 1, :]
    gram = np.swapaxes(z, -2, -1).conj() @ z  # z_l^H z_l
    grad = np.empty_like(z)
    grad[0] = gv_zc[0] - ww_z1 + z[0] @ (gram[0].conj() + L * gram[0])
    if L > 1:
        Zr = z[1:].transpose(1, 0, 2).reshape(n, (L - 1) * K)
        # sum_q z^q (z^{q,H} z^1) over the non-anchor channels
        grad[0] -= Zr @ (Zr.conj().T @ z[0])
        anchor = z[0].conj().T @ z[1:]  # z^{1,H} z^l
        grad[1:] = (gv_zc[1:]
                    + z[1:] @ (gram[1:].conj() + gram[1:])
                    - z[0] @ anchor)
    grad *= 0.5
    return grad, h


def objective_g(factors: FactorSetC, y: np.ndarray, mask: SamplingMask,
                dims: ProblemDims) -> float:
    """Objective value; ``y`` is the weighted signal, (full_N, L)."""
    yT, maskb = _prepare_observed(y, mask, dims)
    return _objective_stacked(factors.z, yT, maskb, dims.p)


def grad_g(factors: FactorSetC, y: np.ndarray, mask: SamplingMask,
           dims: ProblemDims) -> FactorSetC:
    """Conjugate Wirtinger gradient of :func:`objective_g` at ``factors``."""
    yT, maskb = _prepare_observed(y, mask, dims)
    w = ops.weight_vector(dims.full_N).omega
    grad, _ = _grad_and_lift_stacked(factors.z, yT, maskb, dims.p, w)
    return FactorSetC(z=grad)


def spectral_init_ca(y: np.ndarray, mask: SamplingMask, dims: ProblemDims,
                     seed: int = 0) -> FactorSetC:
    """Rank-K truncated Takagi factors of p^{-1} G(P_mask y_l) per channel."""
    yT, maskb = _prepare_observed(y, mask, dims)
    z = np.zeros((dims.L, dims.n, dims.K), dtype=complex)
    for l in range(dims.L):
        U, s = takagi_lift_truncated(yT[l] / dims.p, dims.K, seed=(seed, l))
        z[l] = U * np.sqrt(s)
    return FactorSetC(z=z)


def solve_chtgd(observations: MultichannelSignal, mask: SamplingMask,
                config: SolverConfig | None = None,
                ground_truth: MultichannelSignal | None = None) -> SolverReport:
    """Recover a constant-amplitude signal from masked observations.

    Accepts any observations; convergence is only expected when the
    underlying channels genuinely share amplitudes.
    """
    cfg = config if config is not None else SolverConfig()
    dims = observations.dims
    if mask.M != dims.M:
        raise ValueError(f"mask has {mask.M} indices, dims expects M={dims.M}")
    w = ops.weight_vector(dims.full_N).omega
    x_int = np.zeros((dims.L, dims.full_N), dtype=complex)
    x_int[:, :dims.N] = observations.data.T
    y = (w * x_int).T
    yT, maskb = _prepare_observed(y, mask, dims)
    init = spectral_init_ca(y, mask, dims, seed=cfg.seed)
    p = dims.p

    def objective(state):
        return _objective_stacked(state, yT, maskb, p)

    def grad_and_lift(state):
        return _grad_and_lift_stacked(state, yT, maskb, p, w)

    out = run_descent(init.z, objective, grad_and_lift, lambda h: h / w, cfg)
    x_hat = out.x_hat.T[:dims.N].copy()
    report = SolverReport(
        x_hat=x_hat,
        iterations=out.iterations,
        stop_reason=out.stop_reason,
        objective_trace=out.objective_trace,
        iter_seconds=out.iter_seconds,
        total_seconds=out.total_seconds,
    )
    if ground_truth is not None:
        report.nmse = nmse(x_hat, ground_truth.data)
    return report
