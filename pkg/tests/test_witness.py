import numpy as np
import pytest

import htgd.operators as ops
from htgd.signals import ProblemDims, random_model
from htgd.witness import factor_witness_ca, factor_witness_general


def weighted_signal(model, dims):
    # true sinusoid extension: for even N the padded slot is the model's own
    # next sample, which is what the witness lift reproduces
    steer = np.exp(-2j * np.pi * np.outer(np.arange(dims.full_N), model.freqs))
    x_full = steer @ model.coefficients()
    w = ops.weight_vector(dims.full_N).omega
    return w[:, None] * x_full


@pytest.mark.parametrize("N,L,K", [(15, 1, 2), (21, 3, 3), (16, 2, 2)])
def test_general_witness_reproduces_lifted_signal(N, L, K):
    dims = ProblemDims(N=N, L=L, K=K, M=N)
    model = random_model(dims, min_sep=0.05, seed=N + L)
    y = weighted_signal(model, dims)
    fw = factor_witness_general(model, dims)
    scale = np.linalg.norm(y)
    for l in range(L):
        lifted = fw.z2[l] @ fw.z1[l].conj().T
        np.testing.assert_allclose(lifted, ops.g_apply(y[:, l]), atol=1e-8 * scale)


def test_general_witness_balances_channel_energy():
    # z1 carries |S|/sqrt(p), z2 carries sqrt(p): columns multiply back to |S|
    dims = ProblemDims(N=15, L=4, K=2, M=15)
    model = random_model(dims, min_sep=0.05, seed=5)
    fw = factor_witness_general(model, dims)
    S = model.coefficients()
    p = np.linalg.norm(S, axis=1) / np.sqrt(dims.L)
    for l in range(dims.L):
        np.testing.assert_allclose(np.abs(fw.z1[l][0]) * np.abs(fw.z2[l][0]),
                                   np.abs(S[:, l]), atol=1e-12)
        np.testing.assert_allclose(np.abs(fw.z2[l][0]), np.sqrt(p), atol=1e-12)


@pytest.mark.parametrize("N,L,K", [(15, 1, 2), (21, 3, 3), (16, 2, 2)])
def test_ca_witness_reproduces_lifted_signal(N, L, K):
    dims = ProblemDims(N=N, L=L, K=K, M=N)
    model = random_model(dims, min_sep=0.05, is_ca=True, seed=N + L + 9)
    y = weighted_signal(model, dims)
    fw = factor_witness_ca(model, dims)
    scale = np.linalg.norm(y)
    for l in range(L):
        np.testing.assert_allclose(fw.z[l] @ fw.z[l].T, ops.g_apply(y[:, l]),
                                   atol=1e-8 * scale)


def test_ca_witness_shares_gram_across_channels():
    # z_l z_l^H is the same Toeplitz matrix for every channel
    dims = ProblemDims(N=21, L=3, K=2, M=21)
    model = random_model(dims, min_sep=0.05, is_ca=True, seed=33)
    fw = factor_witness_ca(model, dims)
    G0 = fw.z[0] @ fw.z[0].conj().T
    for l in range(1, dims.L):
        np.testing.assert_allclose(fw.z[l] @ fw.z[l].conj().T, G0, atol=1e-10)
    np.testing.assert_allclose(G0, ops.w_apply(ops.w_adjoint(G0)), atol=1e-10)


def test_ca_witness_rejects_general_model():
    dims = ProblemDims(N=15, L=2, K=2, M=15)
    model = random_model(dims, min_sep=0.05, is_ca=False, seed=77)
    with pytest.raises(ValueError, match="constant-amplitude"):
        factor_witness_ca(model, dims)
