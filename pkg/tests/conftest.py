"""Shared fixtures and oracles used across the test suite."""

import numpy as np
import pytest
import scipy.sparse as sp

from peergrade import SoanGraph, from_matrices


def random_graph(rng, n=None, m=None, max_nodes=8, social_density=0.4,
                 own_density=0.3, assess_density=0.5):
    """Random SoanGraph with strictly positive weights (no explicit zeros)."""
    n = n if n is not None else int(rng.integers(1, max_nodes + 1))
    m = m if m is not None else int(rng.integers(1, max_nodes + 1))

    S = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.shape[0]) < social_density
    weights = rng.uniform(0.1, 1.0, size=int(keep.sum()))
    S[iu[keep], ju[keep]] = weights
    S[ju[keep], iu[keep]] = weights

    O = np.where(rng.random((n, m)) < own_density, rng.uniform(0.1, 1.0, (n, m)), 0.0)
    A = np.where(rng.random((n, m)) < assess_density, rng.uniform(0.1, 1.0, (n, m)), 0.0)

    user_ids = tuple(f"u{i:03d}" for i in range(n))
    item_ids = tuple(f"i{i:03d}" for i in range(m))
    return from_matrices(sp.csr_matrix(S), sp.csr_matrix(O), sp.csr_matrix(A),
                         user_ids, item_ids)


def dense_propagation(graph: SoanGraph):
    """Brute-force dense construction of the normalized operator.

    Independent of the sparse path: assembles the blocks with plain numpy,
    counts stored entries from boolean patterns, divides row-wise.
    """
    n, m = graph.n, graph.m
    S = graph.S.toarray()
    O = graph.O.toarray()
    A = graph.A.toarray()

    def pattern(mat):
        coo = mat.tocoo()
        pat = np.zeros(mat.shape, dtype=bool)
        pat[coo.row, coo.col] = True
        return pat

    P = O + A
    P_pat = pattern(graph.O) | pattern(graph.A)
    size = n + m
    M = np.zeros((size, size))
    M[:n, :n] = S
    M[:n, n:] = P
    M[n:, :n] = P.T
    M += np.eye(size)
    M_pat = np.zeros((size, size), dtype=bool)
    M_pat[:n, :n] = pattern(graph.S)
    M_pat[:n, n:] = P_pat
    M_pat[n:, :n] = P_pat.T
    M_pat |= np.eye(size, dtype=bool)
    degrees = M_pat.sum(axis=1)
    return M / degrees[:, None], degrees


@pytest.fixture(scope="session")
def rng_session():
    return np.random.default_rng(20240601)
