"""Brute-force oracles, kept independent of the reshape/SVD code paths."""

import itertools
import math

import numpy as np
import pytest


def brute_reduced(amplitudes, dims, keep):
    """Reduced density matrix by explicit summation over basis labels."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    drop = [p for p in range(n) if p not in keep]
    labels = list(itertools.product(*[range(d) for d in dims]))
    index = {lab: i for i, lab in enumerate(labels)}
    kept_labels = list(itertools.product(*[range(dims[p]) for p in keep]))
    kidx = {lab: i for i, lab in enumerate(kept_labels)}
    dk = len(kept_labels)
    rho = np.zeros((dk, dk), dtype=complex)
    full = np.outer(amplitudes, np.conj(amplitudes))
    for a in labels:
        for b in labels:
            if all(a[p] == b[p] for p in drop):
                ia = kidx[tuple(a[p] for p in keep)]
                ib = kidx[tuple(b[p] for p in keep)]
                rho[ia, ib] += full[index[a], index[b]]
    return rho


def brute_spectrum(amplitudes, dims, keep):
    return np.sort(np.linalg.eigvalsh(brute_reduced(amplitudes, dims, keep)))[::-1]


def brute_galpha(amplitudes, dims, alpha):
    """GαC over every ordered subset S (each unordered cut counted twice)."""
    n = len(dims)
    logs = []
    for k in range(1, n):
        for S in itertools.combinations(range(n), k):
            lam = brute_spectrum(amplitudes, dims, S)
            lam = lam[lam > 1e-12]
            v = np.sum(lam**alpha) - 1
            if v <= 1e-12:
                return 0.0
            logs.append(math.log(v))
    return math.exp(sum(logs) / len(logs))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
