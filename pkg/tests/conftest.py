"""Shared helpers for the test suite: error metrics and random packings.

BLAS thread pools are pinned to one thread before the first kernel call so
the bit-identical boundary-isolation checks run in a deterministic mode.
"""

from __future__ import annotations

import os

for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import numpy as np


def rel_err(got: np.ndarray, ref: np.ndarray) -> float:
    """Normwise relative L-inf error, max|got - ref| / max|ref|."""
    got = np.asarray(got)
    ref = np.asarray(ref)
    scale = float(np.max(np.abs(ref))) if ref.size else 0.0
    diff = float(np.max(np.abs(got - ref))) if ref.size else 0.0
    return diff / max(scale, 1e-300)


def random_doc_lengths(rng: np.random.Generator, max_docs: int = 32, max_len: int = 512) -> list[int]:
    n = int(rng.integers(1, max_docs + 1))
    return [int(v) for v in rng.integers(1, max_len + 1, size=n)]


def random_documents(rng: np.random.Generator, lengths, channels: int = 1) -> list[np.ndarray]:
    return [rng.standard_normal((length, channels)) for length in lengths]


def oracle_matrix(doc_lengths, packed_values: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Channel-stacked causal oracle on unpadded packed values (sum L_i, D)."""
    from rubiconv import oracle_convolve

    return np.stack(
        [
            oracle_convolve(doc_lengths, packed_values[:, d], taps[:, d])
            for d in range(packed_values.shape[1])
        ],
        axis=1,
    )
