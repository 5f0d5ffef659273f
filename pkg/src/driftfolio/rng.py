"""Counter-based random streams for reproducible Monte Carlo.

Every stochastic routine draws from a Philox generator keyed by
``(seed, label)`` and advanced to a per-path offset, so the numbers a path
sees depend only on ``(seed, label, path index, draw index)`` — never on
batch size, batch order, or thread count.  Gaussians come from the inverse
normal CDF applied to the raw uniforms, which keeps the uniform-to-normal
mapping one-to-one (one 64-bit word per variate).
"""

from __future__ import annotations

import hashlib

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

# random() maps one uint64 to one double in [0, 1); this nudge keeps ndtri
# away from the u == 0 singularity without biasing the 53-bit mantissa grid.
_U_EPS = 2.0 ** -54


def _key(seed: int, label: str) -> np.ndarray:
    digest = hashlib.sha256(f"{int(seed)}:{label}".encode()).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64).copy()


def derive_seed(seed: int, label: str) -> int:
    """Stable 63-bit sub-seed for a named stage of a pipeline."""
    digest = hashlib.sha256(f"{int(seed)}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def stream(seed: int, label: str) -> Generator:
    """Generator at the start of the ``(seed, label)`` stream."""
    return Generator(Philox(key=_key(seed, label)))


def stream_at(seed: int, label: str, block_offset: int) -> Generator:
    """Generator positioned ``block_offset`` counter blocks into the stream.

    Philox advances in blocks of four 64-bit words; ``random()`` consumes one
    word per double, so one block covers four doubles.
    """
    bg = Philox(key=_key(seed, label))
    if block_offset:
        bg.advance(int(block_offset))
    return Generator(bg)


def _blocks(draws: int) -> int:
    return -(-draws // 4)


def normals(seed: int, label: str, first_path: int, n_paths: int,
            draws_per_path: int) -> np.ndarray:
    """Standard normals for paths ``[first_path, first_path + n_paths)``.

    Returns shape ``(n_paths, draws_per_path)``.  Path ``p`` always receives
    the same numbers for a given ``(seed, label, draws_per_path)`` regardless
    of how the path range is batched: each path owns a block-aligned slice of
    the keyed stream.
    """
    per_path = _blocks(draws_per_path)
    gen = stream_at(seed, label, first_path * per_path)
    u = gen.random((n_paths, per_path * 4)) + _U_EPS
    return ndtri(u[:, :draws_per_path])
