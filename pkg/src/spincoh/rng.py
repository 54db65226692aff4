"""Counter-based random number streams for reproducible ensembles.

Every random value in the package is a pure function of
``(seed, domain, sample_index, slot)``. Draws for sample ``i`` come from
Philox counter blocks owned by ``i`` alone, so single-sample and chunked
(vectorized) generation are bitwise identical and independent of call order
or worker layout. Uniform doubles take the top 53 bits of each 64-bit word;
normals go through the inverse normal CDF, which consumes exactly one word
per value (rejection samplers would not).

Domains keep unrelated consumers (field sampling, measurement simulation)
on disjoint streams under one experiment seed.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

DOMAIN_FIELD = 0x01        # noise-model field samples
DOMAIN_MEASUREMENT = 0x02  # tomography shot outcomes (basis index added)
DOMAIN_GENERIC = 0x10      # synthetic-data helpers

_WORDS_PER_BLOCK = 4  # Philox-4x64 emits four 64-bit words per counter block


def uniforms(seed: int, domain: int, start_index: int, count: int,
             width: int) -> np.ndarray:
    """(count, width) array of doubles in (0, 1), width slots per index.

    Index ``i`` owns blocks [i*ceil(width/4), (i+1)*ceil(width/4)), so any
    contiguous chunk reproduces exactly what per-index calls would yield.
    """
    if count < 0 or width < 1:
        raise ValueError("need count >= 0 and width >= 1")
    blocks_per = -(-width // _WORDS_PER_BLOCK)
    words_per = blocks_per * _WORDS_PER_BLOCK
    key = np.array([seed, domain], dtype=np.uint64)
    counter = np.array([start_index * blocks_per, 0, 0, 0], dtype=np.uint64)
    raw = Philox(key=key, counter=counter).random_raw(count * words_per)
    raw = raw.reshape(count, words_per)[:, :width]
    # top 53 bits, offset by half an ulp to stay strictly inside (0, 1)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, domain: int, start_index: int, count: int,
            width: int) -> np.ndarray:
    """(count, width) standard normals on the same counter layout."""
    return ndtri(uniforms(seed, domain, start_index, count, width))
