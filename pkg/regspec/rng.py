"""Seed derivation and random generators.

Every random stream in regspec comes from a numpy `Generator` over PCG64,
seeded with a 64-bit integer. Seeds for independent streams are derived from
a master seed and integer indices with the splitmix64 finalizer:

    h = mix(master_seed)
    for index in indices:
        h = mix(h ^ mix(index + 0x9E3779B97F4A7C15))

where `mix` is

    z = (z + 0x9E3779B97F4A7C15) mod 2**64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    z = z ^ (z >> 31)

A trial's stream depends only on (master_seed, grid index, trial index), never
on which worker runs it or in which order.
"""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """The splitmix64 output function applied to one 64-bit word."""
    z = (value + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Mix a master seed with a sequence of indices into a 64-bit seed."""
    h = splitmix64(master_seed & _MASK64)
    for index in indices:
        h = splitmix64(h ^ splitmix64((index + _GOLDEN_GAMMA) & _MASK64))
    return h


def trial_seed(master_seed: int, grid_index: int, trial_index: int) -> int:
    """Seed of one experiment trial."""
    return derive_seed(master_seed, grid_index, trial_index)


def make_rng(seed: int) -> np.random.Generator:
    """Returns a PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
