"""Deterministic random number generation for test scenarios.

The generator is SplitMix64 (Steele, Lea & Flood's fixed-increment variant,
as published in the xoshiro/xoroshiro reference material), chosen so that
any implementation in any language reproduces scenarios bit-exactly from
the same 64-bit seed:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z XOR (z >> 31)

Derived values are likewise pinned down:

* uniform double in [0, 1):  (output >> 11) * 2^-53
* uniform double in (0, 1]:  ((output >> 11) + 1) * 2^-53
* standard normal pairs via Box-Muller from one (0,1] and one [0,1) draw:
  z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2)
* a complex Gaussian matrix entry consumes one Box-Muller pair
  (real part z0, imaginary part z1), filled in row-major order.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_DOUBLE = 2.0 ** -53


class SplitMix64:
    """SplitMix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    def next_raw(self) -> int:
        """Next 64-bit output word."""
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_raw() >> 11) * _TO_DOUBLE

    def next_double_open(self) -> float:
        """Uniform double in (0, 1], safe as a logarithm argument."""
        return ((self.next_raw() >> 11) + 1) * _TO_DOUBLE

    def next_gaussian_pair(self) -> tuple[float, float]:
        """One Box-Muller pair of independent standard normals."""
        u1 = self.next_double_open()
        u2 = self.next_double()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        return radius * math.cos(angle), radius * math.sin(angle)

    def gaussian_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Complex matrix with independent Gaussian real/imaginary parts."""
        out = np.empty((rows, cols), dtype=np.complex128)
        for i in range(rows):
            for j in range(cols):
                re, im = self.next_gaussian_pair()
                out[i, j] = complex(re, im)
        return out
