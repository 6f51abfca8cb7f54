"""Deterministic splitmix64 streams.

Every clip owns one stream derived from ``(master_seed, clip_index)``, so
builds are bit-identical regardless of clip order or worker count.  The
scalar methods and the vectorized ``*_array`` methods consume the stream
identically.
"""

import math

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MASK64 = 0xFFFFFFFFFFFFFFFF

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z):
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def splitmix64_finalize(z):
    """Add the golden-ratio increment to ``z`` and return the mixed 64-bit output."""
    return _mix((z + GOLDEN) & MASK64)


def _mix_array(z):
    """Mix a uint64 array in place (uint64 arithmetic wraps silently)."""
    tmp = z >> np.uint64(30)
    z ^= tmp
    z *= np.uint64(_M1)
    np.right_shift(z, np.uint64(27), out=tmp)
    z ^= tmp
    z *= np.uint64(_M2)
    np.right_shift(z, np.uint64(31), out=tmp)
    z ^= tmp
    return z


class RngState:
    """A splitmix64 generator state.

    Use :meth:`copy` to fork; two equal states produce identical streams.
    """

    __slots__ = ("state",)

    def __init__(self, state):
        self.state = int(state) & MASK64

    def __repr__(self):
        return f"RngState(0x{self.state:016x})"

    def __eq__(self, other):
        return isinstance(other, RngState) and other.state == self.state

    def __hash__(self):
        return hash(self.state)

    def copy(self):
        return RngState(self.state)

    def next_u64(self):
        self.state = (self.state + GOLDEN) & MASK64
        return _mix(self.state)

    def next_unit(self):
        """Uniform variate in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / 9007199254740992.0

    def next_uniform(self, lo, hi):
        return lo + (hi - lo) * self.next_unit()

    def next_gaussian(self):
        """Standard normal variate via Box-Muller (one output per two units)."""
        u1 = 1.0 - self.next_unit()
        u2 = self.next_unit()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def next_u64_array(self, n):
        states = np.arange(1, n + 1, dtype=np.uint64)
        states *= np.uint64(GOLDEN)
        states += np.uint64(self.state)
        self.state = (self.state + n * GOLDEN) & MASK64
        return _mix_array(states)

    def next_unit_array(self, n):
        bits = self.next_u64_array(n)
        bits >>= np.uint64(11)
        return bits.astype(np.float64) / 9007199254740992.0

    def next_gaussian_array(self, shape):
        """Gaussian variates filling ``shape`` in C order, same stream as repeated
        :meth:`next_gaussian` calls."""
        n = int(np.prod(shape, dtype=np.int64))
        units = self.next_unit_array(2 * n)
        u1 = 1.0 - units[0::2]
        u2 = units[1::2]
        out = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return out.reshape(shape)


def derive_stream(master_seed, clip_index):
    """Return the independent stream for clip ``clip_index`` under ``master_seed``."""
    z = (int(master_seed) + int(clip_index) * GOLDEN) & MASK64
    return RngState(splitmix64_finalize(z))
