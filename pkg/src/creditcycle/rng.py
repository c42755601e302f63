"""Counter-based normal variates keyed by (seed, path, counter).

Each draw is a pure function of its key, so a path's randomness does not
depend on how many other paths exist, on thread scheduling, or on the order
in which a kernel happens to request variates.  The mixer is the splitmix64
finalizer; two mixed counters feed one Box-Muller normal.
"""
import math

import numba as nb
import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_INV53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * math.pi


@nb.njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(cache=True)
def stream_key(seed, path, tag):
    k = mix64(np.uint64(seed) + _GAMMA)
    k = mix64(k + _GAMMA * (np.uint64(path) + _ONE))
    return mix64(k ^ (np.uint64(tag) * _M2))


@nb.njit(cache=True, inline="always")
def _uniform(key, c):
    # (0, 1], 53-bit resolution
    return (float(mix64(key + _GAMMA * c) >> _S11) + 1.0) * _INV53


@nb.njit(cache=True)
def normal_at(key, counter):
    c = np.uint64(counter) * _TWO
    u1 = _uniform(key, c)
    u2 = _uniform(key, c + _ONE)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


@nb.njit(cache=True)
def normals(seed, path, tag, start, n):
    key = stream_key(seed, path, tag)
    out = np.empty(n)
    for i in range(n):
        out[i] = normal_at(key, start + i)
    return out
