# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled xoshiro256** generator; same stream as ``_rng_py.Rng``."""

from libc.stdint cimport uint64_t
from libc.math cimport log, exp, sqrt, cos, pow, M_PI

cdef double _INV_2_53 = 1.0 / 9007199254740992.0
cdef double _INV_2_52 = 1.0 / 4503599627370496.0
cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t x) nogil:
    cdef uint64_t z = x + _GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


def splitmix64(x):
    return _mix(<uint64_t>(x & 0xFFFFFFFFFFFFFFFF))


cdef class Rng:
    cdef uint64_t s0, s1, s2, s3
    cdef readonly object seed

    backend = "cython"

    def __init__(self, seed):
        cdef uint64_t x = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self.s0 = _mix(x)
        x += _GOLDEN
        self.s1 = _mix(x)
        x += _GOLDEN
        self.s2 = _mix(x)
        x += _GOLDEN
        self.s3 = _mix(x)

    cdef inline uint64_t _next(self) nogil:
        cdef uint64_t result = _rotl(self.s1 * 5, 7) * 9
        cdef uint64_t t = self.s1 << 17
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return result

    cdef inline double _random(self) nogil:
        return (self._next() >> 11) * _INV_2_53

    cdef inline double _random_open(self) nogil:
        return ((self._next() >> 12) + 0.5) * _INV_2_52

    cdef inline double _normal(self, double mu, double sigma) nogil:
        cdef double r = sqrt(-2.0 * log(self._random_open()))
        return mu + sigma * r * cos((2.0 * M_PI) * self._random())

    @property
    def state(self):
        return (self.s0, self.s1, self.s2, self.s3)

    def next_u64(self):
        return self._next()

    def random(self):
        return self._random()

    def random_open(self):
        return self._random_open()

    def uniform(self, double a, double b):
        return a + (b - a) * self._random()

    def below(self, long n):
        if n <= 0:
            raise ValueError("below() needs n > 0")
        return <long>(self._random() * n)

    def coin(self):
        return (self._next() >> 63) == 1

    def normal(self, double mu, double sigma):
        return self._normal(mu, sigma)

    def lognormal(self, double mu, double sigma):
        return exp(self._normal(mu, sigma))

    def exponential(self, double rate):
        return -log(self._random_open()) / rate

    def weibull(self, double shape, double scale):
        return scale * pow(-log(self._random_open()), 1.0 / shape)
