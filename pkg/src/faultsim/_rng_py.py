"""Pure-Python xoshiro256** generator.

Bit-for-bit twin of the compiled ``_rng`` extension. Used when the extension
is not built or when ``FAULTSIM_PURE_PYTHON`` is set.
"""

import math

_MASK = 0xFFFFFFFFFFFFFFFF
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0
_INV_2_52 = 1.0 / 4503599627370496.0


def splitmix64(x):
    """One splitmix64 output for input ``x`` (used for seeding and seed mixing)."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Rng:
    """xoshiro256** seeded through splitmix64."""

    backend = "python"

    def __init__(self, seed):
        x = seed & _MASK
        s = []
        for _ in range(4):
            s.append(splitmix64(x))
            x = (x + 0x9E3779B97F4A7C15) & _MASK
        self._s0, self._s1, self._s2, self._s3 = s
        self.seed = seed & _MASK

    def next_u64(self):
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        x = (s1 * 5) & _MASK
        result = ((((x << 7) | (x >> 57)) & _MASK) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    @property
    def state(self):
        return (self._s0, self._s1, self._s2, self._s3)

    def random(self):
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def random_open(self):
        """Uniform float in (0, 1); never returns either endpoint."""
        return ((self.next_u64() >> 12) + 0.5) * _INV_2_52

    def uniform(self, a, b):
        return a + (b - a) * self.random()

    def below(self, n):
        """Integer in [0, n)."""
        if n <= 0:
            raise ValueError("below() needs n > 0")
        return int(self.random() * n)

    def coin(self):
        return (self.next_u64() >> 63) == 1

    def normal(self, mu, sigma):
        # Box-Muller, cosine branch only, no cached second variate
        r = math.sqrt(-2.0 * math.log(self.random_open()))
        return mu + sigma * r * math.cos(_TWO_PI * self.random())

    def lognormal(self, mu, sigma):
        return math.exp(self.normal(mu, sigma))

    def exponential(self, rate):
        return -math.log(self.random_open()) / rate

    def weibull(self, shape, scale):
        return scale * math.pow(-math.log(self.random_open()), 1.0 / shape)
