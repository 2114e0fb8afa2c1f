"""Portable 64-bit generators.

Masks and textures must be reproducible bit-for-bit in any language, so we
avoid numpy's generators and fix the algorithms here:

* ``splitmix64``: state += 0x9E3779B97F4A7C15, then the finalizer
  z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
  z ^ z>>31.  Used to seed and to derive per-frame seeds.
* ``XorShift64Star``: x ^= x>>12; x ^= x<<25; x ^= x>>27;
  output x * 0x2545F4914F6CDD1D (mod 2**64).  State is initialised with
  splitmix64(seed) and bumped to 1 if that happens to be zero.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for item ``index`` (a frame, a texture) of a run seeded by ``master_seed``."""
    return splitmix64((master_seed & MASK64) ^ splitmix64(index & MASK64))


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        reject = (1 << 64) % bound
        while True:
            r = self.next_u64()
            if r >= reject:
                return r % bound

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))
