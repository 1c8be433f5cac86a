"""Deterministic randomness built on the splitmix64 sequence.

Every random draw in the package flows through `Rng` so that a master seed
fully determines experiment output. Independent streams are derived with
`child_seed`, never by reusing a stream in two places.

Seed split convention used by the experiment layer:

    trial_seed = child_seed(master_seed, trial_index)
    v0 stream     = child_seed(trial_seed, 0)   # verifier V0 (keygen, x0)
    v1 stream     = child_seed(trial_seed, 1)   # verifier V1 (challenge, x1)
    actor stream  = child_seed(trial_seed, 2)   # prover or adversary pair
    oracle stream = child_seed(trial_seed, 3)   # per-trial random oracle

Adversary pairs further split their actor stream per handler slot
(child_seed(actor_seed, slot) for slots u0..u4) so a compiler that replays
one handler sees exactly the stream the original handler saw.
"""

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit mixing permutation."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """Derive the index-th independent child seed of a parent seed."""
    if index < 0:
        raise ValueError(f"child index must be nonnegative, got {index}")
    return mix64((seed + (index + 1) * _GOLDEN) & _MASK64)


class Rng:
    """splitmix64 generator: 64-bit state stepped by the golden gamma."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def bits(self, width: int) -> str:
        """Uniform bitstring of the given width."""
        if width < 0:
            raise ValueError(f"width must be nonnegative, got {width}")
        out = []
        remaining = width
        while remaining > 0:
            take = min(remaining, 64)
            out.append(format(self.next_u64() >> (64 - take), f"0{take}b"))
            remaining -= take
        return "".join(out)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection to avoid modulo bias."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def spawn(self, index: int) -> "Rng":
        """Fresh generator on the index-th child seed of the current state.

        Uses the state value, not the original seed, so repeated spawn(0)
        calls after drawing give distinct streams only if draws happened in
        between; experiment code always spawns from a named seed instead.
        """
        return Rng(child_seed(self._state, index))
