"""Wilson score intervals and closed-form acceptance rates.

The closed forms below are what experiment output reports in its theory
column. None of them is a tuned constant: each is derived in the test
suite by exhaustively enumerating measurement distributions at small n
and verifying every outcome, then checked here symbolically.

Per-instance honest acceptance: challenge 0 always verifies (both claw
branches are preimages), challenge 1 verifies unless the Hadamard outcome
has d = 0, which carries weight 2^-n. Averaging the challenge bit gives
1 - 2^-(n+1) per instance.
"""

import math

Z95 = 1.959963984540054  # two-sided 95% normal quantile


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    # at the endpoints center-half/center+half are exactly 0/1 analytically;
    # avoid the float cancellation fuzz
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def binomial_se(p_hat: float, trials: int) -> float:
    return math.sqrt(max(p_hat * (1 - p_hat), 0.0) / trials)


def reduction_slack(p_hat: float, p_trials: int, tau_hat: float, tau_trials: int) -> float:
    """Combined standard error of p_hat - (2 tau_hat - 1)."""
    return math.sqrt(
        binomial_se(p_hat, p_trials) ** 2 + (2 * binomial_se(tau_hat, tau_trials)) ** 2
    )


def honest_completeness(n: int, k: int = 1) -> float:
    """Honest acceptance of k independent instances: (1 - 2^-(n+1))^k."""
    return (1.0 - 2.0 ** -(n + 1)) ** k


def strong_completeness(n: int, k: int) -> float:
    """Honest acceptance with one challenge bit shared by k instances."""
    return 0.5 * (1.0 + (1.0 - 2.0**-n) ** k)


def guessing_rate(n: int, k: int) -> float:
    """Two-site challenge-guessing attack: guess k bits, then play honestly."""
    return 2.0**-k * honest_completeness(n, k)


def teleport_rate(n: int, k: int) -> float:
    """Teleportation attack wins exactly as often as the honest prover."""
    return honest_completeness(n, k)


def uniform_equation_rate(n: int) -> float:
    """A uniform (c, d) guess verifies with probability (1 - 2^-n)/2."""
    return 0.5 * (1.0 - 2.0**-n)


def measure_and_guess_rate(n: int) -> float:
    """Both solvers replay a shared early measurement and a shared guess.

    Challenge 0 always verifies; challenge 1 wins iff the one shared
    uniform equation guess verifies.
    """
    return 0.5 + 0.5 * uniform_equation_rate(n)


def honest_to_b_rate(n: int) -> float:
    """One honest solver, one independent uniform guesser: (1 + 4^-n)/4.

    Challenge 0: the guesser hits one of the two claw branches with
    probability 2^-n. Challenge 1: honest d != 0 and an independent
    uniform equation guess must both verify.
    """
    return 0.5 * (2.0**-n + (1.0 - 2.0**-n) * uniform_equation_rate(n))


def classical_prover_rate(n: int, k: int) -> float:
    """Classical stand-in: stored preimages for 0, uniform guesses for 1."""
    return (0.5 + 0.5 * uniform_equation_rate(n)) ** k
