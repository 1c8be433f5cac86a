"""The separated two-solver game over a 1-of-2 puzzle.

One agent A prepares an obligation and splits its resources between two
isolated solvers B and C; then a single challenge bit goes to both, and
they win iff both answers verify. The interesting ceiling: no strategy
wins much above 3/4, while either solver alone could answer its own
preferred challenge perfectly.

Solver isolation is structural: each solver gets a ScopedState view of the
shared quantum state restricted to its own registers (touching the other
side raises RegisterViolation) plus a read-only shared classical tape
prepared in stage A. Answering both challenges of one obligation at once
(the 2-of-2 reduction) reuses the same stage-A preparation.
"""

from dataclasses import dataclass
from types import MappingProxyType

from .bits import dot_bits, int_to_bits, xor_bits
from .errors import InvalidTrials, TagMismatch, UnknownStrategy
from .puzzle import Answer, BasePuzzle, Equation, Preimage, PublicHandle, Trapdoor
from .qsim import ScopedState, SharedState
from .rng import Rng, child_seed
from .stats import wilson_interval


@dataclass(frozen=True)
class StagePrep:
    """Stage-A output: the obligation plus the split resources."""

    obligation: str
    cell: SharedState | None
    b_registers: frozenset
    c_registers: frozenset
    tape: MappingProxyType  # shared classical data, read-only


def make_prep(obligation, cell=None, b_registers=(), c_registers=(), tape=None):
    return StagePrep(
        obligation,
        cell,
        frozenset(b_registers),
        frozenset(c_registers),
        MappingProxyType(dict(tape or {})),
    )


@dataclass(frozen=True)
class GameResult:
    win: bool
    accept_b: bool
    accept_c: bool
    challenge: str
    obligation: str


@dataclass(frozen=True)
class WinEstimate:
    successes: int
    trials: int
    rate: float
    ci_low: float
    ci_high: float


def uniform_answer_guess(n: int, challenge: str, rng) -> Answer:
    """Uniform draw from the full answer space of the challenge."""
    if challenge == "0":
        return Preimage(rng.bits(1), rng.bits(n))
    return Equation(rng.bits(1), rng.bits(n))


def _safe_verify(puz: BasePuzzle, env: Trapdoor, y: str, challenge: str, answer: Answer) -> bool:
    try:
        return puz.verify(env, y, challenge, answer)
    except TagMismatch:
        return False  # a wrongly-shaped answer just loses


def _views(prep: StagePrep):
    if prep.cell is None:
        return None, None
    return ScopedState(prep.cell, prep.b_registers), ScopedState(prep.cell, prep.c_registers)


def play_nonlocal(puz: BasePuzzle, strategy, rng) -> GameResult:
    """One round: keygen, stage A, one challenge to both isolated solvers."""
    handle, env = puz.keygen(rng)
    prep = strategy.stage_a(handle, env, rng)
    challenge = puz.sample_challenge(rng)
    view_b, view_c = _views(prep)
    ans_b = strategy.answer_b(view_b, prep.tape, challenge, rng)
    ans_c = strategy.answer_c(view_c, prep.tape, challenge, rng)
    accept_b = _safe_verify(puz, env, prep.obligation, challenge, ans_b)
    accept_c = _safe_verify(puz, env, prep.obligation, challenge, ans_c)
    return GameResult(accept_b and accept_c, accept_b, accept_c, challenge, prep.obligation)


def reduce_to_2of2(strategy):
    """Wrap a game strategy as a single 2-of-2 solver.

    The solver runs stage A once and asks B for the challenge-0 answer and
    C for the challenge-1 answer of the same obligation. If the strategy
    wins the game with probability tau, this solver succeeds with
    probability at least 2*tau - 1.
    """

    def solver(handle: PublicHandle, env: Trapdoor, rng) -> tuple[str, Answer, Answer]:
        prep = strategy.stage_a(handle, env, rng)
        view_b, view_c = _views(prep)
        ans0 = strategy.answer_b(view_b, prep.tape, "0", rng)
        ans1 = strategy.answer_c(view_c, prep.tape, "1", rng)
        return prep.obligation, ans0, ans1

    solver.name = f"reduced_{strategy.name}"
    return solver


def play_2of2(puz: BasePuzzle, solver, rng) -> bool:
    """One 2-of-2 round: the solver must answer both challenges at once."""
    handle, env = puz.keygen(rng)
    y, ans0, ans1 = solver(handle, env, rng)
    return _safe_verify(puz, env, y, "0", ans0) and _safe_verify(puz, env, y, "1", ans1)


def _estimate(trials: int, seed: int, one_trial) -> WinEstimate:
    if trials < 1:
        raise InvalidTrials(f"trials must be >= 1, got {trials}")
    wins = 0
    for i in range(trials):
        wins += bool(one_trial(Rng(child_seed(seed, i))))
    lo, hi = wilson_interval(wins, trials)
    return WinEstimate(wins, trials, wins / trials, lo, hi)


def estimate_win_rate(puz: BasePuzzle, strategy, trials: int, seed: int) -> WinEstimate:
    return _estimate(trials, seed, lambda r: play_nonlocal(puz, strategy, r).win)


def estimate_2of2_rate(puz: BasePuzzle, solver, trials: int, seed: int) -> WinEstimate:
    return _estimate(trials, seed, lambda r: play_2of2(puz, solver, r))


class HonestToB:
    """B holds the whole claw state and solves honestly; C guesses blind."""

    name = "honest_to_B"

    def __init__(self, n: int):
        self.n = n
        self._puz = BasePuzzle(n)

    def stage_a(self, handle, env, rng):
        y, state = self._puz.obligate(handle, env, rng)
        return make_prep(y, SharedState(state), b_registers=("bit", "preimage"))

    def answer_b(self, view, tape, challenge, rng):
        if challenge == "0":
            bit = view.measure("bit", rng)
            v = view.measure("preimage", rng)
            return Preimage(bit.outcome, v.outcome)
        view.apply_hadamard("bit")
        view.apply_hadamard("preimage")
        c = view.measure("bit", rng)
        d = view.measure("preimage", rng)
        return Equation(c.outcome, d.outcome)

    def answer_c(self, view, tape, challenge, rng):
        return uniform_answer_guess(self.n, challenge, rng)


class MeasureAndGuess:
    """Measure everything up front; replay shared classical results.

    Challenge 0 is then answered perfectly by both, challenge 1 by one
    shared uniform equation guess: the 3/4 ceiling witness.
    """

    name = "measure_and_guess"

    def __init__(self, n: int):
        self.n = n
        self._puz = BasePuzzle(n)

    def stage_a(self, handle, env, rng):
        y, state = self._puz.obligate(handle, env, rng)
        cell = SharedState(state)
        scratch = ScopedState(cell, ("bit", "preimage"))
        bit = scratch.measure("bit", rng).outcome
        v = scratch.measure("preimage", rng).outcome
        guess = uniform_answer_guess(self.n, "1", rng)
        tape = {"preimage": Preimage(bit, v), "equation": guess}
        return make_prep(y, tape=tape)

    def _replay(self, tape, challenge):
        return tape["preimage"] if challenge == "0" else tape["equation"]

    def answer_b(self, view, tape, challenge, rng):
        return self._replay(tape, challenge)

    def answer_c(self, view, tape, challenge, rng):
        return self._replay(tape, challenge)


class BruteForce:
    """Recover the shift with 2^n public eval queries, then answer anything.

    The capability-scoping caveat made concrete: claw-freeness is only as
    strong as the cost of exhausting eval, so small n gives rate 1.
    """

    name = "brute_force"

    def __init__(self, n: int):
        self.n = n

    def stage_a(self, handle, env, rng):
        x0 = rng.bits(self.n)
        y = handle.eval("0", x0)
        x1 = next(
            int_to_bits(x, self.n)
            for x in range(1 << self.n)
            if handle.eval("1", int_to_bits(x, self.n)) == y
        )
        return make_prep(y, tape={"x0": x0, "shift": xor_bits(x0, x1)})

    def _answer(self, tape, challenge, rng):
        if challenge == "0":
            return Preimage("0", tape["x0"])
        d = rng.bits(self.n)
        while "1" not in d:
            d = rng.bits(self.n)
        return Equation(str(dot_bits(d, tape["shift"])), d)

    def answer_b(self, view, tape, challenge, rng):
        return self._answer(tape, challenge, rng)

    def answer_c(self, view, tape, challenge, rng):
        return self._answer(tape, challenge, rng)


class AlwaysFail:
    """Answers with the wrong shape on purpose; loses every round."""

    name = "always_fail"

    def __init__(self, n: int):
        self.n = n
        self._puz = BasePuzzle(n)

    def stage_a(self, handle, env, rng):
        y, _ = self._puz.obligate(handle, env, rng)
        return make_prep(y)

    def _answer(self, challenge):
        if challenge == "0":
            return Equation("0", "0" * self.n)  # wrong tag for challenge 0
        return Preimage("0", "0" * self.n)  # wrong tag for challenge 1

    def answer_b(self, view, tape, challenge, rng):
        return self._answer(challenge)

    def answer_c(self, view, tape, challenge, rng):
        return self._answer(challenge)


STRATEGIES = {
    s.name: s for s in (HonestToB, MeasureAndGuess, BruteForce, AlwaysFail)
}


def make_strategy(name: str, n: int):
    try:
        factory = STRATEGIES[name]
    except KeyError:
        raise UnknownStrategy(
            f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}"
        ) from None
    return factory(n)
