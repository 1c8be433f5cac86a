"""Timing-constrained verification on a line segment.

Two verifiers sit at positions 0 and 3 on a one-dimensional line and try
to certify that a prover is physically located inside the segment.  V0
broadcasts a puzzle key at time 0 and V1 broadcasts a challenge at time
1; the prover must get obligations back to V0 strictly before time 4 and
challenge answers to both verifiers by fixed deadlines.  Because signals
travel at unit speed, an honest prover at position p in [1, 2) meets
every deadline with slack while a single device outside the segment
cannot.

The module also provides a hash-challenge variant where the challenge is
derived from a public random function applied to two verifier nonces,
and a timing-free interactive protocol reusing the same message flow as
a test of quantum capability.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .bits import decode_parts, encode_parts, pack_bits, unpack_bits, xor_bits
from .errors import ConfigInvalid, InvalidTrials, LengthMismatch, TagMismatch
from .puzzle import (
    Answer,
    Equation,
    MultiHandle,
    MultiTrapdoor,
    Preimage,
    RepeatedPuzzle,
    decode_answers,
    decode_obligations,
    encode_answers,
    encode_obligations,
    parallel_puzzle,
)
from .rng import Rng, child_seed, mix64
from .spacetime import (
    Coordinate,
    Emission,
    PartyBehavior,
    Simulation,
    Trace,
    as_coord,
)
from .stats import wilson_interval

V0_POSITION = Fraction(0)
V1_POSITION = Fraction(3)

# Verifier deadlines, in the same units as positions (speed of signal = 1).
Y0_DEADLINE = Fraction(4)    # obligations at V0: strictly earlier
Y1_DEADLINE = Fraction(3)    # obligations at V1: exactly on time
ANS0_DEADLINE = Fraction(4)  # answers at V0: exactly on time
ANS1_DEADLINE = Fraction(5)  # answers at V1: at or before

RUN_UNTIL = Fraction(6)

# Message kind prefixes.
KIND_KEY = b"K"        # verifier 0 announcement (key id, plus nonce in the
                       # hash-challenge variant)
KIND_CHALLENGE = b"B"  # verifier 1 challenge bits
KIND_NONCE = b"X"      # verifier 1 nonce (hash-challenge variant)
KIND_OBLIGATION = b"Y"
KIND_ANSWER = b"A"
KIND_LEFT = b"M"       # private left-to-right adversary message
KIND_RIGHT = b"N"      # private right-to-left adversary message


def encode_message(kind: bytes, *parts: bytes) -> bytes:
    """Frame a protocol message as a kind byte plus length-prefixed parts."""
    if len(kind) != 1:
        raise ValueError("message kind must be a single byte")
    return kind + encode_parts(*parts)


def decode_message(payload: bytes) -> tuple[bytes, list[bytes]]:
    if not payload:
        raise ValueError("empty message")
    return payload[:1], decode_parts(payload[1:])


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameters of one protocol run.

    n is the puzzle width, k the number of parallel instances, lam the
    nonce width of the hash-challenge variant, and prover_position the
    location an honest prover occupies.  Placement must fall inside
    [1, 2): a prover in that window receives the key before the
    challenge and can meet all four response deadlines.
    """

    n: int = 8
    k: int = 1
    lam: int = 16
    prover_position: Coordinate = Fraction(3, 2)

    def __post_init__(self):
        if not isinstance(self.n, int) or not 2 <= self.n <= 12:
            raise ConfigInvalid(f"puzzle width n={self.n!r} outside [2, 12]")
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigInvalid(f"instance count k={self.k!r} must be >= 1")
        if not isinstance(self.lam, int) or self.lam < 8:
            raise ConfigInvalid(f"nonce width lam={self.lam!r} must be >= 8")
        object.__setattr__(self, "prover_position", as_coord(self.prover_position))
        if not Fraction(1) <= self.prover_position < Fraction(2):
            raise ConfigInvalid(
                f"prover position {self.prover_position} outside [1, 2)"
            )


class FailureReason(enum.Enum):
    """First check a run failed, in evaluation order."""

    TIMING_Y0 = "timing_y0"
    TIMING_Y1 = "timing_y1"
    TIMING_ANS0 = "timing_ans0"
    TIMING_ANS1 = "timing_ans1"
    MISMATCH = "mismatch"
    VER_FAIL = "ver_fail"
    NONE = "none"


@dataclass(frozen=True)
class Verdict:
    accept: bool
    reason: FailureReason
    challenge: str | None
    timings: dict[str, Fraction | None]
    transcript: dict[str, bytes | None]

    def transcript_bytes(self) -> bytes:
        """Canonical encoding of what the verifiers observed and decided."""
        fields = []
        for label in ("pk", "y0", "y1", "ans0", "ans1"):
            body = self.transcript.get(label)
            fields.append(label.encode() + (b"=" + body if body is not None else b"!"))
        challenge = (self.challenge or "").encode()
        verdict = f"{int(self.accept)}:{self.reason.value}".encode()
        return encode_parts(*fields, challenge, verdict)


@dataclass
class PRPVOutcome:
    verdict: Verdict
    trace: Trace


class RandomOracle:
    """Public random function from lam-bit strings to k-bit strings.

    Outputs are computed lazily: each distinct input gets its own stream
    seeded from the oracle seed and the input, so values at distinct
    inputs are independent and query order never matters.
    """

    def __init__(self, seed: int, in_width: int, out_width: int):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self.in_width = in_width
        self.out_width = out_width
        self._cache: dict[str, str] = {}

    def query(self, x: str) -> str:
        if len(x) != self.in_width or set(x) - {"0", "1"}:
            raise LengthMismatch(
                f"oracle input must be {self.in_width} bits, got {x!r}"
            )
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        acc = self.seed
        value = int(x, 2)
        while True:
            acc = mix64(acc ^ (value & 0xFFFFFFFFFFFFFFFF))
            value >>= 64
            if not value:
                break
        out = Rng(acc).bits(self.out_width)
        self._cache[x] = out
        return out


class TrialEnv:
    """Key material context shared by the parties of one run.

    Exposes the public handle, key lookup by announced id, and an
    obligation service that mints claw states against the key.  The
    trapdoor itself stays with the verdict logic and is not reachable
    through this object.
    """

    def __init__(self, puzzle: RepeatedPuzzle, handle: MultiHandle,
                 trapdoor: MultiTrapdoor):
        self.puzzle = puzzle
        self.handle = handle
        self._trapdoor = trapdoor

    def resolve(self, key_id: str) -> MultiHandle:
        if key_id != self.handle.key_id:
            raise ConfigInvalid(f"unknown key id {key_id!r}")
        return self.handle

    def obligate(self, rng: Rng):
        return self.puzzle.obligate(self.handle, self._trapdoor, rng)


# ---------------------------------------------------------------------------
# Party behaviours


class _Verifier(PartyBehavior):
    """Records obligation and answer arrivals; optionally announces at an
    alarm time."""

    def __init__(self, alarm_time: Fraction | None = None,
                 announce: Callable[[], bytes] | None = None):
        self._alarm_time = alarm_time
        self._announce = announce
        self.sent: bytes | None = None
        self.y_msgs: list[tuple[Fraction, bytes]] = []
        self.ans_msgs: list[tuple[Fraction, bytes]] = []

    def alarms(self):
        return () if self._alarm_time is None else (self._alarm_time,)

    def on_alarm(self, time):
        self.sent = self._announce()
        return (Emission(self.sent),)

    def on_receive(self, time, message):
        kind = message.payload[:1]
        if kind == KIND_OBLIGATION:
            self.y_msgs.append((time, message.payload))
        elif kind == KIND_ANSWER:
            self.ans_msgs.append((time, message.payload))
        return ()


class HonestProver:
    """Honest prover: obligates on key receipt, answers on challenge.

    position overrides the configured placement; values outside [1, 2)
    are allowed here so that runs can demonstrate how mispositioned
    devices miss deadlines.
    """

    def __init__(self, position: Coordinate | None = None):
        self.position = None if position is None else as_coord(position)


class ClassicalProver:
    """Deterministic challenge-response device with no quantum memory.

    Every reply is a function of the public messages and a stored random
    tape: obligations commit to preimages of the 0-branch, challenge
    bits asking for an equation are answered with a tape guess.
    """

    def __init__(self, tape_seed: int | None = None,
                 position: Coordinate | None = None):
        self.tape_seed = tape_seed
        self.position = None if position is None else as_coord(position)


def classical_reply_y(handle: MultiHandle, tape_seed: int):
    """Obligations of the classical prover: y_i = f_0(x_i) for tape x_i."""
    tape = Rng(child_seed(tape_seed, 0))
    xs = tuple(tape.bits(part.n) for part in handle.parts)
    ys = tuple(part.eval("0", x) for part, x in zip(handle.parts, xs))
    return ys, xs


def classical_reply_ans(handle: MultiHandle, challenge: str,
                        tape_seed: int) -> tuple[Answer, ...]:
    """Challenge answers from the same tape as classical_reply_y.

    Preimage requests are met with the stored x_i; equation requests get
    a uniform tape guess.  Guesses are drawn for every instance so tape
    consumption does not depend on the challenge.
    """
    _, xs = classical_reply_y(handle, tape_seed)
    guess_tape = Rng(child_seed(tape_seed, 1))
    guesses = [(guess_tape.bits(1), guess_tape.bits(part.n))
               for part in handle.parts]
    answers: list[Answer] = []
    for i in range(len(handle.parts)):
        if challenge[i] == "0":
            answers.append(Preimage("0", xs[i]))
        else:
            c, d = guesses[i]
            answers.append(Equation(c, d))
    return tuple(answers)


class _ProverBehavior(PartyBehavior):
    """Shared arrival plumbing for positioned provers.

    Arrival order of key and challenge depends on the position, so both
    are buffered and each output is emitted as soon as its inputs exist.
    """

    def __init__(self, env: TrialEnv, rng: Rng, oracle: RandomOracle | None):
        self.env = env
        self.rng = rng
        self.oracle = oracle
        self._challenge: str | None = None
        self._nonce0: str | None = None
        self._nonce1: str | None = None
        self._obligated = False
        self._answered = False

    # subclasses
    def _make_y(self) -> bytes:
        raise NotImplementedError

    def _make_ans(self, challenge: str) -> bytes:
        raise NotImplementedError

    def on_receive(self, time, message):
        kind, parts = decode_message(message.payload)
        out = []
        if kind == KIND_KEY and not self._obligated:
            self.env.resolve(parts[0].decode())
            if len(parts) > 1:
                self._nonce0, _ = unpack_bits(parts[1])
            self._obligated = True
            out.append(Emission(encode_message(KIND_OBLIGATION, self._make_y())))
        elif kind == KIND_CHALLENGE:
            self._challenge, _ = unpack_bits(parts[0])
        elif kind == KIND_NONCE:
            self._nonce1, _ = unpack_bits(parts[0])
        if (self._challenge is None and self._nonce0 is not None
                and self._nonce1 is not None):
            self._challenge = self.oracle.query(xor_bits(self._nonce0, self._nonce1))
        if self._obligated and self._challenge is not None and not self._answered:
            self._answered = True
            out.append(Emission(encode_message(KIND_ANSWER,
                                               self._make_ans(self._challenge))))
        return out


class _HonestProverBehavior(_ProverBehavior):
    def _make_y(self) -> bytes:
        ys, states = self.env.obligate(self.rng)
        self._states = states
        self._ys = ys
        return encode_obligations(ys)

    def _make_ans(self, challenge: str) -> bytes:
        answers = self.env.puzzle.solve(
            self.env.handle, self._ys, self._states, challenge, self.rng)
        return encode_answers(answers)


class _ClassicalProverBehavior(_ProverBehavior):
    def __init__(self, env, rng, oracle, tape_seed: int):
        super().__init__(env, rng, oracle)
        self.tape_seed = tape_seed

    def _make_y(self) -> bytes:
        ys, _ = classical_reply_y(self.env.handle, self.tape_seed)
        return encode_obligations(ys)

    def _make_ans(self, challenge: str) -> bytes:
        answers = classical_reply_ans(self.env.handle, challenge, self.tape_seed)
        return encode_answers(answers)


class _LeftAdversaryBehavior(PartyBehavior):
    """Adapter placing adversary handlers u1/u4 at verifier 0's position."""

    def __init__(self, trial, v0_pid: int):
        self.trial = trial
        self.v0_pid = v0_pid
        self.a1_pid: int | None = None
        self.pid: int | None = None

    def on_receive(self, time, message):
        kind = message.payload[:1]
        members = frozenset({self.pid, self.a1_pid})
        if kind == KIND_KEY:
            y_bytes, m_bytes = self.trial.u1(message.payload[1:])
            return (
                Emission(encode_message(KIND_OBLIGATION, y_bytes),
                         target=self.v0_pid),
                Emission(KIND_LEFT + m_bytes, target=self.a1_pid,
                         members=members),
            )
        if kind == KIND_RIGHT:
            ans_bytes = self.trial.u4(message.payload[1:])
            return (Emission(encode_message(KIND_ANSWER, ans_bytes),
                             target=self.v0_pid),)
        return ()


class _RightAdversaryBehavior(PartyBehavior):
    """Adapter placing adversary handlers u2/u3 at verifier 1's position."""

    def __init__(self, trial, v1_pid: int):
        self.trial = trial
        self.v1_pid = v1_pid
        self.a0_pid: int | None = None
        self.pid: int | None = None

    def on_receive(self, time, message):
        kind = message.payload[:1]
        if kind in (KIND_CHALLENGE, KIND_NONCE):
            n_bytes = self.trial.u2(message.payload[1:])
            members = frozenset({self.pid, self.a0_pid})
            return (Emission(KIND_RIGHT + n_bytes, target=self.a0_pid,
                             members=members),)
        if kind == KIND_LEFT:
            y_bytes, ans_bytes = self.trial.u3(message.payload[1:])
            return (
                Emission(encode_message(KIND_OBLIGATION, y_bytes),
                         target=self.v1_pid),
                Emission(encode_message(KIND_ANSWER, ans_bytes),
                         target=self.v1_pid),
            )
        return ()


# ---------------------------------------------------------------------------
# Run drivers


def _first(arrivals: list[tuple[Fraction, bytes]]):
    return arrivals[0] if arrivals else (None, None)


def _has_conflict(arrivals: list[tuple[Fraction, bytes]]) -> bool:
    return any(payload != arrivals[0][1] for _, payload in arrivals[1:])


def _decode_body(payload: bytes | None) -> bytes | None:
    if payload is None:
        return None
    _, parts = decode_message(payload)
    return parts[0]


def _assemble_verdict(puzzle: RepeatedPuzzle, trapdoor: MultiTrapdoor,
                      v0: _Verifier, v1: _Verifier,
                      challenge: str | None) -> Verdict:
    y0_time, y0 = _first(v0.y_msgs)
    y1_time, y1 = _first(v1.y_msgs)
    ans0_time, ans0 = _first(v0.ans_msgs)
    ans1_time, ans1 = _first(v1.ans_msgs)
    timings = {"y0": y0_time, "y1": y1_time, "ans0": ans0_time, "ans1": ans1_time}
    transcript = {"pk": v0.sent, "y0": y0, "y1": y1, "ans0": ans0, "ans1": ans1}

    reason = FailureReason.NONE
    if y0_time is None or not y0_time < Y0_DEADLINE:
        reason = FailureReason.TIMING_Y0
    elif y1_time is None or y1_time != Y1_DEADLINE:
        reason = FailureReason.TIMING_Y1
    elif ans0_time is None or ans0_time != ANS0_DEADLINE:
        reason = FailureReason.TIMING_ANS0
    elif ans1_time is None or not ans1_time <= ANS1_DEADLINE:
        reason = FailureReason.TIMING_ANS1
    elif (y0 != y1 or ans0 != ans1 or _has_conflict(v0.y_msgs)
          or _has_conflict(v1.y_msgs) or _has_conflict(v0.ans_msgs)
          or _has_conflict(v1.ans_msgs)):
        reason = FailureReason.MISMATCH
    else:
        try:
            ys = decode_obligations(_decode_body(y0))
            answers = decode_answers(_decode_body(ans0))
            ok = puzzle.verify(trapdoor, ys, challenge, answers)
        except (ValueError, IndexError, struct.error, LengthMismatch,
                TagMismatch):
            ok = False
        if not ok:
            reason = FailureReason.VER_FAIL
    return Verdict(
        accept=reason is FailureReason.NONE,
        reason=reason,
        challenge=challenge,
        timings=timings,
        transcript=transcript,
    )


def _run_timed(config: ProtocolConfig, seed: int, prover, adversaries,
               record_trace: bool, hashed: bool) -> PRPVOutcome:
    """Common driver for the plain and hash-challenge protocols."""
    if (prover is None) == (adversaries is None):
        raise ConfigInvalid("supply exactly one of prover or adversaries")

    puzzle = parallel_puzzle(config.n, config.k)
    v0_rng = Rng(child_seed(seed, 0))
    v1_rng = Rng(child_seed(seed, 1))
    actor_seed = child_seed(seed, 2)
    oracle = RandomOracle(child_seed(seed, 3), config.lam, config.k) if hashed else None

    handle, trapdoor = puzzle.keygen(v0_rng)
    env = TrialEnv(puzzle, handle, trapdoor)

    nonce0 = v0_rng.bits(config.lam) if hashed else None
    nonce1 = v1_rng.bits(config.lam) if hashed else None

    def announce_key() -> bytes:
        parts = [handle.key_id.encode()]
        if hashed:
            parts.append(pack_bits(nonce0))
        return encode_message(KIND_KEY, *parts)

    challenge: str | None = None
    if hashed:
        challenge = oracle.query(xor_bits(nonce0, nonce1))
        announce_challenge = lambda: encode_message(KIND_NONCE, pack_bits(nonce1))
    else:
        challenge = puzzle.sample_challenge(v1_rng)
        fixed = challenge
        announce_challenge = lambda: encode_message(KIND_CHALLENGE, pack_bits(fixed))

    sim = Simulation(record_trace=record_trace)
    v0 = _Verifier(alarm_time=Fraction(0), announce=announce_key)
    v1 = _Verifier(alarm_time=Fraction(1), announce=announce_challenge)
    v0_pid = sim.add_party(V0_POSITION, v0)
    v1_pid = sim.add_party(V1_POSITION, v1)

    if prover is not None:
        position = prover.position
        if position is None:
            position = config.prover_position
        actor_rng = Rng(actor_seed)
        if isinstance(prover, ClassicalProver):
            tape_seed = prover.tape_seed
            if tape_seed is None:
                tape_seed = actor_seed
            behavior = _ClassicalProverBehavior(env, actor_rng, oracle, tape_seed)
        elif isinstance(prover, HonestProver):
            behavior = _HonestProverBehavior(env, actor_rng, oracle)
        else:
            raise ConfigInvalid(f"unsupported prover {prover!r}")
        sim.add_party(position, behavior)
    else:
        trial = adversaries.new_trial(env, actor_seed)
        left = _LeftAdversaryBehavior(trial, v0_pid)
        right = _RightAdversaryBehavior(trial, v1_pid)
        left.pid = sim.add_party(V0_POSITION, left)
        right.pid = sim.add_party(V1_POSITION, right)
        left.a1_pid = right.pid
        right.a0_pid = left.pid

    trace = sim.run(RUN_UNTIL)
    verdict = _assemble_verdict(puzzle, trapdoor, v0, v1, challenge)
    return PRPVOutcome(verdict=verdict, trace=trace)


def run_prpv(config: ProtocolConfig, seed: int, *, prover=None,
             adversaries=None, record_trace: bool = False) -> PRPVOutcome:
    """One run of the timed protocol with a uniform k-bit challenge.

    Exactly one of prover (HonestProver or ClassicalProver) and
    adversaries (a two-device attack pair) must be supplied.  All
    randomness derives from seed, so a run is reproducible bit for bit.
    """
    return _run_timed(config, seed, prover, adversaries, record_trace,
                      hashed=False)


def run_prpv_parallel(config: ProtocolConfig, seed: int, *, prover=None,
                      adversaries=None, record_trace: bool = False) -> PRPVOutcome:
    """Alias of run_prpv; parallel repetition is configured via config.k."""
    return run_prpv(config, seed, prover=prover, adversaries=adversaries,
                    record_trace=record_trace)


def run_roprpv(config: ProtocolConfig, seed: int, *, prover=None,
               adversaries=None, record_trace: bool = False) -> PRPVOutcome:
    """One run of the hash-challenge variant.

    Both verifiers broadcast lam-bit nonces and the k-bit challenge is
    the public random function applied to their XOR, so neither verifier
    alone fixes it.  A fresh oracle is derived per run from the seed.
    """
    return _run_timed(config, seed, prover, adversaries, record_trace,
                      hashed=True)


# ---------------------------------------------------------------------------
# Timing-free transform


@dataclass(frozen=True)
class PoQResult:
    accept: bool
    transcript: tuple[tuple[str, bytes], ...]


class QuantumPoQProver:
    """Honest strategy for the interactive protocol: holds the claw
    states between rounds and measures them per the challenge."""

    def reply_y(self, env: TrialEnv, rng: Rng) -> bytes:
        self._env = env
        self._ys, self._states = env.obligate(rng)
        return encode_obligations(self._ys)

    def reply_ans(self, challenge: str, rng: Rng) -> bytes:
        answers = self._env.puzzle.solve(
            self._env.handle, self._ys, self._states, challenge, rng)
        return encode_answers(answers)


class ClassicalPoQProver:
    """Tape-deterministic strategy: no state survives between rounds
    beyond the tape seed, modelling a classical device."""

    def __init__(self, tape_seed: int | None = None):
        self.tape_seed = tape_seed

    def reply_y(self, env: TrialEnv, rng: Rng) -> bytes:
        self._handle = env.handle
        if self.tape_seed is None:
            self.tape_seed = rng.next_u64()
        ys, _ = classical_reply_y(self._handle, self.tape_seed)
        return encode_obligations(ys)

    def reply_ans(self, challenge: str, rng: Rng) -> bytes:
        answers = classical_reply_ans(self._handle, challenge, self.tape_seed)
        return encode_answers(answers)


class ProofOfQuantumness:
    """Timing-free four-message protocol: key, obligations, challenge,
    answers.  Acceptance uses the same verification as the timed runs,
    so quantum and classical success rates carry over unchanged."""

    def __init__(self, config: ProtocolConfig):
        self.config = config
        self.puzzle = parallel_puzzle(config.n, config.k)

    def run(self, prover_factory: Callable[[], object], seed: int) -> PoQResult:
        verifier_rng = Rng(child_seed(seed, 0))
        challenge_rng = Rng(child_seed(seed, 1))
        prover_rng = Rng(child_seed(seed, 2))
        handle, trapdoor = self.puzzle.keygen(verifier_rng)
        env = TrialEnv(self.puzzle, handle, trapdoor)
        prover = prover_factory()

        pk_bytes = handle.key_id.encode()
        y_bytes = prover.reply_y(env, prover_rng)
        challenge = self.puzzle.sample_challenge(challenge_rng)
        ans_bytes = prover.reply_ans(challenge, prover_rng)
        transcript = (
            ("pk", pk_bytes),
            ("y", y_bytes),
            ("b", pack_bits(challenge)),
            ("ans", ans_bytes),
        )
        try:
            ys = decode_obligations(y_bytes)
            answers = decode_answers(ans_bytes)
            accept = self.puzzle.verify(trapdoor, ys, challenge, answers)
        except (ValueError, IndexError, struct.error, LengthMismatch,
                TagMismatch):
            accept = False
        return PoQResult(accept=accept, transcript=transcript)


def poq_transform(config: ProtocolConfig) -> ProofOfQuantumness:
    """Strip the timing layer from the protocol, keeping message order."""
    return ProofOfQuantumness(config)


# ---------------------------------------------------------------------------
# Bulk estimation


@dataclass(frozen=True)
class RunTally:
    successes: int
    trials: int
    rate: float
    ci_low: float
    ci_high: float
    reasons: dict[FailureReason, int]


def estimate_acceptance(config: ProtocolConfig, trials: int, seed: int, *,
                        runner=run_prpv, prover=None, adversaries=None) -> RunTally:
    """Acceptance frequency over independent seeded runs with a Wilson
    95 percent interval and a failure-reason histogram."""
    if trials < 1:
        raise InvalidTrials(f"trials must be >= 1, got {trials}")
    successes = 0
    reasons: dict[FailureReason, int] = {}
    for i in range(trials):
        outcome = runner(config, child_seed(seed, i), prover=prover,
                         adversaries=adversaries)
        if outcome.verdict.accept:
            successes += 1
        else:
            r = outcome.verdict.reason
            reasons[r] = reasons.get(r, 0) + 1
    low, high = wilson_interval(successes, trials)
    return RunTally(successes, trials, successes / trials, low, high, reasons)
