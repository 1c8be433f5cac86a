"""Two-device attacks on the timed protocol.

An attack pair places one device next to each verifier.  Devices talk
only through the simulated channel: the left device handles the key
announcement (u1) and the right-to-left message (u4), the right device
handles the challenge (u2) and the left-to-right message (u3).  Handler
slots draw from independent seeded streams so a compiled replay of a
handler sees exactly the bytes the original would have produced.

Resource classes: R0 pairs share no entanglement, RF pairs additionally
forward the challenge verbatim, RL pairs consume pre-shared EPR pairs.
"""

from __future__ import annotations

from .bits import decode_parts, encode_parts, int_to_bits, pack_bits, unpack_bits, xor_bits
from .errors import (
    BudgetExceeded,
    ConfigInvalid,
    KTooLarge,
    NotClassicalTape,
    UnknownAttack,
)
from .protocol import (
    ProtocolConfig,
    TrialEnv,
    classical_reply_ans,
    classical_reply_y,
)
from .puzzle import (
    Equation,
    Preimage,
    encode_answers,
    encode_obligations,
)
from . import qsim
from .rng import Rng, child_seed

FORWARD_COMPILER_MAX_K = 8


def _slot_rngs(actor_seed: int) -> dict[int, Rng]:
    return {slot: Rng(child_seed(actor_seed, slot)) for slot in range(1, 5)}


def _challenge_of(body: bytes) -> str:
    bits, _ = unpack_bits(decode_parts(body)[0])
    return bits


class GuessingPair:
    """Guess the challenge at key time and commit.

    The left device obligates honestly, samples a challenge guess, and
    measures the claw states in the guessed bases immediately.  Both
    verifiers then receive the same committed bytes, so the run is
    accepted exactly when the guess matches and the honest answers
    verify.
    """

    name = "guess"
    klass = "R0"
    classical_tape = True
    entanglement_budget = 0

    def new_trial(self, env: TrialEnv, actor_seed: int) -> "_GuessingTrial":
        return _GuessingTrial(env, actor_seed)


class _GuessingTrial:
    def __init__(self, env: TrialEnv, actor_seed: int):
        self.env = env
        self.rngs = _slot_rngs(actor_seed)
        self._committed: bytes | None = None

    def u1(self, pk_body: bytes):
        rng = self.rngs[1]
        handle = self.env.resolve(decode_parts(pk_body)[0].decode())
        ys, states = self.env.obligate(rng)
        guess = rng.bits(self.env.puzzle.challenge_len)
        answers = self.env.puzzle.solve(handle, ys, states, guess, rng)
        y_bytes = encode_obligations(ys)
        ans_bytes = encode_answers(answers)
        self._committed = ans_bytes
        return y_bytes, encode_parts(y_bytes, ans_bytes)

    def u2(self, challenge_body: bytes) -> bytes:
        return b""

    def u3(self, m_body: bytes):
        y_bytes, ans_bytes = decode_parts(m_body)
        return y_bytes, ans_bytes

    def u4(self, n_body: bytes) -> bytes:
        return self._committed


class ClassicalForwardPair:
    """Classical devices sharing a response tape.

    Both sides deterministically recompute the classical prover's
    replies from the shared tape; the right device forwards the
    challenge so the left one can answer it too.  Distinct tapes on the
    two sides make the verifiers see conflicting bytes.
    """

    name = "classical_forward"
    klass = "R0"
    classical_tape = True
    entanglement_budget = 0

    def __init__(self, tape0: int | None = None, tape1: int | None = None):
        self.tape0 = tape0
        self.tape1 = tape1

    def new_trial(self, env: TrialEnv, actor_seed: int) -> "_ClassicalForwardTrial":
        tape0 = self.tape0 if self.tape0 is not None else actor_seed
        tape1 = self.tape1 if self.tape1 is not None else actor_seed
        return _ClassicalForwardTrial(env, actor_seed, tape0, tape1)


class _ClassicalForwardTrial:
    def __init__(self, env: TrialEnv, actor_seed: int, tape0: int, tape1: int):
        self.env = env
        self.rngs = _slot_rngs(actor_seed)
        self.tape0 = tape0
        self.tape1 = tape1
        self._challenge: str | None = None  # right-device memory

    def u1(self, pk_body: bytes):
        handle = self.env.resolve(decode_parts(pk_body)[0].decode())
        ys, _ = classical_reply_y(handle, self.tape0)
        return encode_obligations(ys), handle.key_id.encode()

    def u2(self, challenge_body: bytes) -> bytes:
        self._challenge = _challenge_of(challenge_body)
        return challenge_body

    def u3(self, m_body: bytes):
        handle = self.env.resolve(m_body.decode())
        ys, _ = classical_reply_y(handle, self.tape1)
        answers = classical_reply_ans(handle, self._challenge, self.tape1)
        return encode_obligations(ys), encode_answers(answers)

    def u4(self, n_body: bytes) -> bytes:
        challenge = _challenge_of(n_body)
        answers = classical_reply_ans(self.env.handle, challenge, self.tape0)
        return encode_answers(answers)


class ForwardingPair:
    """Compile an unentangled attack into challenge-forwarding shape.

    The left device precomputes, for every possible challenge c, the
    message the original right device would send after seeing c; the
    right device then only forwards the challenge verbatim.  Replays are
    exact because trials are deterministic in (env, actor seed), so per
    seed the compiled pair reproduces the original verdict bit for bit.
    """

    klass = "RF"
    classical_tape = True
    entanglement_budget = 0

    def __init__(self, inner):
        if getattr(inner, "klass", None) != "R0" or not getattr(
                inner, "classical_tape", False):
            raise NotClassicalTape(
                f"cannot compile {getattr(inner, 'name', inner)!r}: "
                "forwarding compilation needs an unentangled classical-tape pair"
            )
        self.inner = inner
        self.name = f"forward_compiled_{inner.name}"

    def new_trial(self, env: TrialEnv, actor_seed: int) -> "_ForwardingTrial":
        width = env.puzzle.challenge_len
        if width > FORWARD_COMPILER_MAX_K:
            raise KTooLarge(
                f"challenge width {width} exceeds the compiler cap "
                f"{FORWARD_COMPILER_MAX_K}"
            )
        return _ForwardingTrial(self.inner, env, actor_seed, width)


class _ForwardingTrial:
    def __init__(self, inner_pair, env: TrialEnv, actor_seed: int, width: int):
        self._make_replica = lambda: inner_pair.new_trial(env, actor_seed)
        self.original = inner_pair.new_trial(env, actor_seed)
        self.width = width
        self._table: dict[str, bytes] | None = None

    def u1(self, pk_body: bytes):
        y_bytes, m_bytes = self.original.u1(pk_body)
        table = {}
        for value in range(1 << self.width):
            challenge = int_to_bits(value, self.width)
            replica = self._make_replica()
            replica.u1(pk_body)
            table[challenge] = replica.u2(encode_parts(pack_bits(challenge)))
        self._table = table
        return y_bytes, m_bytes

    def u2(self, challenge_body: bytes) -> bytes:
        # keep the right device's own state faithful, then forward
        self.original.u2(challenge_body)
        return challenge_body

    def u3(self, m_body: bytes):
        return self.original.u3(m_body)

    def u4(self, n_body: bytes) -> bytes:
        challenge = _challenge_of(n_body)
        return self.original.u4(self._table[challenge])


def forwarding_compiler(pair) -> ForwardingPair:
    """Rewrite an unentangled classical-tape pair so the right device
    forwards the challenge literally; per-seed behaviour is preserved."""
    return ForwardingPair(pair)


class TeleportPair:
    """Route the claw states to the challenge side with pre-shared EPR
    pairs.

    The left device obligates, then teleports each claw qubit through a
    pre-shared pair, consuming n+1 pairs per instance.  The right device
    measures the steered qubits in the challenged bases as soon as the
    challenge arrives; the Pauli corrections travel with the obligations
    and both sides apply them to the same raw outcomes, reproducing the
    honest answer distribution at both verifiers.
    """

    name = "teleport"
    klass = "RL"
    classical_tape = False

    def __init__(self, n: int, k: int, budget: int | None = None):
        required = k * (n + 1)
        if budget is None:
            budget = required
        if budget < required:
            raise BudgetExceeded(
                f"teleporting {k} instances of width {n} needs {required} "
                f"EPR pairs, budget is {budget}"
            )
        self.n = n
        self.k = k
        self.entanglement_budget = budget

    def new_trial(self, env: TrialEnv, actor_seed: int) -> "_TeleportTrial":
        if env.puzzle.n != self.n or env.puzzle.k != self.k:
            raise ConfigInvalid(
                f"attack built for n={self.n}, k={self.k} but run has "
                f"n={env.puzzle.n}, k={env.puzzle.k}"
            )
        return _TeleportTrial(env, actor_seed, self.entanglement_budget)


def _teleport_register(state: qsim.StateVector, rng: Rng):
    """Teleport every qubit of a state, one EPR pair at a time; peak
    width stays at (state width + 2) qubits.

    Returns (k0, k1, remote state): XOR k0 into standard-basis outcomes
    and k1 into Hadamard-basis outcomes of the remote register, in the
    original qubit order.
    """
    width = state.q
    working = qsim.merge_registers(state, state.names(), "src")
    k0 = []
    k1 = []
    for j in range(width):
        rest = width - j - 1
        if rest:
            working = qsim.split_register(working, "src", (("q", 1), ("src", rest)))
        else:
            working = qsim.merge_registers(working, ("src",), "q")
        working = qsim.tensor(working, qsim.make_epr_pairs(1))
        bit0, bit1, working = qsim.teleport(working, "q", "S", rng)
        k0.append(bit0)
        k1.append(bit1)
        if j == 0:
            working = qsim.merge_registers(working, ("R",), "rem")
        else:
            working = qsim.merge_registers(working, ("rem", "R"), "rem")
    return "".join(k0), "".join(k1), working


def _corrected_answers(challenge: str, raws, k0s, k1s):
    answers = []
    for i, b in enumerate(challenge):
        if b == "0":
            bits = xor_bits(raws[i], k0s[i])
            answers.append(Preimage(bits[0], bits[1:]))
        else:
            bits = xor_bits(raws[i], k1s[i])
            answers.append(Equation(bits[0], bits[1:]))
    return tuple(answers)


class _TeleportTrial:
    def __init__(self, env: TrialEnv, actor_seed: int, budget: int):
        self.env = env
        self.rngs = _slot_rngs(actor_seed)
        self.budget = budget
        self.pairs_used = 0
        self.width = env.puzzle.n + 1
        self._remote: list[qsim.StateVector] = []  # right-device registers
        self._k0s: list[str] = []
        self._k1s: list[str] = []
        self._challenge: str | None = None
        self._raws: list[str] | None = None

    def u1(self, pk_body: bytes):
        rng = self.rngs[1]
        self.env.resolve(decode_parts(pk_body)[0].decode())
        ys, states = self.env.obligate(rng)
        for state in states:
            self.pairs_used += self.width
            if self.pairs_used > self.budget:
                raise BudgetExceeded(
                    f"EPR budget {self.budget} exhausted after "
                    f"{self.pairs_used - self.width} pairs"
                )
            k0, k1, remote = _teleport_register(state, rng)
            self._remote.append(remote)
            self._k0s.append(k0)
            self._k1s.append(k1)
        y_bytes = encode_obligations(ys)
        m = encode_parts(
            y_bytes,
            pack_bits("".join(self._k0s)),
            pack_bits("".join(self._k1s)),
        )
        return y_bytes, m

    def u2(self, challenge_body: bytes) -> bytes:
        rng = self.rngs[2]
        challenge = _challenge_of(challenge_body)
        raws = []
        for b, remote in zip(challenge, self._remote):
            if b == "1":
                remote = qsim.apply_hadamard(remote, "rem")
            record, _ = qsim.measure(remote, "rem", rng)
            raws.append(record.outcome)
        self._challenge = challenge
        self._raws = raws
        return encode_parts(pack_bits(challenge), pack_bits("".join(raws)))

    def _split_keys(self, packed: str) -> list[str]:
        return [packed[i * self.width:(i + 1) * self.width]
                for i in range(len(packed) // self.width)]

    def u3(self, m_body: bytes):
        y_bytes, k0_packed, k1_packed = decode_parts(m_body)
        k0s = self._split_keys(unpack_bits(k0_packed)[0])
        k1s = self._split_keys(unpack_bits(k1_packed)[0])
        answers = _corrected_answers(self._challenge, self._raws, k0s, k1s)
        return y_bytes, encode_answers(answers)

    def u4(self, n_body: bytes) -> bytes:
        challenge_packed, raw_packed = decode_parts(n_body)
        challenge, _ = unpack_bits(challenge_packed)
        raws = self._split_keys(unpack_bits(raw_packed)[0])
        answers = _corrected_answers(challenge, raws, self._k0s, self._k1s)
        return encode_answers(answers)


def teleport_attack(n: int, k: int, budget: int | None = None) -> TeleportPair:
    """Entangled pair that wins with the honest completeness rate; the
    default budget is the k*(n+1) EPR pairs it actually consumes."""
    return TeleportPair(n, k, budget)


ATTACK_NAMES = ("guess", "forward_compiled_guess", "teleport",
                "classical_forward")


def make_attack(name: str, config: ProtocolConfig):
    """Attack registry for experiment drivers."""
    if name == "guess":
        return GuessingPair()
    if name == "forward_compiled_guess":
        return forwarding_compiler(GuessingPair())
    if name == "teleport":
        return teleport_attack(config.n, config.k)
    if name == "classical_forward":
        return ClassicalForwardPair()
    raise UnknownAttack(f"unknown attack {name!r}; known: {ATTACK_NAMES}")
