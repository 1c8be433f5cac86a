"""Attack-pair tests: acceptance rates against theory, compiler replay
equality, entanglement budget accounting, and registry guards."""

import pytest

from posverif.adversary import (
    ATTACK_NAMES,
    ClassicalForwardPair,
    ForwardingPair,
    GuessingPair,
    TeleportPair,
    forwarding_compiler,
    make_attack,
    teleport_attack,
)
from posverif.bits import encode_parts, pack_bits
from posverif.errors import (
    BudgetExceeded,
    ConfigInvalid,
    KTooLarge,
    NotClassicalTape,
    UnknownAttack,
)
from posverif.protocol import (
    ClassicalProver,
    FailureReason,
    ProtocolConfig,
    TrialEnv,
    estimate_acceptance,
    run_prpv,
)
from posverif.puzzle import parallel_puzzle
from posverif.rng import Rng, child_seed
from posverif.stats import (
    classical_prover_rate,
    guessing_rate,
    honest_completeness,
    teleport_rate,
)


class TestGuessingAttack:
    @pytest.mark.parametrize("k,trials", [(1, 2000), (2, 2000), (4, 2000),
                                          (8, 2500)])
    def test_rate_matches_theory(self, k, trials):
        cfg = ProtocolConfig(n=8, k=k)
        tally = estimate_acceptance(cfg, trials=trials, seed=300 + k,
                                    adversaries=GuessingPair())
        theory = guessing_rate(8, k)
        assert tally.ci_low <= theory <= tally.ci_high

    def test_failures_are_verification_only(self):
        cfg = ProtocolConfig(n=8, k=1)
        tally = estimate_acceptance(cfg, trials=400, seed=301,
                                    adversaries=GuessingPair())
        assert set(tally.reasons) <= {FailureReason.VER_FAIL}

    def test_attack_meets_every_deadline(self):
        out = run_prpv(ProtocolConfig(), seed=302, adversaries=GuessingPair())
        t = out.verdict.timings
        assert (t["y0"], t["y1"], t["ans0"], t["ans1"]) == (0, 3, 4, 3)
        assert out.verdict.reason in (FailureReason.NONE, FailureReason.VER_FAIL)

    def test_deterministic_per_seed(self):
        cfg = ProtocolConfig(n=6, k=2)
        pair = GuessingPair()
        a = run_prpv(cfg, seed=303, adversaries=pair)
        b = run_prpv(cfg, seed=303, adversaries=pair)
        assert a.verdict == b.verdict


class TestForwardingCompiler:
    @pytest.mark.parametrize("make_pair", [GuessingPair, ClassicalForwardPair],
                             ids=["guess", "classical_forward"])
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_replay_equality(self, make_pair, k):
        cfg = ProtocolConfig(n=6, k=k)
        pair = make_pair()
        compiled = forwarding_compiler(pair)
        assert compiled.klass == "RF"
        assert compiled.name == f"forward_compiled_{pair.name}"
        for s in range(30):
            seed = child_seed(400 + k, s)
            plain = run_prpv(cfg, seed, adversaries=pair)
            forwarded = run_prpv(cfg, seed, adversaries=compiled)
            assert plain.verdict == forwarded.verdict
            assert (plain.verdict.transcript_bytes()
                    == forwarded.verdict.transcript_bytes())

    def test_rate_survives_compilation(self):
        cfg = ProtocolConfig(n=8, k=2)
        tally = estimate_acceptance(cfg, trials=1200, seed=401,
                                    adversaries=forwarding_compiler(GuessingPair()))
        theory = guessing_rate(8, 2)
        assert tally.ci_low <= theory <= tally.ci_high

    def test_rejects_entangled_pair(self):
        with pytest.raises(NotClassicalTape):
            forwarding_compiler(teleport_attack(8, 1))

    def test_rejects_double_compilation(self):
        with pytest.raises(NotClassicalTape):
            forwarding_compiler(forwarding_compiler(GuessingPair()))

    def test_wide_challenge_rejected_before_running(self):
        cfg = ProtocolConfig(n=4, k=9)
        with pytest.raises(KTooLarge):
            run_prpv(cfg, seed=402,
                     adversaries=forwarding_compiler(GuessingPair()))


class TestTeleportAttack:
    def test_rate_matches_honest_completeness(self):
        cfg = ProtocolConfig(n=8, k=1)
        tally = estimate_acceptance(cfg, trials=1000, seed=500,
                                    adversaries=teleport_attack(8, 1))
        theory = teleport_rate(8, 1)
        assert theory == honest_completeness(8, 1)
        assert tally.ci_low <= theory <= tally.ci_high

    def test_parallel_rate(self):
        cfg = ProtocolConfig(n=6, k=2)
        tally = estimate_acceptance(cfg, trials=600, seed=501,
                                    adversaries=teleport_attack(6, 2))
        assert tally.ci_low <= teleport_rate(6, 2) <= tally.ci_high

    def test_budget_is_exactly_consumed(self):
        puz = parallel_puzzle(8, 1)
        handle, trapdoor = puz.keygen(Rng(3))
        env = TrialEnv(puz, handle, trapdoor)
        pair = teleport_attack(8, 1)
        assert pair.entanglement_budget == 9
        trial = pair.new_trial(env, actor_seed=77)
        y_bytes, m = trial.u1(encode_parts(handle.key_id.encode()))
        n_msg = trial.u2(encode_parts(pack_bits("1")))
        y1_bytes, ans1 = trial.u3(m)
        ans0 = trial.u4(n_msg)
        assert trial.pairs_used == 9
        assert y_bytes == y1_bytes
        assert ans0 == ans1

    def test_sides_agree_for_either_challenge(self):
        puz = parallel_puzzle(6, 1)
        handle, trapdoor = puz.keygen(Rng(4))
        env = TrialEnv(puz, handle, trapdoor)
        for challenge in ("0", "1"):
            trial = teleport_attack(6, 1).new_trial(env, actor_seed=78)
            _, m = trial.u1(encode_parts(handle.key_id.encode()))
            n_msg = trial.u2(encode_parts(pack_bits(challenge)))
            _, ans1 = trial.u3(m)
            assert trial.u4(n_msg) == ans1

    def test_underfunded_budget_rejected_at_construction(self):
        with pytest.raises(BudgetExceeded):
            teleport_attack(8, 1, budget=8)
        with pytest.raises(BudgetExceeded):
            teleport_attack(8, 2, budget=17)

    def test_surplus_budget_allowed(self):
        pair = teleport_attack(8, 1, budget=100)
        assert pair.entanglement_budget == 100

    def test_mismatched_run_parameters_rejected(self):
        cfg = ProtocolConfig(n=8, k=2)
        with pytest.raises(ConfigInvalid):
            run_prpv(cfg, seed=502, adversaries=teleport_attack(8, 1))


class TestClassicalForward:
    def test_rate_matches_classical_prover(self):
        cfg = ProtocolConfig(n=8, k=1)
        tally = estimate_acceptance(cfg, trials=2000, seed=600,
                                    adversaries=ClassicalForwardPair())
        theory = classical_prover_rate(8, 1)
        assert tally.ci_low <= theory <= tally.ci_high

    def test_transcript_equals_positioned_prover(self):
        cfg = ProtocolConfig(n=8, k=2)
        pair = ClassicalForwardPair()
        for s in range(30):
            seed = child_seed(601, s)
            near = run_prpv(cfg, seed, prover=ClassicalProver())
            split = run_prpv(cfg, seed, adversaries=pair)
            assert (near.verdict.transcript_bytes()
                    == split.verdict.transcript_bytes())
            assert near.verdict.accept == split.verdict.accept

    def test_mismatched_tapes_caught(self):
        out = run_prpv(ProtocolConfig(), seed=602,
                       adversaries=ClassicalForwardPair(tape0=1, tape1=2))
        assert out.verdict.reason is FailureReason.MISMATCH


class TestRegistry:
    def test_names(self):
        assert ATTACK_NAMES == ("guess", "forward_compiled_guess", "teleport",
                                "classical_forward")

    def test_constructs_each(self):
        cfg = ProtocolConfig(n=8, k=1)
        assert isinstance(make_attack("guess", cfg), GuessingPair)
        assert isinstance(make_attack("forward_compiled_guess", cfg),
                          ForwardingPair)
        assert isinstance(make_attack("teleport", cfg), TeleportPair)
        assert isinstance(make_attack("classical_forward", cfg),
                          ClassicalForwardPair)

    def test_metadata(self):
        cfg = ProtocolConfig(n=8, k=2)
        guess = make_attack("guess", cfg)
        assert (guess.klass, guess.entanglement_budget) == ("R0", 0)
        tele = make_attack("teleport", cfg)
        assert (tele.klass, tele.entanglement_budget) == ("RL", 18)
        fwd = make_attack("forward_compiled_guess", cfg)
        assert fwd.klass == "RF"

    def test_unknown_rejected(self):
        with pytest.raises(UnknownAttack):
            make_attack("entangle_everything", ProtocolConfig())
