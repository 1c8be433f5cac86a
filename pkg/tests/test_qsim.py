"""Statevector engine tests.

Expected values come from independent oracles computed inside the tests:
full Hadamard transforms are rebuilt as explicit kron-product matrices and
teleportation is checked branch by branch through exhaustive enumeration of
Bell outcomes, never by re-running the engine's own code path.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posverif import qsim
from posverif.bits import int_to_bits, xor_bits, dot_bits
from posverif.errors import (
    CapacityExceeded,
    DuplicateRegister,
    LengthMismatch,
    RegisterViolation,
    UnknownRegister,
)
from posverif.rng import Rng

H1 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def h_matrix(q: int) -> np.ndarray:
    m = np.array([[1]], dtype=np.complex128)
    for _ in range(q):
        m = np.kron(m, H1)
    return m


def dist_of(amps: np.ndarray) -> dict[int, float]:
    return {i: float(p) for i, p in enumerate(np.abs(amps) ** 2) if p > 1e-12}


def random_state(regs, seed: int) -> qsim.StateVector:
    q = sum(w for _, w in regs)
    gen = np.random.default_rng(seed)
    amps = gen.normal(size=1 << q) + 1j * gen.normal(size=1 << q)
    amps /= np.linalg.norm(amps)
    return qsim.StateVector(tuple(regs), amps.astype(np.complex128))


class TestConstruction:
    def test_new_state_is_all_zeros(self):
        s = qsim.new_state([("a", 2), ("b", 1)])
        assert s.num_qubits == 3
        assert s.amps[0] == 1.0 and np.count_nonzero(s.amps) == 1

    def test_register_layout(self):
        s = qsim.new_state([("a", 2), ("b", 3), ("c", 1)])
        assert s.offset("a") == 0 and s.offset("b") == 2 and s.offset("c") == 5
        assert s.width("b") == 3

    def test_capacity_cap(self):
        qsim.new_state([("a", qsim.Q_MAX)])
        with pytest.raises(CapacityExceeded):
            qsim.new_state([("a", qsim.Q_MAX + 1)])
        with pytest.raises(CapacityExceeded):
            qsim.make_epr_pairs(qsim.Q_MAX // 2 + 1)

    def test_duplicate_and_unknown_registers(self):
        with pytest.raises(DuplicateRegister):
            qsim.new_state([("a", 1), ("a", 2)])
        s = qsim.new_state([("a", 1)])
        with pytest.raises(UnknownRegister):
            s.offset("zz")
        with pytest.raises(UnknownRegister):
            qsim.apply_hadamard(s, "zz")

    def test_norm_validation(self):
        with pytest.raises(ValueError):
            qsim.StateVector((("a", 1),), np.array([1.0, 1.0], dtype=np.complex128))

    def test_claw_state_amplitudes(self):
        s = qsim.prepare_claw_state("01", "10")
        # |0,01> and |1,10> at indices 1 and 6
        expect = np.zeros(8, dtype=np.complex128)
        expect[1] = expect[6] = 2**-0.5
        np.testing.assert_allclose(s.amps, expect, atol=1e-15)
        with pytest.raises(LengthMismatch):
            qsim.prepare_claw_state("01", "100")


class TestHadamard:
    def test_matches_matrix_oracle(self):
        """Per-qubit engine pass equals the explicit kron-product matrix."""
        for seed in range(4):
            s = random_state([("a", 1), ("m", 2), ("z", 1)], seed)
            got = qsim.apply_hadamard(s, "m")
            full = np.kron(np.kron(np.eye(2), h_matrix(2)), np.eye(2))
            np.testing.assert_allclose(got.amps, full @ s.amps, atol=1e-12)

    @given(st.integers(0, 1000))
    @settings(max_examples=40, derandomize=True)
    def test_involution(self, seed):
        s = random_state([("r", 3)], seed)
        back = qsim.apply_hadamard(qsim.apply_hadamard(s, "r"), "r")
        np.testing.assert_allclose(back.amps, s.amps, atol=1e-12)

    def test_norm_preserved(self):
        s = random_state([("r", 4)], 99)
        h = qsim.apply_hadamard(s, "r")
        assert abs(np.vdot(h.amps, h.amps).real - 1.0) < 1e-12

    def test_claw_hadamard_support(self):
        """Full Hadamard of a claw state: c is determined by d.

        Oracle: explicit matrix transform of the claw amplitudes. The
        support must be exactly {(c,d): c = d.(x0 xor x1)} with uniform
        weight 2^-n, which makes 2^n satisfying pairs in total.
        """
        for n in range(1, 5):
            for trial in range(3):
                r = Rng(1000 * n + trial)
                x0 = r.bits(n)
                x1 = r.bits(n)
                while x1 == x0:
                    x1 = r.bits(n)
                s = qsim.prepare_claw_state(x0, x1)
                oracle_amps = h_matrix(n + 1) @ s.amps
                oracle = dist_of(oracle_amps)
                shift = xor_bits(x0, x1)
                expected = {}
                for d_int in range(1 << n):
                    d = int_to_bits(d_int, n)
                    c = dot_bits(d, shift)
                    expected[(c << n) | d_int] = 2.0**-n
                assert set(oracle) == set(expected)
                for idx, p in expected.items():
                    assert abs(oracle[idx] - p) < 1e-12
                # engine path agrees with the oracle
                h = qsim.apply_hadamard(qsim.apply_hadamard(s, "bit"), "preimage")
                got = qsim.measurement_distribution(
                    qsim.merge_registers(h, ("bit", "preimage"), "all"), "all"
                )
                assert {int(k, 2): v for k, v in got.items()} == pytest.approx(expected, abs=1e-12)


class TestMeasurement:
    def test_distribution_is_born_rule(self):
        s = random_state([("r", 3)], 5)
        d = qsim.measurement_distribution(s, "r")
        oracle = dist_of(s.amps)
        assert {int(k, 2): v for k, v in d.items()} == pytest.approx(oracle, abs=1e-12)
        assert abs(sum(d.values()) - 1.0) < 1e-12

    def test_marginal_distribution(self):
        """Marginal of one register sums the joint over the other."""
        s = random_state([("a", 2), ("b", 2)], 6)
        da = qsim.measurement_distribution(s, "a")
        joint = np.abs(s.amps.reshape(4, 4)) ** 2
        np.testing.assert_allclose(
            [da[int_to_bits(i, 2)] for i in range(4)], joint.sum(axis=1), atol=1e-12
        )

    def test_measure_frequencies(self):
        """Sampled outcome frequencies match the distribution within 4 sigma."""
        s = random_state([("r", 3)], 7)
        dist = qsim.measurement_distribution(s, "r")
        r = Rng(2024)
        n = 100_000
        counts = {}
        for _ in range(n):
            rec, _ = qsim.measure(s, "r", r)
            counts[rec.outcome] = counts.get(rec.outcome, 0) + 1
        assert set(counts) <= set(dist)
        for out, p in dist.items():
            bound = 4 * np.sqrt(p * (1 - p) / n)
            assert abs(counts.get(out, 0) / n - p) < bound

    def test_measure_residual_matches_collapse(self):
        s = random_state([("a", 2), ("b", 2)], 8)
        rec, residual = qsim.measure(s, "a", Rng(1))
        p, projected = qsim.collapse(s, "a", rec.outcome)
        assert abs(p - rec.probability) < 1e-12
        np.testing.assert_allclose(residual.amps, projected.amps, atol=1e-12)
        assert residual.names() == ("b",)

    def test_measure_to_empty_state(self):
        s = qsim.prepare_claw_state("0", "1")
        rec1, s1 = qsim.measure(s, "bit", Rng(3))
        rec2, s2 = qsim.measure(s1, "preimage", Rng(4))
        assert s2.num_qubits == 0 and len(s2.amps) == 1
        assert rec2.outcome == rec1.outcome  # claw with x_b = b

    def test_measure_deterministic_per_seed(self):
        s = random_state([("r", 4)], 9)
        a = [qsim.measure(s, "r", Rng(s0))[0].outcome for s0 in range(20)]
        b = [qsim.measure(s, "r", Rng(s0))[0].outcome for s0 in range(20)]
        assert a == b

    def test_collapse_zero_outcome_rejected(self):
        s = qsim.prepare_claw_state("00", "11")
        with pytest.raises(ValueError):
            qsim.collapse(s, "preimage", "01")


class TestEprAndTeleport:
    def test_epr_distribution(self):
        s = qsim.make_epr_pairs(3)
        d = qsim.measurement_distribution(s, "R")
        assert d == pytest.approx({int_to_bits(i, 3): 0.125 for i in range(8)}, abs=1e-12)
        # measuring R forces S to the same outcome
        rec, rest = qsim.measure(s, "R", Rng(5))
        d2 = qsim.measurement_distribution(rest, "S")
        assert d2 == pytest.approx({rec.outcome: 1.0}, abs=1e-12)

    def test_teleport_width_mismatch(self):
        s = qsim.tensor(qsim.new_state([("psi", 2)]), qsim.make_epr_pairs(1))
        with pytest.raises(LengthMismatch):
            qsim.teleport(s, "psi", "R", Rng(0))

    def _test_states(self):
        cases = []
        for q in (1, 2, 3, 4):
            cases.append((f"zeros{q}", qsim.new_state([("psi", q)])))
            cases.append((f"rand{q}", random_state([("psi", q)], 40 + q)))
        for n in (1, 2, 3):
            claw = qsim.prepare_claw_state(int_to_bits(1, n), int_to_bits((1 << n) - 1, n))
            claw = qsim.merge_registers(claw, ("bit", "preimage"), "psi")
            cases.append((f"claw{n}", claw))
        plus = qsim.apply_hadamard(qsim.new_state([("psi", 2)]), "psi")
        cases.append(("plus2", plus))
        return cases

    def test_teleport_commutation_exhaustive(self):
        """Every Bell branch sends psi to X^k0 Z^k1 psi, exactly.

        Enumerates all (k1, k0) outcomes of the Bell measurement with
        deterministic collapse: each branch has probability 4^-q, the
        remote standard-basis distribution shifted by k0 equals psi's, and
        the remote Hadamard-basis distribution shifted by k1 equals that
        of H psi.
        """
        for label, psi in self._test_states():
            q = psi.num_qubits
            base_std = qsim.measurement_distribution(psi, "psi")
            base_had = qsim.measurement_distribution(qsim.apply_hadamard(psi, "psi"), "psi")
            joint = qsim.tensor(psi, qsim.make_epr_pairs(q))
            pre = qsim.bell_circuit(joint, "psi", "R")
            for k1_int, k0_int in itertools.product(range(1 << q), repeat=2):
                k1 = int_to_bits(k1_int, q)
                k0 = int_to_bits(k0_int, q)
                p1, s1 = qsim.collapse(pre, "psi", k1)
                p2, remote = qsim.collapse(s1, "R", k0)
                assert abs(p1 * p2 - 4.0**-q) < 1e-12, label
                got_std = qsim.measurement_distribution(remote, "S")
                shifted = {xor_bits(out, k0): p for out, p in got_std.items()}
                assert shifted == pytest.approx(base_std, abs=1e-12), label
                got_had = qsim.measurement_distribution(
                    qsim.apply_hadamard(remote, "S"), "S"
                )
                shifted_had = {xor_bits(out, k1): p for out, p in got_had.items()}
                assert shifted_had == pytest.approx(base_had, abs=1e-12), label

    def test_teleport_sampled_path(self):
        """teleport() of |0...0> leaves the remote register equal to k0."""
        for seed in range(25):
            joint = qsim.tensor(qsim.new_state([("psi", 2)]), qsim.make_epr_pairs(2))
            k0, k1, rest = qsim.teleport(joint, "psi", "R", Rng(seed))
            d = qsim.measurement_distribution(rest, "S")
            assert d == pytest.approx({k0: 1.0}, abs=1e-12)
            assert rest.names() == ("S",)

    def test_teleport_consumes_source(self):
        psi = random_state([("psi", 1)], 3)
        joint = qsim.tensor(psi, qsim.make_epr_pairs(1))
        k0, k1, rest = qsim.teleport(joint, "psi", "R", Rng(11))
        assert rest.num_qubits == 1 and len(k0) == 1 and len(k1) == 1


class TestPlumbing:
    def test_tensor_layout(self):
        a = qsim.new_state([("a", 1)])
        b = random_state([("b", 2)], 12)
        t = qsim.tensor(a, b)
        assert t.names() == ("a", "b")
        np.testing.assert_allclose(t.amps[:4], b.amps, atol=1e-15)
        with pytest.raises(DuplicateRegister):
            qsim.tensor(a, qsim.new_state([("a", 1)]))

    def test_tensor_capacity(self):
        a = qsim.new_state([("a", 13)])
        with pytest.raises(CapacityExceeded):
            qsim.tensor(a, qsim.new_state([("b", 12)]))

    def test_split_merge_roundtrip(self):
        s = random_state([("r", 3)], 13)
        split = qsim.split_register(s, "r", [("r0", 1), ("r1", 2)])
        assert split.names() == ("r0", "r1")
        np.testing.assert_allclose(split.amps, s.amps, atol=1e-15)
        merged = qsim.merge_registers(split, ("r0", "r1"), "r")
        assert merged.regs == s.regs
        with pytest.raises(LengthMismatch):
            qsim.split_register(s, "r", [("x", 1)])
        with pytest.raises(UnknownRegister):
            qsim.merge_registers(split, ("r1", "r0"), "bad")

    def test_permute_basis(self):
        s = random_state([("r", 2)], 14)
        perm = np.array([1, 0, 3, 2])
        p = qsim.permute_basis(s, perm)
        np.testing.assert_allclose(p.amps[perm], s.amps, atol=1e-15)


class TestScopedState:
    def test_grant_enforced(self):
        cell = qsim.SharedState(qsim.make_epr_pairs(2))
        mine = qsim.ScopedState(cell, {"R"})
        theirs = qsim.ScopedState(cell, {"S"})
        with pytest.raises(RegisterViolation):
            mine.apply_hadamard("S")
        with pytest.raises(RegisterViolation):
            theirs.measure("R", Rng(0))
        assert mine.registers() == ("R",)

    def test_views_share_the_cell(self):
        cell = qsim.SharedState(qsim.make_epr_pairs(2))
        mine = qsim.ScopedState(cell, {"R"})
        theirs = qsim.ScopedState(cell, {"S"})
        rec = mine.measure("R", Rng(8))
        assert theirs.measurement_distribution("S") == pytest.approx(
            {rec.outcome: 1.0}, abs=1e-12
        )

    def test_unknown_register_after_consumption(self):
        cell = qsim.SharedState(qsim.make_epr_pairs(1))
        mine = qsim.ScopedState(cell, {"R"})
        mine.measure("R", Rng(0))
        with pytest.raises(UnknownRegister):
            mine.measure("R", Rng(0))
