"""
Arrival times on the verification line
======================================

Two verifiers sit at coordinates 0 and 3 with unit signal speed. V0
announces the key at t=0 and V1 the challenge at t=1, so a prover at
position p in [1, 2) can answer every deadline: its obligation reaches
V0 at 2p (deadline: before 4) and V1 at 3 (exactly 3), and its answers
arrive at 4 (exactly) and 7 - 2p (at most 5). All times are exact
rationals; a prover standing outside the window misses a deadline by an
exact margin, not by epsilon.
"""

from fractions import Fraction

from posverif.protocol import HonestProver, ProtocolConfig, run_prpv

SWEEP = (Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(7, 4), Fraction(199, 100))

print("position   y0      y1   ans0   ans1   verdict")
for position in SWEEP:
    cfg = ProtocolConfig(n=8, k=1, prover_position=position)
    verdict = run_prpv(cfg, seed=11, prover=HonestProver()).verdict
    t = verdict.timings
    print(f"{str(position):>8}   {str(t['y0']):<6}  {t['y1']}    {t['ans0']}      "
          f"{str(t['ans1']):<5}  {'accept' if verdict.accept else verdict.reason.value}")

print("\ndeadlines: y0 < 4, y1 == 3, ans0 == 4, ans1 <= 5")
print("note p = 1 answers ans1 exactly on the deadline and is still on time\n")

# outside the window the geometry itself rejects, before any verification
cfg = ProtocolConfig(n=8, k=1)
for position in (Fraction(1, 2), Fraction(9, 4), Fraction(5, 2)):
    verdict = run_prpv(cfg, seed=11,
                       prover=HonestProver(position=position)).verdict
    late = {label: str(t) for label, t in verdict.timings.items()}
    print(f"p = {str(position):<4} -> {verdict.reason.value:<12} timings {late}")
