"""Where one round of the worked-example protocol starts to raise fidelity.

Bisects for the Werner fidelity above which the output beats the input, both
for the joint two-pair fidelity and for the fidelity of each output pair.
"""

from __future__ import annotations

from stabedp.edp import all_vectors, run_protocol, werner_input
from stabedp.encoder import ProtocolSpec

EXAMPLE = ('{"p":2,"n":4,"k":2,"xi":[[1,1,1,1,0,0,0,0],[0,0,0,0,1,1,1,1]],'
           '"eta_high":[[0,0,0,0,0,1,0,1],[0,1,0,1,0,0,1,1]],'
           '"xi_high":[[0,0,1,1,0,0,0,0],[0,1,0,1,0,0,0,0]],"lambda":[0,0],"T":[[0,0]]}')


def crossover(gain, lo: float, hi: float) -> float:
    for _ in range(60):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if gain(mid) > 0 else (mid, hi)
    return hi


def main() -> None:
    spec = ProtocolSpec.from_json(EXAMPLE)
    V = all_vectors(2, 2)

    def output(F):
        (br,) = run_protocol(werner_input(F, 4), spec)
        return br.P_out

    def joint(F):
        return output(F).fidelity - F

    def pair(F):
        P = output(F).probs
        return float(min(P[(V[:, j] == 0) & (V[:, 2 + j] == 0)].sum() for j in range(2))) - F

    print(f"joint fidelity exceeds F above   {crossover(joint, 0.5, 0.9):.6f}")
    print(f"per-pair fidelity exceeds F above {crossover(pair, 0.5, 0.9):.6f}")
    for F in (0.6, 0.65, 0.7, 0.75, 0.8, 0.9):
        print(f"F={F:.2f}  joint={joint(F) + F:.6f}  per-pair={pair(F) + F:.6f}")


if __name__ == "__main__":
    main()
