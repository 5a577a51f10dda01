"""Information retrieval diagnostics on the channel state of a circuit.

The channel state doubles the register: every input qubit is maximally
entangled with a reference partner before the circuit runs on the input
half.  Mutual information between Alice's references and an observed
output subsystem R (plus Bob's references B) then measures how fast her
input spreads: once it saturates at 2|A| bits, any such R suffices to
recover the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .circuits import (
    CircuitProgram,
    CZEven,
    CZOdd,
    GlobalH,
    GlobalP,
    GlobalPDag,
    Permute,
    Permutation,
    TwoQubitCliffordLayer,
    clifford_table,
    cz_even_bonds,
    cz_odd_bonds,
)
from .seeding import substream
from .tableau import StabilizerTableau


@dataclass
class ChannelState:
    """2N-qubit stabilizer state: outputs at 0..N-1, references at N..2N-1.

    Reference N+i was EPR-paired with input i before the circuit ran.
    """

    n_inputs: int
    tableau: StabilizerTableau

    def references(self, inputs) -> list[int]:
        return [self.n_inputs + int(i) for i in inputs]

    def outputs(self) -> range:
        return range(self.n_inputs)


def channel_state(program: CircuitProgram) -> ChannelState:
    """Prepares N EPR pairs and runs the program on the input half."""
    n = program.n_qubits
    t = StabilizerTableau.new_polarized(2 * n, "z")
    for i in range(n):
        t.apply_h(n + i)
        t.apply_cnot(n + i, i)
    _execute_on_inputs(program, t, n)
    return ChannelState(n_inputs=n, tableau=t)


def _execute_on_inputs(program: CircuitProgram, t: StabilizerTableau, n: int) -> None:
    """Runs a width-n program on qubits 0..n-1 of a wider tableau."""
    for layer in program.layers:
        if isinstance(layer, GlobalH):
            for q in range(n):
                t.apply_h(q)
        elif isinstance(layer, GlobalP):
            for q in range(n):
                t.apply_phase(q)
        elif isinstance(layer, GlobalPDag):
            for q in range(n):
                t.apply_phase_dag(q)
        elif isinstance(layer, CZEven):
            for a, b in cz_even_bonds(n):
                t.apply_cz(a, b)
        elif isinstance(layer, CZOdd):
            for a, b in cz_odd_bonds(n):
                t.apply_cz(a, b)
        elif isinstance(layer, Permute):
            full = list(layer.perm.map) + list(range(n, t.n_qubits))
            t.apply_permutation(Permutation(tuple(full)))
        elif isinstance(layer, TwoQubitCliffordLayer):
            for (a, b), gid in zip(layer.bonds, layer.gate_ids):
                t.apply_pauli_table(a, b, clifford_table(gid))
        else:  # pragma: no cover
            raise TypeError(f"unknown layer {layer!r}")


def mutual_info_bits(cs: ChannelState, alice_inputs, r_subset) -> int:
    """I2(A : R,B) in bits, via the pure-state complement identity.

    A is the set of Alice's reference qubits, R an output subsystem and
    B the remaining references.  Equals 2|A| - I2(A : complement of R).
    """
    alice = sorted(set(int(i) for i in alice_inputs))
    r = set(int(q) for q in r_subset)
    n = cs.n_inputs
    if alice and not 0 <= alice[0] <= alice[-1] < n:
        raise IndexError("alice input outside register")
    if r and not all(0 <= q < n for q in r):
        raise IndexError("R outside the output register")
    a_refs = cs.references(alice)
    r_bar = [q for q in range(n) if q not in r]
    t = cs.tableau
    i2_a_rbar = (
        t.renyi2_entropy_bits(a_refs)
        + t.renyi2_entropy_bits(r_bar)
        - t.renyi2_entropy_bits(a_refs + r_bar)
    )
    return 2 * len(alice) - i2_a_rbar


def mutual_info_bits_direct(cs: ChannelState, alice_inputs, r_subset) -> int:
    """I2(A : R,B) evaluated without the complement shortcut."""
    alice = sorted(set(int(i) for i in alice_inputs))
    r = sorted(set(int(q) for q in r_subset))
    n = cs.n_inputs
    a_refs = cs.references(alice)
    b_refs = [n + i for i in range(n) if i not in set(alice)]
    rb = r + b_refs
    t = cs.tableau
    return (
        t.renyi2_entropy_bits(a_refs)
        + t.renyi2_entropy_bits(rb)
        - t.renyi2_entropy_bits(a_refs + rb)
    )


@dataclass
class MutualInfoStats:
    size_a: int
    size_r: int
    samples: int
    mean_bits: float
    stderr_bits: float


def mutual_info_samples(
    cs: ChannelState,
    size_a: int,
    size_r: int,
    samples: int,
    seed: int,
    random_alice: bool = False,
) -> MutualInfoStats:
    """Mean I2(A:RB) over jointly resampled A placements and R subsets.

    Alice's inputs default to 0..size_a-1; with random_alice they are
    drawn uniformly per sample together with R.
    """
    n = cs.n_inputs
    if not 1 <= size_a <= n:
        raise ValueError("size_a outside 1..N")
    if not 0 <= size_r <= n:
        raise ValueError("size_r outside 0..N")
    total = 0
    total_sq = 0
    for k in range(samples):
        rng = substream(seed, f"mi-a{size_a}-r{size_r}", k)
        if random_alice:
            alice = sorted(int(q) for q in rng.choice(n, size_a, replace=False))
        else:
            alice = list(range(size_a))
        r_subset = sorted(int(q) for q in rng.choice(n, size_r, replace=False))
        i2 = mutual_info_bits(cs, alice, r_subset)
        total += i2
        total_sq += i2 * i2
    mean = total / samples
    var = (total_sq - samples * mean**2) / (samples - 1) if samples > 1 else 0.0
    return MutualInfoStats(
        size_a=size_a,
        size_r=size_r,
        samples=samples,
        mean_bits=mean,
        stderr_bits=math.sqrt(max(var, 0.0) / samples),
    )


def min_r_for_saturation(
    cs: ChannelState,
    size_a: int,
    samples: int,
    seed: int,
    threshold: float = 0.95,
    random_alice: bool = False,
) -> tuple[int | None, list[MutualInfoStats]]:
    """Smallest |R| whose mean I2(A:RB) reaches threshold * 2|A| bits.

    Returns (size or None, the scanned curve).  Scans |R| upward and
    stops at the first size that saturates.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold outside (0, 1]")
    target = threshold * 2 * size_a
    curve: list[MutualInfoStats] = []
    for size_r in range(cs.n_inputs + 1):
        stats = mutual_info_samples(cs, size_a, size_r, samples, seed, random_alice)
        curve.append(stats)
        if stats.mean_bits >= target:
            return size_r, curve
    return None, curve
