import numpy as np
import pytest

from fastscramble.circuits import (
    CLIFFORD2_ORDER,
    clifford_table,
    clifford_unitary,
)
from fastscramble.dense import DenseState
from fastscramble.seeding import substream
from fastscramble.tableau import StabilizerTableau


def test_polarized_generators():
    t = StabilizerTableau.new_polarized(3, "z")
    assert t.generator_strings() == ["+ZII", "+IZI", "+IIZ"]
    t = StabilizerTableau.new_polarized(2, "x")
    assert t.generator_strings() == ["+XI", "+IX"]
    t = StabilizerTableau.new_polarized(2, "y")
    assert t.generator_strings() == ["+YI", "+IY"]


def test_polarized_rejects_unknown_basis():
    with pytest.raises(ValueError):
        StabilizerTableau.new_polarized(2, "w")


def test_hadamard_swaps_x_and_z():
    t = StabilizerTableau.new_polarized(1, "x")
    t.apply_h(0)
    assert t.generator_strings() == ["+Z"]
    t.apply_h(0)
    assert t.generator_strings() == ["+X"]


def test_phase_cycles_x_to_y_to_minus_x():
    t = StabilizerTableau.new_polarized(1, "x")
    t.apply_phase(0)
    assert t.generator_strings() == ["+Y"]
    t.apply_phase(0)
    assert t.generator_strings() == ["-X"]
    t.apply_phase_dag(0)
    assert t.generator_strings() == ["+Y"]
    t.apply_phase_dag(0)
    assert t.generator_strings() == ["+X"]


def test_cnot_propagates_x_and_z():
    t = StabilizerTableau.new_polarized(2, "x")
    t.apply_cnot(0, 1)
    assert t.generator_strings() == ["+XX", "+IX"]
    t = StabilizerTableau.new_polarized(2, "z")
    t.apply_cnot(0, 1)
    assert t.generator_strings() == ["+ZI", "+ZZ"]


def test_cz_conjugation_signs():
    # X on one leg of a CZ picks up Z on the other; XX -> YY keeps +.
    t = StabilizerTableau.new_polarized(2, "x")
    t.apply_cz(0, 1)
    assert t.generator_strings() == ["+XZ", "+ZX"]
    t = StabilizerTableau.new_polarized(2, "x")
    t.apply_cnot(0, 1)  # generators XX, IX
    t.apply_cz(0, 1)
    assert t.generator_strings()[0] == "+YY"


def test_bell_state_entropy_and_generators():
    t = StabilizerTableau.new_polarized(2, "z")
    t.apply_h(0)
    t.apply_cnot(0, 1)
    assert sorted(t.generator_strings()) == ["+XX", "+ZZ"]
    assert t.renyi2_entropy_bits([0]) == 1
    assert t.renyi2_entropy_bits([1]) == 1
    assert t.renyi2_entropy_bits([0, 1]) == 0
    assert t.mutual_info_bits([0], [1]) == 2


def test_ghz_entropies():
    t = StabilizerTableau.new_polarized(3, "z")
    t.apply_h(0)
    t.apply_cnot(0, 1)
    t.apply_cnot(1, 2)
    for q in range(3):
        assert t.renyi2_entropy_bits([q]) == 1
    assert t.renyi2_entropy_bits([0, 1]) == 1


def test_cz_ring_block_entropy():
    # CZ around a ring from |+...+>: a contiguous block has two cut bonds.
    n = 6
    t = StabilizerTableau.new_polarized(n, "x")
    for q in range(n):
        t.apply_cz(q, (q + 1) % n)
    for start in range(n):
        block = [(start + k) % n for k in range(3)]
        assert t.renyi2_entropy_bits(block) == 2
    assert t.renyi2_entropy_bits([0]) == 1


def test_global_gates_match_per_qubit_loops():
    rng = substream(11, "global-vs-loop", 0)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        a = StabilizerTableau.new_polarized(n, "z")
        _randomize(a, rng)
        b = a.copy()
        a.apply_global_h()
        for q in range(n):
            b.apply_h(q)
        assert a.generator_strings() == b.generator_strings()
        a.apply_global_phase()
        for q in range(n):
            b.apply_phase(q)
        assert a.generator_strings() == b.generator_strings()
        a.apply_global_phase_dag()
        for q in range(n):
            b.apply_phase_dag(q)
        assert a.generator_strings() == b.generator_strings()


def _randomize(t: StabilizerTableau, rng, depth: int = 24) -> None:
    n = t.n_qubits
    for _ in range(depth):
        kind = int(rng.integers(0, 5))
        q = int(rng.integers(0, n))
        r = int(rng.integers(0, n))
        if kind == 0:
            t.apply_h(q)
        elif kind == 1:
            t.apply_phase(q)
        elif kind == 2:
            t.apply_phase_dag(q)
        elif kind == 3 and q != r:
            t.apply_cnot(q, r)
        elif kind == 4 and q != r:
            t.apply_cz(q, r)


def _dense_twin(n: int, rng, depth: int = 24):
    """Runs the same random gate sequence on both engines."""
    t = StabilizerTableau.new_polarized(n, "z")
    d = DenseState.new_polarized(n, "z")
    for _ in range(depth):
        kind = int(rng.integers(0, 5))
        q = int(rng.integers(0, n))
        r = int(rng.integers(0, n))
        if kind == 0:
            t.apply_h(q)
            d.apply_h(q)
        elif kind == 1:
            t.apply_phase(q)
            d.apply_phase(q)
        elif kind == 2:
            t.apply_phase_dag(q)
            d.apply_phase_dag(q)
        elif kind == 3 and q != r:
            t.apply_cnot(q, r)
            d.apply_cnot(q, r)
        elif kind == 4 and q != r:
            t.apply_cz(q, r)
            d.apply_cz(q, r)
    return t, d


def test_entropies_match_dense_engine():
    rng = substream(5, "tableau-vs-dense", 0)
    for _ in range(15):
        n = int(rng.integers(2, 6))
        t, d = _dense_twin(n, rng)
        for mask in range(1 << n):
            sub = [q for q in range(n) if mask >> q & 1]
            s_int = t.renyi2_entropy_bits(sub)
            s_dense = d.renyi2_entropy_bits(sub)
            assert abs(s_int - s_dense) < 1e-9


def test_pauli_table_matches_unitary_conjugation():
    """Conjugation tables agree with the dense action of the same gate."""
    rng = substream(6, "table-vs-unitary", 0)
    for _ in range(12):
        gid = int(rng.integers(0, CLIFFORD2_ORDER))
        table = clifford_table(gid)
        u = clifford_unitary(gid)
        t = StabilizerTableau.new_polarized(4, "z")
        d = DenseState.new_polarized(4, "z")
        _sync_random_state(t, d, rng)
        a, b = 1, 3
        t.apply_pauli_table(a, b, table)
        d.apply_two_qubit_unitary(a, b, u)
        for mask in range(16):
            sub = [q for q in range(4) if mask >> q & 1]
            assert abs(t.renyi2_entropy_bits(sub) - d.renyi2_entropy_bits(sub)) < 1e-9


def _sync_random_state(t, d, rng, depth: int = 16):
    n = t.n_qubits
    for _ in range(depth):
        kind = int(rng.integers(0, 4))
        q = int(rng.integers(0, n))
        r = int(rng.integers(0, n))
        if kind == 0:
            t.apply_h(q)
            d.apply_h(q)
        elif kind == 1:
            t.apply_phase(q)
            d.apply_phase(q)
        elif kind == 2 and q != r:
            t.apply_cnot(q, r)
            d.apply_cnot(q, r)
        elif kind == 3 and q != r:
            t.apply_cz(q, r)
            d.apply_cz(q, r)


def test_permutation_relabels_subsystems():
    rng = substream(7, "perm-entropy", 0)
    from fastscramble.circuits import Permutation

    for _ in range(10):
        n = 6
        t = StabilizerTableau.new_polarized(n, "z")
        _randomize(t, rng)
        p = tuple(int(x) for x in rng.permutation(n))
        before = {}
        for mask in range(1, 1 << n, 7):
            sub = tuple(q for q in range(n) if mask >> q & 1)
            before[sub] = t.renyi2_entropy_bits(sub)
        t.apply_permutation(Permutation(p))
        for sub, s in before.items():
            moved = sorted(p[q] for q in sub)
            assert t.renyi2_entropy_bits(moved) == s


def test_complement_symmetry():
    rng = substream(8, "complement", 0)
    n = 8
    t = StabilizerTableau.new_polarized(n, "x")
    _randomize(t, rng, depth=60)
    for _ in range(50):
        size = int(rng.integers(0, n + 1))
        sub = sorted(int(q) for q in rng.choice(n, size, replace=False))
        comp = [q for q in range(n) if q not in set(sub)]
        assert t.renyi2_entropy_bits(sub) == t.renyi2_entropy_bits(comp)


def test_validate_accepts_evolved_states():
    rng = substream(9, "validate", 0)
    t = StabilizerTableau.new_polarized(6, "y")
    _randomize(t, rng, depth=80)
    t.validate()


def test_validate_rejects_dependent_rows():
    t = StabilizerTableau.new_polarized(2, "z")
    t._xz[1] = t._xz[0]
    with pytest.raises(AssertionError):
        t.validate()


def test_entropy_argument_errors():
    t = StabilizerTableau.new_polarized(3, "z")
    with pytest.raises(IndexError):
        t.renyi2_entropy_bits([3])
    with pytest.raises(ValueError):
        t.renyi2_entropy_bits([0, 0])
    with pytest.raises(ValueError):
        t.mutual_info_bits([0, 1], [1, 2])


def test_empty_subsystem_has_zero_entropy():
    t = StabilizerTableau.new_polarized(4, "x")
    assert t.renyi2_entropy_bits([]) == 0
