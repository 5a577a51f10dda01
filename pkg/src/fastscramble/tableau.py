"""Stabilizer tableau engine.

A state on n qubits is stored as n generator rows over an X block, a Z
block, and a sign bit.  Row q of a fresh z-polarized state is +Z_q.  The
sign bit encodes +1 as 1 and -1 as 0.  A row with both the X and the Z bit
set on a qubit carries the Hermitian Y there.

Second-order Renyi entropies come from GF(2) ranks of the generator
matrix restricted to a subsystem's X and Z columns: S_A in bits equals
rank(M_A) - |A|, never negative for a valid tableau.
"""
from __future__ import annotations

import numpy as np

from .gf2 import BitMatrix, _n_words, parity_per_row, rank_words

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


class StabilizerTableau:
    """Mutable stabilizer state with bit-packed generator rows."""

    def __init__(self, n_qubits: int, xz: np.ndarray, signs: np.ndarray):
        self.n_qubits = n_qubits
        self._wx = _n_words(n_qubits)
        self._xz = xz
        self._signs = signs

    # -- construction ------------------------------------------------------

    @classmethod
    def new_polarized(cls, n_qubits: int, basis: str = "z") -> "StabilizerTableau":
        """Product state of +1 eigenstates of X, Y or Z on every qubit."""
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        basis = basis.lower()
        if basis not in ("x", "y", "z"):
            raise ValueError(f"unknown basis {basis!r}")
        wx = _n_words(n_qubits)
        xz = np.zeros((n_qubits, 2 * wx), dtype=np.uint64)
        one = np.uint64(1)
        for q in range(n_qubits):
            if basis in ("x", "y"):
                xz[q, q >> 6] |= one << np.uint64(q & 63)
            if basis in ("y", "z"):
                xz[q, wx + (q >> 6)] |= one << np.uint64(q & 63)
        signs = np.ones(n_qubits, dtype=np.uint8)
        return cls(n_qubits, xz, signs)

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n_qubits, self._xz.copy(), self._signs.copy())

    # -- bit access --------------------------------------------------------

    def _bits(self, q: int, z_block: bool) -> np.ndarray:
        """Column of X or Z bits for qubit q, as a 0/1 uint64 vector."""
        w = (self._wx if z_block else 0) + (q >> 6)
        return (self._xz[:, w] >> np.uint64(q & 63)) & np.uint64(1)

    def _xor_into(self, q: int, z_block: bool, bits: np.ndarray) -> None:
        w = (self._wx if z_block else 0) + (q >> 6)
        self._xz[:, w] ^= bits << np.uint64(q & 63)

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n_qubits:
            raise IndexError(f"qubit {q} outside 0..{self.n_qubits - 1}")

    # -- single- and two-qubit gates ----------------------------------------

    def apply_h(self, q: int) -> None:
        """Hadamard: X <-> Z, Y -> -Y."""
        self._check_qubit(q)
        x, z = self._bits(q, False), self._bits(q, True)
        self._signs ^= (x & z).astype(np.uint8)
        diff = x ^ z
        self._xor_into(q, False, diff)
        self._xor_into(q, True, diff)

    def apply_phase(self, q: int) -> None:
        """Phase gate: X -> Y, Y -> -X, Z fixed."""
        self._check_qubit(q)
        x, z = self._bits(q, False), self._bits(q, True)
        self._signs ^= (x & z).astype(np.uint8)
        self._xor_into(q, True, x)

    def apply_phase_dag(self, q: int) -> None:
        """Inverse phase gate: X -> -Y, Y -> X, Z fixed."""
        self._check_qubit(q)
        x, z = self._bits(q, False), self._bits(q, True)
        self._signs ^= (x & (z ^ np.uint64(1))).astype(np.uint8)
        self._xor_into(q, True, x)

    def apply_x(self, q: int) -> None:
        self._check_qubit(q)
        self._signs ^= self._bits(q, True).astype(np.uint8)

    def apply_y(self, q: int) -> None:
        self._check_qubit(q)
        self._signs ^= (self._bits(q, False) ^ self._bits(q, True)).astype(np.uint8)

    def apply_z(self, q: int) -> None:
        self._check_qubit(q)
        self._signs ^= self._bits(q, False).astype(np.uint8)

    def apply_cnot(self, control: int, target: int) -> None:
        """CNOT: X_c -> X_c X_t, Z_t -> Z_c Z_t."""
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise ValueError("control and target coincide")
        xc, zc = self._bits(control, False), self._bits(control, True)
        xt, zt = self._bits(target, False), self._bits(target, True)
        flip = xc & zt & (xt ^ zc ^ np.uint64(1))
        self._signs ^= flip.astype(np.uint8)
        self._xor_into(target, False, xc)
        self._xor_into(control, True, zt)

    def apply_cz(self, a: int, b: int) -> None:
        """CZ: X_a -> X_a Z_b, X_b -> Z_a X_b."""
        self._check_qubit(a)
        self._check_qubit(b)
        if a == b:
            raise ValueError("CZ needs two distinct qubits")
        xa, za = self._bits(a, False), self._bits(a, True)
        xb, zb = self._bits(b, False), self._bits(b, True)
        self._signs ^= (xa & xb & (za ^ zb)).astype(np.uint8)
        self._xor_into(a, True, xb)
        self._xor_into(b, True, xa)

    # -- whole-register operations ------------------------------------------

    def apply_global_h(self) -> None:
        """Hadamard on every qubit: swaps the X and Z blocks."""
        wx = self._wx
        xpart = self._xz[:, :wx]
        zpart = self._xz[:, wx:]
        self._signs ^= parity_per_row(xpart & zpart)
        tmp = xpart.copy()
        xpart[:] = zpart
        zpart[:] = tmp

    def apply_global_phase(self) -> None:
        """Phase gate on every qubit."""
        wx = self._wx
        xpart = self._xz[:, :wx]
        zpart = self._xz[:, wx:]
        self._signs ^= parity_per_row(xpart & zpart)
        zpart ^= xpart

    def apply_global_phase_dag(self) -> None:
        """Inverse phase gate on every qubit."""
        wx = self._wx
        xpart = self._xz[:, :wx]
        zpart = self._xz[:, wx:]
        # padding bits of the X block are zero, so ~Z padding cannot leak in
        self._signs ^= parity_per_row(xpart & ~zpart)
        zpart ^= xpart

    def apply_permutation(self, perm) -> None:
        """Relabels qubits: qubit i moves to position perm[i]."""
        p = np.asarray(getattr(perm, "map", perm), dtype=np.int64)
        n = self.n_qubits
        if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
            raise ValueError("not a permutation of 0..n-1")
        wx = self._wx
        for block in (0, 1):
            words = self._xz[:, block * wx : (block + 1) * wx]
            bits = np.unpackbits(
                np.ascontiguousarray(words).view(np.uint8), axis=1, bitorder="little"
            )
            out = np.zeros_like(bits)
            out[:, p] = bits[:, :n]
            words[:] = np.packbits(out, axis=1, bitorder="little").view(np.uint64)

    def apply_pauli_table(self, a: int, b: int, table: np.ndarray) -> None:
        """Applies a two-qubit Clifford given as a 16-row conjugation table.

        Row index is (x_a, z_a, x_b, z_b) packed MSB-first; columns are the
        four image bits plus a sign-flip bit.
        """
        self._check_qubit(a)
        self._check_qubit(b)
        xa, za = self._bits(a, False), self._bits(a, True)
        xb, zb = self._bits(b, False), self._bits(b, True)
        idx = (xa << np.uint64(3)) | (za << np.uint64(2)) | (xb << np.uint64(1)) | zb
        idx = idx.astype(np.intp)
        img = table[idx]  # (n, 5)
        self._signs ^= img[:, 4].astype(np.uint8)
        self._write_bit(a, False, img[:, 0])
        self._write_bit(a, True, img[:, 1])
        self._write_bit(b, False, img[:, 2])
        self._write_bit(b, True, img[:, 3])

    def _write_bit(self, q: int, z_block: bool, bits: np.ndarray) -> None:
        w = (self._wx if z_block else 0) + (q >> 6)
        shift = np.uint64(q & 63)
        mask = ~(np.uint64(1) << shift)
        self._xz[:, w] = (self._xz[:, w] & mask) | (bits.astype(np.uint64) << shift)

    # -- entropies -----------------------------------------------------------

    def _subsystem_cols(self, qubits) -> np.ndarray:
        """Packed word-bit positions of the X and Z columns of a subsystem."""
        qs = sorted(int(q) for q in qubits)
        if qs and (qs[0] < 0 or qs[-1] >= self.n_qubits):
            raise IndexError("qubit index out of range")
        if len(set(qs)) != len(qs):
            raise ValueError("duplicate qubit in subsystem")
        base = 64 * self._wx
        return np.array(qs + [base + q for q in qs], dtype=np.int64)

    def renyi2_entropy_bits(self, qubits) -> int:
        """Renyi-2 entanglement entropy of a subsystem, in bits.

        Equals rank of the generator matrix restricted to the subsystem's
        X and Z columns, minus the subsystem size.
        """
        qs = list(qubits)
        if not qs:
            return 0
        cols = self._subsystem_cols(qs)
        work = self._xz.copy()
        return rank_words(work, cols) - len(qs)

    def mutual_info_bits(self, a_qubits, b_qubits) -> int:
        """Renyi-2 mutual information I(A:B) = S_A + S_B - S_AB, in bits."""
        a = set(int(q) for q in a_qubits)
        b = set(int(q) for q in b_qubits)
        if a & b:
            raise ValueError("subsystems overlap")
        return (
            self.renyi2_entropy_bits(a)
            + self.renyi2_entropy_bits(b)
            - self.renyi2_entropy_bits(a | b)
        )

    # -- export / debugging ---------------------------------------------------

    @property
    def matrix(self) -> BitMatrix:
        """Generators as one BitMatrix: X block, Z block, then the sign column."""
        n = self.n_qubits
        bits = np.zeros((n, 2 * n + 1), dtype=np.uint8)
        xz = np.unpackbits(
            np.ascontiguousarray(self._xz).view(np.uint8), axis=1, bitorder="little"
        )
        bits[:, :n] = xz[:, :n]
        bits[:, n : 2 * n] = xz[:, 64 * self._wx : 64 * self._wx + n]
        bits[:, 2 * n] = self._signs
        return BitMatrix.from_array(bits)

    def generator_strings(self) -> list[str]:
        """One generator per line: a sign character then I/X/Y/Z per qubit."""
        n = self.n_qubits
        arr = self.matrix.to_array()
        lines = []
        for i in range(n):
            sign = "+" if arr[i, 2 * n] else "-"
            body = "".join(
                _PAULI_CHARS[(int(arr[i, q]), int(arr[i, n + q]))] for q in range(n)
            )
            lines.append(sign + body)
        return lines

    def __str__(self) -> str:
        return "\n".join(self.generator_strings())

    def validate(self) -> None:
        """Asserts the generator set is abelian and independent."""
        arr = self.matrix.to_array()
        n = self.n_qubits
        x = arr[:, :n].astype(np.int64)
        z = arr[:, n : 2 * n].astype(np.int64)
        sym = (x @ z.T + z @ x.T) % 2
        if sym.any():
            raise AssertionError("generators do not commute")
        gate = BitMatrix.from_array(arr[:, : 2 * n])
        from .gf2 import rank_gf2

        if rank_gf2(gate) != n:
            raise AssertionError("generators are not independent")
