"""Circuit programs built from global rotations, CZ layers and shuffles.

A program is an ordered list of layers acting on a fixed register width.
Only CZ-type layers (CZEven, CZOdd, TwoQubitCliffordLayer) count as
interaction layers; the circuit depth t is the number of those.

The shuffle permutation rotates the binary representation of a site
index one place to the right: site b_m..b_2 b_1 moves to b_1 b_m..b_2.
Applied between nearest-neighbour CZ layers it realizes hypercube
connectivity in logarithmic depth.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

CLIFFORD2_ORDER = 11520


# -- permutations ------------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """Bijection of sites: site i moves to position map[i]."""

    map: tuple[int, ...]

    def __post_init__(self):
        n = len(self.map)
        if sorted(self.map) != list(range(n)):
            raise ValueError("not a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return len(self.map)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, t in enumerate(self.map):
            inv[t] = i
        return Permutation(tuple(inv))

    def compose(self, first: "Permutation") -> "Permutation":
        """Permutation equal to `first` followed by self."""
        if first.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.map[t] for t in first.map))

    def is_identity(self) -> bool:
        return all(t == i for i, t in enumerate(self.map))


def faro_shuffle(n: int) -> Permutation:
    """Riffle permutation: rotate the m-bit site index right by one place.

    Requires n = 2**m.  The low bit becomes the high bit, so the two
    halves of the register interleave perfectly.
    """
    m = n.bit_length() - 1
    if n < 2 or (1 << m) != n:
        raise ValueError("faro shuffle needs a power-of-two register")
    return Permutation(tuple(((i >> 1) | ((i & 1) << (m - 1))) for i in range(n)))


# -- layers ------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalH:
    """Hadamard on every site."""


@dataclass(frozen=True)
class GlobalP:
    """Phase gate on every site."""


@dataclass(frozen=True)
class GlobalPDag:
    """Inverse phase gate on every site."""


@dataclass(frozen=True)
class CZEven:
    """CZ on bonds (0,1), (2,3), ..."""


@dataclass(frozen=True)
class CZOdd:
    """CZ on bonds (1,2), (3,4), ... with open boundaries."""


@dataclass(frozen=True)
class Permute:
    perm: Permutation


@dataclass(frozen=True)
class TwoQubitCliffordLayer:
    """Independent two-qubit Cliffords on disjoint bonds.

    gate_ids index the canonical enumeration of the 11520 two-qubit
    Clifford gates (global phase ignored).
    """

    bonds: tuple[tuple[int, int], ...]
    gate_ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.bonds) != len(self.gate_ids):
            raise ValueError("one gate id per bond")
        seen: set[int] = set()
        for a, b in self.bonds:
            if a == b or a in seen or b in seen:
                raise ValueError("bonds must be disjoint")
            seen.update((a, b))


CircuitLayer = GlobalH | GlobalP | GlobalPDag | CZEven | CZOdd | Permute | TwoQubitCliffordLayer

_INTERACTION_TYPES = (CZEven, CZOdd, TwoQubitCliffordLayer)


def cz_even_bonds(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((2 * i, 2 * i + 1) for i in range(n // 2))


def cz_odd_bonds(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((2 * i + 1, 2 * i + 2) for i in range((n - 1) // 2))


def is_interaction(layer: CircuitLayer) -> bool:
    return isinstance(layer, _INTERACTION_TYPES)


# -- programs ----------------------------------------------------------------


@dataclass(frozen=True)
class CircuitProgram:
    n_qubits: int
    layers: tuple[CircuitLayer, ...]

    def __post_init__(self):
        for layer in self.layers:
            if isinstance(layer, Permute) and layer.perm.n != self.n_qubits:
                raise ValueError("permutation width mismatch")
            if isinstance(layer, TwoQubitCliffordLayer):
                for a, b in layer.bonds:
                    if not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                        raise ValueError("bond outside register")

    @property
    def interaction_count(self) -> int:
        return sum(1 for l in self.layers if is_interaction(l))

    def to_json(self) -> str:
        out = []
        for layer in self.layers:
            if isinstance(layer, GlobalH):
                out.append({"type": "global_h"})
            elif isinstance(layer, GlobalP):
                out.append({"type": "global_p"})
            elif isinstance(layer, GlobalPDag):
                out.append({"type": "global_p_dag"})
            elif isinstance(layer, CZEven):
                out.append({"type": "cz_even"})
            elif isinstance(layer, CZOdd):
                out.append({"type": "cz_odd"})
            elif isinstance(layer, Permute):
                out.append({"type": "permute", "map": list(layer.perm.map)})
            elif isinstance(layer, TwoQubitCliffordLayer):
                out.append(
                    {
                        "type": "clifford2",
                        "bonds": [list(b) for b in layer.bonds],
                        "gate_ids": list(layer.gate_ids),
                    }
                )
            else:  # pragma: no cover
                raise TypeError(f"unknown layer {layer!r}")
        return json.dumps({"n_qubits": self.n_qubits, "layers": out})

    @classmethod
    def from_json(cls, text: str) -> "CircuitProgram":
        doc = json.loads(text)
        layers: list[CircuitLayer] = []
        for item in doc["layers"]:
            kind = item["type"]
            if kind == "global_h":
                layers.append(GlobalH())
            elif kind == "global_p":
                layers.append(GlobalP())
            elif kind == "global_p_dag":
                layers.append(GlobalPDag())
            elif kind == "cz_even":
                layers.append(CZEven())
            elif kind == "cz_odd":
                layers.append(CZOdd())
            elif kind == "permute":
                layers.append(Permute(Permutation(tuple(item["map"]))))
            elif kind == "clifford2":
                layers.append(
                    TwoQubitCliffordLayer(
                        tuple(tuple(b) for b in item["bonds"]),
                        tuple(item["gate_ids"]),
                    )
                )
            else:
                raise ValueError(f"unknown layer type {kind!r}")
        return cls(doc["n_qubits"], tuple(layers))


# -- builders ----------------------------------------------------------------


def build_hypercube_circuit(m: int) -> CircuitProgram:
    """m rounds of even-bond CZ followed by the riffle shuffle on 2**m sites.

    The net shuffle over m rounds is the identity and the output on a
    fully x-polarized input is the m-dimensional hypercube graph state.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    n = 1 << m
    shuffle = faro_shuffle(n)
    layers: list[CircuitLayer] = []
    for _ in range(m):
        layers.append(CZEven())
        layers.append(Permute(shuffle))
    return CircuitProgram(n, tuple(layers))


def build_scrambling_circuit(m: int) -> CircuitProgram:
    """Fast scrambler on 2**m sites with depth t = 2m.

    Each round applies a global phase gate, a global Hadamard, a CZ
    layer and the inverse riffle shuffle; the first m rounds use even
    bonds, the last m rounds odd bonds.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    n = 1 << m
    unshuffle = faro_shuffle(n).inverse()
    layers: list[CircuitLayer] = []
    for half in (CZEven(), CZOdd()):
        for _ in range(m):
            layers.append(GlobalP())
            layers.append(GlobalH())
            layers.append(half)
            layers.append(Permute(unshuffle))
    return CircuitProgram(n, tuple(layers))


def build_nn_bricklayer(n: int, t: int) -> CircuitProgram:
    """Shuffle-free analogue of the scrambler: alternating even/odd CZ bricks."""
    if n < 2 or t < 1:
        raise ValueError("need n >= 2 and t >= 1")
    layers: list[CircuitLayer] = []
    for k in range(t):
        layers.append(GlobalP())
        layers.append(GlobalH())
        layers.append(CZEven() if k % 2 == 0 else CZOdd())
    return CircuitProgram(n, tuple(layers))


def build_random_nn(n: int, t: int, rng: np.random.Generator) -> CircuitProgram:
    """Brickwork of uniformly random two-qubit Cliffords on a line."""
    if n < 2 or t < 1:
        raise ValueError("need n >= 2 and t >= 1")
    layers: list[CircuitLayer] = []
    for k in range(t):
        bonds = cz_even_bonds(n) if k % 2 == 0 else cz_odd_bonds(n)
        ids = tuple(int(g) for g in rng.integers(0, CLIFFORD2_ORDER, size=len(bonds)))
        layers.append(TwoQubitCliffordLayer(bonds, ids))
    return CircuitProgram(n, tuple(layers))


def build_random_all_to_all(n: int, t: int, rng: np.random.Generator) -> CircuitProgram:
    """Random even-bond Cliffords followed by a uniform site permutation, t times."""
    if n < 2 or t < 1:
        raise ValueError("need n >= 2 and t >= 1")
    layers: list[CircuitLayer] = []
    for _ in range(t):
        bonds = cz_even_bonds(n)
        ids = tuple(int(g) for g in rng.integers(0, CLIFFORD2_ORDER, size=len(bonds)))
        layers.append(TwoQubitCliffordLayer(bonds, ids))
        layers.append(Permute(Permutation(tuple(int(x) for x in rng.permutation(n)))))
    return CircuitProgram(n, tuple(layers))


def truncate_interactions(program: CircuitProgram, t: int) -> CircuitProgram:
    """Prefix of a program ending right after its t-th interaction layer."""
    if t < 0 or t > program.interaction_count:
        raise ValueError("t outside 0..interaction_count")
    layers: list[CircuitLayer] = []
    seen = 0
    for layer in program.layers:
        if seen == t:
            break
        layers.append(layer)
        if is_interaction(layer):
            seen += 1
    return CircuitProgram(program.n_qubits, tuple(layers))


def conjugate_program(program: CircuitProgram) -> CircuitProgram:
    """Complex conjugate of a program in the computational basis.

    H, CZ and permutations are real; the phase gate maps to its inverse.
    """
    layers: list[CircuitLayer] = []
    for layer in program.layers:
        if isinstance(layer, GlobalP):
            layers.append(GlobalPDag())
        elif isinstance(layer, GlobalPDag):
            layers.append(GlobalP())
        elif isinstance(layer, (GlobalH, CZEven, CZOdd, Permute)):
            layers.append(layer)
        else:
            raise ValueError(f"no conjugate defined for {type(layer).__name__}")
    return CircuitProgram(program.n_qubits, tuple(layers))


# -- execution ---------------------------------------------------------------


def execute(program: CircuitProgram, state, upto_layer: int | None = None):
    """Runs a program on a tableau or statevector engine, mutating the state.

    upto_layer, when given, stops right after that many interaction
    layers; trailing non-interaction layers are not applied.
    """
    if state.n_qubits != program.n_qubits:
        raise ValueError("state width does not match program")
    if upto_layer is not None and not 0 <= upto_layer <= program.interaction_count:
        raise ValueError("upto_layer outside 0..interaction_count")
    seen = 0
    for layer in program.layers:
        if upto_layer is not None and seen == upto_layer:
            break
        apply_layer(layer, state)
        if is_interaction(layer):
            seen += 1
    return state


def apply_layer(layer: CircuitLayer, state) -> None:
    n = state.n_qubits
    if isinstance(layer, GlobalH):
        state.apply_global_h()
    elif isinstance(layer, GlobalP):
        state.apply_global_phase()
    elif isinstance(layer, GlobalPDag):
        state.apply_global_phase_dag()
    elif isinstance(layer, CZEven):
        for a, b in cz_even_bonds(n):
            state.apply_cz(a, b)
    elif isinstance(layer, CZOdd):
        for a, b in cz_odd_bonds(n):
            state.apply_cz(a, b)
    elif isinstance(layer, Permute):
        state.apply_permutation(layer.perm)
    elif isinstance(layer, TwoQubitCliffordLayer):
        if hasattr(state, "apply_pauli_table"):
            for (a, b), gid in zip(layer.bonds, layer.gate_ids):
                state.apply_pauli_table(a, b, clifford_table(gid))
        else:
            for (a, b), gid in zip(layer.bonds, layer.gate_ids):
                state.apply_two_qubit_unitary(a, b, clifford_unitary(gid))
    else:
        raise TypeError(f"unknown layer {layer!r}")


# -- the two-qubit Clifford group ---------------------------------------------


def _img_h(img: tuple[int, ...], q: int) -> tuple[int, ...]:
    x, z = img[2 * q], img[2 * q + 1]
    neg = img[4] ^ (x & z)
    out = list(img)
    out[2 * q], out[2 * q + 1], out[4] = z, x, neg
    return tuple(out)


def _img_p(img: tuple[int, ...], q: int) -> tuple[int, ...]:
    x, z = img[2 * q], img[2 * q + 1]
    out = list(img)
    out[2 * q + 1] = z ^ x
    out[4] = img[4] ^ (x & z)
    return tuple(out)


def _img_cnot(img: tuple[int, ...], c: int, t: int) -> tuple[int, ...]:
    xc, zc = img[2 * c], img[2 * c + 1]
    xt, zt = img[2 * t], img[2 * t + 1]
    out = list(img)
    out[2 * t] = xt ^ xc
    out[2 * c + 1] = zc ^ zt
    out[4] = img[4] ^ (xc & zt & (xt ^ zc ^ 1))
    return tuple(out)


_GENERATORS = (
    ("h0", lambda e: tuple(_img_h(img, 0) for img in e)),
    ("h1", lambda e: tuple(_img_h(img, 1) for img in e)),
    ("p0", lambda e: tuple(_img_p(img, 0) for img in e)),
    ("p1", lambda e: tuple(_img_p(img, 1) for img in e)),
    ("cnot01", lambda e: tuple(_img_cnot(img, 0, 1) for img in e)),
    ("cnot10", lambda e: tuple(_img_cnot(img, 1, 0) for img in e)),
)

# element = 4 images of (X_a, Z_a, X_b, Z_b); image = (xa, za, xb, zb, neg)
_IDENTITY_ELEMENT = (
    (1, 0, 0, 0, 0),
    (0, 1, 0, 0, 0),
    (0, 0, 1, 0, 0),
    (0, 0, 0, 1, 0),
)

_group_cache: dict[str, object] = {}


def two_qubit_clifford_group() -> list[tuple]:
    """All 11520 two-qubit Clifford gates modulo global phase.

    Each element records the signed images of X_a, Z_a, X_b, Z_b.  The
    list is sorted by image key, so gate ids are stable across runs.
    """
    cached = _group_cache.get("elements")
    if cached is None:
        visited = {_IDENTITY_ELEMENT: ()}
        frontier = [_IDENTITY_ELEMENT]
        while frontier:
            nxt = []
            for elem in frontier:
                word = visited[elem]
                for name, action in _GENERATORS:
                    out = action(elem)
                    if out not in visited:
                        visited[out] = word + (name,)
                        nxt.append(out)
            frontier = nxt
        elements = sorted(visited)
        _group_cache["elements"] = elements
        _group_cache["words"] = {e: visited[e] for e in elements}
    return _group_cache["elements"]  # type: ignore[return-value]


def clifford_word(gid: int) -> tuple[str, ...]:
    """Generator sequence (applied left to right) that builds gate gid."""
    elements = two_qubit_clifford_group()
    return _group_cache["words"][elements[gid]]  # type: ignore[index]


def _xz_mul(phase1: int, bits1: tuple, phase2: int, bits2: tuple):
    """Product of i**phase * XZ-form Paulis on two qubits."""
    phase = (phase1 + phase2 + 2 * (bits1[1] & bits2[0]) + 2 * (bits1[3] & bits2[2])) % 4
    bits = tuple(b1 ^ b2 for b1, b2 in zip(bits1, bits2))
    return phase, bits


@lru_cache(maxsize=None)
def clifford_table(gid: int) -> np.ndarray:
    """Conjugation table of gate gid over the 16 two-qubit Paulis.

    Row index packs (x_a, z_a, x_b, z_b) MSB-first; row contents are the
    image bits and a sign-flip bit.
    """
    elem = two_qubit_clifford_group()[gid]
    images = []
    for img in elem:
        bits = img[:4]
        phase = (2 * img[4] + bits[0] * bits[1] + bits[2] * bits[3]) % 4
        images.append((phase, bits))
    table = np.zeros((16, 5), dtype=np.uint8)
    for code in range(16):
        xa, za, xb, zb = (code >> 3) & 1, (code >> 2) & 1, (code >> 1) & 1, code & 1
        phase, bits = 0, (0, 0, 0, 0)
        for exp, image in zip((xa, za, xb, zb), images):
            if exp:
                phase, bits = _xz_mul(phase, bits, *image)
        phase = (phase + xa * za + xb * zb) % 4  # Hermitian normalization of the input
        canon = bits[0] * bits[1] + bits[2] * bits[3]
        rem = (phase - canon) % 4
        if rem % 2:  # pragma: no cover - would indicate a broken group element
            raise AssertionError("non-Hermitian conjugation result")
        table[code] = (*bits, rem // 2)
    return table


_GATE_MATRICES = {
    "h0": np.kron(np.array([[1, 1], [1, -1]]) / np.sqrt(2), np.eye(2)),
    "h1": np.kron(np.eye(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2)),
    "p0": np.kron(np.diag([1, 1j]), np.eye(2)),
    "p1": np.kron(np.eye(2), np.diag([1, 1j])),
    "cnot01": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cnot10": np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex),
}


@lru_cache(maxsize=None)
def clifford_unitary(gid: int) -> np.ndarray:
    """4x4 unitary of gate gid on basis |q_a q_b> (q_a is the high bit)."""
    u = np.eye(4, dtype=complex)
    for name in clifford_word(gid):
        u = _GATE_MATRICES[name] @ u
    return u
