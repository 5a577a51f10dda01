"""Statevector engine and the noisy teleportation decoder.

The dense engine mirrors the tableau gate API so circuit programs run on
either backend.  It exists for cross-checks and for physics the tableau
cannot express: weak controlled-phase crosstalk and Pauli-unraveled
depolarizing noise, both of which the decoder experiments need.

Qubit q is bit q of the basis-state index.  States above 20 qubits are
refused.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import (
    CircuitProgram,
    CZEven,
    CZOdd,
    GlobalH,
    GlobalP,
    GlobalPDag,
    Permute,
    TwoQubitCliffordLayer,
    cz_even_bonds,
    cz_odd_bonds,
)
from .seeding import substream

MAX_DENSE_QUBITS = 20

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_P = np.diag([1, 1j]).astype(complex)
_PDAG = np.diag([1, -1j]).astype(complex)
_PAULIS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


class ResourceCapError(RuntimeError):
    """Raised when a dense computation would exceed the qubit cap."""


class DenseState:
    """Full statevector on up to 20 qubits."""

    def __init__(self, n_qubits: int, psi: np.ndarray):
        self.n_qubits = n_qubits
        self.psi = psi
        self._scratch: np.ndarray | None = None

    @classmethod
    def new_polarized(cls, n_qubits: int, basis: str = "z", dtype=np.complex128) -> "DenseState":
        if not 1 <= n_qubits <= MAX_DENSE_QUBITS:
            raise ResourceCapError(f"dense engine handles 1..{MAX_DENSE_QUBITS} qubits")
        basis = basis.lower()
        if basis not in ("x", "y", "z"):
            raise ValueError(f"unknown basis {basis!r}")
        psi = np.zeros(1 << n_qubits, dtype=dtype)
        psi[0] = 1.0
        state = cls(n_qubits, psi)
        if basis in ("x", "y"):
            for q in range(n_qubits):
                state.apply_h(q)
        if basis == "y":
            for q in range(n_qubits):
                state.apply_phase(q)
        return state

    def copy(self) -> "DenseState":
        return DenseState(self.n_qubits, self.psi.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.psi, self.psi)))

    # -- views ---------------------------------------------------------------

    def _split(self, q: int):
        v = self.psi.reshape(-1, 2, 1 << q)
        return v[:, 0, :], v[:, 1, :]

    def _pair(self, hi: int, lo: int) -> np.ndarray:
        return self.psi.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)

    def _check(self, q: int) -> None:
        if not 0 <= q < self.n_qubits:
            raise IndexError(f"qubit {q} outside register")

    # -- single-qubit gates ----------------------------------------------------

    def apply_single(self, q: int, u: np.ndarray) -> None:
        self._check(q)
        self.apply_same_block(q, 1, u)

    def apply_same_block(self, q0: int, width: int, u: np.ndarray) -> None:
        """Applies a 2^width unitary to the adjacent qubits q0..q0+width-1.

        Swaps the state with a scratch buffer instead of writing back, so
        each call costs one read and one write of the full vector.
        """
        if not (0 <= q0 and q0 + width <= self.n_qubits):
            raise IndexError("block outside register")
        u = np.ascontiguousarray(u, dtype=self.psi.dtype)
        m = self.psi.reshape(-1, 1 << width, 1 << q0)
        if self._scratch is None or self._scratch.dtype != self.psi.dtype:
            self._scratch = np.empty_like(self.psi)
        out = self._scratch.reshape(m.shape)
        np.matmul(u, m, out=out)
        self._scratch = self.psi
        self.psi = out.reshape(-1)

    def apply_h(self, q: int) -> None:
        a, b = self._split(q)
        na = a + b
        nb = a - b
        s = 1 / math.sqrt(2)
        a[:] = na * s
        b[:] = nb * s

    def apply_phase(self, q: int) -> None:
        _, b = self._split(q)
        b *= 1j

    def apply_phase_dag(self, q: int) -> None:
        _, b = self._split(q)
        b *= -1j

    def apply_x(self, q: int) -> None:
        a, b = self._split(q)
        tmp = a.copy()
        a[:] = b
        b[:] = tmp

    def apply_y(self, q: int) -> None:
        a, b = self._split(q)
        tmp = a.copy()
        a[:] = -1j * b
        b[:] = 1j * tmp

    def apply_z(self, q: int) -> None:
        _, b = self._split(q)
        b *= -1

    def apply_pauli(self, q: int, kind: str) -> None:
        if kind == "X":
            self.apply_x(q)
        elif kind == "Y":
            self.apply_y(q)
        elif kind == "Z":
            self.apply_z(q)
        else:
            raise ValueError(f"unknown Pauli {kind!r}")

    # -- register-wide gates -----------------------------------------------------

    def apply_global_h(self) -> None:
        for q in range(self.n_qubits):
            self.apply_h(q)

    def apply_global_phase(self) -> None:
        for q in range(self.n_qubits):
            self.apply_phase(q)

    def apply_global_phase_dag(self) -> None:
        for q in range(self.n_qubits):
            self.apply_phase_dag(q)

    # -- two-qubit gates -----------------------------------------------------

    def apply_cz(self, a: int, b: int) -> None:
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError("CZ needs two distinct qubits")
        v = self._pair(max(a, b), min(a, b))
        v[:, 1, :, 1, :] *= -1

    def apply_cphase(self, a: int, b: int, theta: float) -> None:
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError("controlled phase needs two distinct qubits")
        v = self._pair(max(a, b), min(a, b))
        v[:, 1, :, 1, :] *= complex(math.cos(theta), math.sin(theta))

    def apply_cnot(self, control: int, target: int) -> None:
        self._check(control)
        self._check(target)
        if control == target:
            raise ValueError("control and target coincide")
        hi, lo = max(control, target), min(control, target)
        v = self._pair(hi, lo)
        if control == hi:
            tmp = v[:, 1, :, 0, :].copy()
            v[:, 1, :, 0, :] = v[:, 1, :, 1, :]
            v[:, 1, :, 1, :] = tmp
        else:
            tmp = v[:, 0, :, 1, :].copy()
            v[:, 0, :, 1, :] = v[:, 1, :, 1, :]
            v[:, 1, :, 1, :] = tmp

    def apply_two_qubit_unitary(self, a: int, b: int, u: np.ndarray) -> None:
        """4x4 unitary on basis |q_a q_b> with q_a as the high bit."""
        self._check(a)
        self._check(b)
        hi, lo = max(a, b), min(a, b)
        v = self._pair(hi, lo)
        old = {(i, j): v[:, i, :, j, :].copy() for i in (0, 1) for j in (0, 1)}
        for i in (0, 1):
            for j in (0, 1):
                qa, qb = (i, j) if a == hi else (j, i)
                acc = None
                for k in (0, 1):
                    for l in (0, 1):
                        ka, kb = (k, l) if a == hi else (l, k)
                        term = u[2 * qa + qb, 2 * ka + kb] * old[(k, l)]
                        acc = term if acc is None else acc + term
                v[:, i, :, j, :] = acc

    def apply_permutation(self, perm) -> None:
        """Relabels qubits: qubit i moves to position perm[i]."""
        p = np.asarray(getattr(perm, "map", perm), dtype=np.int64)
        n = self.n_qubits
        if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
            raise ValueError("not a permutation of 0..n-1")
        inv = np.empty(n, dtype=np.int64)
        inv[p] = np.arange(n)
        axes = [n - 1 - inv[n - 1 - k] for k in range(n)]
        self.psi = np.ascontiguousarray(
            self.psi.reshape((2,) * n).transpose(axes)
        ).reshape(-1)

    # -- projections and measures ----------------------------------------------

    def project_epr(self, a: int, b: int) -> None:
        """Applies the |00>+|11> pair projector without renormalizing."""
        self._check(a)
        self._check(b)
        v = self._pair(max(a, b), min(a, b))
        s = 0.5 * (v[:, 0, :, 0, :] + v[:, 1, :, 1, :])
        v[:, 0, :, 0, :] = s
        v[:, 1, :, 1, :] = s
        v[:, 0, :, 1, :] = 0
        v[:, 1, :, 0, :] = 0

    def renyi2_entropy_bits(self, qubits) -> float:
        """-log2 of the purity of the reduced state on the given qubits."""
        n = self.n_qubits
        sub = sorted(set(int(q) for q in qubits))
        if sub and (sub[0] < 0 or sub[-1] >= n):
            raise IndexError("qubit index out of range")
        if len(sub) != len(list(qubits)):
            raise ValueError("duplicate qubit in subsystem")
        if not sub:
            return 0.0
        if len(sub) > n - len(sub):  # pure state: use the smaller side
            sub = [q for q in range(n) if q not in set(sub)]
            if not sub:
                return 0.0
        axes = [n - 1 - q for q in sub]
        rest = [ax for ax in range(n) if ax not in set(axes)]
        t = self.psi.reshape((2,) * n).transpose(axes + rest).reshape(1 << len(sub), -1)
        rho = t @ t.conj().T
        trace = float(np.real(np.trace(rho)))
        purity = float(np.real(np.einsum("ij,ji->", rho, rho))) / trace**2
        return -math.log2(purity)


def depolarize_trajectory(
    state: DenseState,
    p: float,
    rng: np.random.Generator,
    qubits=None,
    dephasing_only: bool = False,
) -> list[tuple[int, str]]:
    """One unraveled step of single-qubit depolarizing noise on each qubit.

    Applies X, Y or Z with probability p/4 each (identity otherwise), so
    the trajectory average is (1-p) rho + p I/2 per qubit.  In dephasing
    mode Z is applied with probability p/2 instead.  Returns the Paulis
    applied, in ascending qubit order.
    """
    if not 0 <= p <= 1:
        raise ValueError("p outside [0, 1]")
    targets = list(range(state.n_qubits)) if qubits is None else list(qubits)
    draws = rng.random(len(targets))
    applied: list[tuple[int, str]] = []
    for q, u in zip(targets, draws):
        if dephasing_only:
            if u < p / 2:
                state.apply_z(q)
                applied.append((q, "Z"))
            continue
        if u < p / 4:
            state.apply_x(q)
            applied.append((q, "X"))
        elif u < p / 2:
            state.apply_y(q)
            applied.append((q, "Y"))
        elif u < 3 * p / 4:
            state.apply_z(q)
            applied.append((q, "Z"))
    return applied


# -- teleportation decoder -----------------------------------------------------


@dataclass(frozen=True)
class DecoderSetup:
    """Mirror-circuit teleportation decoder configuration.

    The forward program scrambles N inputs holding half of N EPR pairs;
    its complex conjugate runs on the mirror register.  Alice's inputs
    carry probe EPR pairs whose recovery the decoder attempts.  Weak
    controlled-phase crosstalk acts on the idle neighbour bonds of every
    CZ layer, and depolarizing noise of strength p hits every qubit
    after each interaction layer.
    """

    program: CircuitProgram
    alice_inputs: tuple[int, ...] = (0,)
    p: float = 0.0
    crosstalk: bool = True
    crosstalk_phase: float = math.pi / 64
    dephasing_only: bool = False
    dtype: object = np.complex128

    @property
    def n_inputs(self) -> int:
        return self.program.n_qubits

    @property
    def n_alice(self) -> int:
        return len(self.alice_inputs)

    @property
    def n_total(self) -> int:
        return 2 * self.n_inputs + 2 * self.n_alice


@dataclass
class TrajectoryStats:
    """Monte-Carlo estimates from one decoder run."""

    p_epr: float
    f_epr: float
    delta: float
    stderr_p: float
    stderr_f: float
    stderr_delta: float
    trajectories: int
    size_r: int


def _block_plan(start: int, count: int) -> list[tuple[int, int]]:
    """Covers [start, start+count) with adjacent blocks of width 4, 2, 1."""
    plan = []
    q, rem = start, count
    for width in (4, 2, 1):
        while rem >= width:
            plan.append((q, width))
            q += width
            rem -= width
    return plan


def _kron_powers(u: np.ndarray, dtype) -> dict[int, np.ndarray]:
    u1 = np.ascontiguousarray(u, dtype=dtype)
    u2 = np.kron(u1, u1)
    return {1: u1, 2: u2, 4: np.kron(u2, u2)}


def _single_qubit_ops(setup: DecoderSetup, matrix: np.ndarray):
    """Forward matrix on every input qubit plus its conjugate on the mirror."""
    n = setup.n_inputs
    fwd = _kron_powers(matrix, setup.dtype)
    mir = _kron_powers(matrix.conj(), setup.dtype)
    plan_fwd = _block_plan(0, n)
    plan_mir = _block_plan(n, n)

    def op(state: DenseState) -> None:
        for q0, width in plan_fwd:
            state.apply_same_block(q0, width, fwd[width])
        for q0, width in plan_mir:
            state.apply_same_block(q0, width, mir[width])

    return op


def _interaction_ops(setup: DecoderSetup, layer) -> list:
    n = setup.n_inputs
    bonds = cz_even_bonds(n) if isinstance(layer, CZEven) else cz_odd_bonds(n)
    idle = cz_odd_bonds(n) if isinstance(layer, CZEven) else cz_even_bonds(n)
    phase = setup.crosstalk_phase

    def op(state: DenseState) -> None:
        for a, b in bonds:
            state.apply_cz(a, b)
            state.apply_cz(n + a, n + b)
        if setup.crosstalk:
            for a, b in idle:
                state.apply_cphase(a, b, phase)
                state.apply_cphase(n + a, n + b, -phase)

    return [op]


def _permute_op(setup: DecoderSetup, perm):
    n, total = setup.n_inputs, setup.n_total
    full = np.arange(total, dtype=np.int64)
    pmap = np.asarray(perm.map, dtype=np.int64)
    full[:n] = pmap
    full[n : 2 * n] = n + pmap

    def op(state: DenseState) -> None:
        state.apply_permutation(full)

    return op


def _build_segments(setup: DecoderSetup):
    """Splits the mirrored circuit into segments separated by noise points.

    Returns (segments, n_noise_points): segments[j] is the list of ops
    between noise points j and j+1, with the EPR preparation folded into
    segments[0] and any trailing layers into the last segment.
    """
    program = setup.program
    if program.n_qubits % 2 == 1:
        raise ValueError("decoder expects an even register")
    if setup.n_total > MAX_DENSE_QUBITS:
        raise ResourceCapError(
            f"decoder needs {setup.n_total} qubits, cap is {MAX_DENSE_QUBITS}"
        )
    for a in setup.alice_inputs:
        if not 0 <= a < program.n_qubits:
            raise ValueError("alice input outside register")
    if len(set(setup.alice_inputs)) != len(setup.alice_inputs):
        raise ValueError("duplicate alice input")

    n = setup.n_inputs
    na = setup.n_alice

    def prep(state: DenseState) -> None:
        alice = set(setup.alice_inputs)
        for j, a in enumerate(sorted(alice)):
            qa, qb = 2 * n + j, 2 * n + na + j
            state.apply_h(qa)
            state.apply_cnot(qa, a)
            state.apply_h(qb)
            state.apply_cnot(qb, n + a)
        for i in range(n):
            if i not in alice:
                state.apply_h(i)
                state.apply_cnot(i, n + i)

    segments: list[list] = [[prep]]
    pending: np.ndarray | None = None

    def flush():
        nonlocal pending
        if pending is not None:
            segments[-1].append(_single_qubit_ops(setup, pending))
            pending = None

    for layer in program.layers:
        if isinstance(layer, GlobalP):
            pending = _P if pending is None else _P @ pending
        elif isinstance(layer, GlobalPDag):
            pending = _PDAG if pending is None else _PDAG @ pending
        elif isinstance(layer, GlobalH):
            pending = _H if pending is None else _H @ pending
        elif isinstance(layer, Permute):
            flush()
            segments[-1].append(_permute_op(setup, layer.perm))
        elif isinstance(layer, (CZEven, CZOdd)):
            flush()
            segments[-1].extend(_interaction_ops(setup, layer))
            segments.append([])  # noise point follows each interaction layer
        elif isinstance(layer, TwoQubitCliffordLayer):
            raise ValueError("decoder circuits must use layers with defined conjugates")
        else:  # pragma: no cover
            raise TypeError(f"unknown layer {layer!r}")
    flush()
    return segments, len(segments) - 1


def _apply_noise_row(state: DenseState, setup: DecoderSetup, draws: np.ndarray) -> None:
    p = setup.p
    if setup.dephasing_only:
        for q in np.nonzero(draws < p / 2)[0]:
            state.apply_z(int(q))
        return
    for q in np.nonzero(draws < 3 * p / 4)[0]:
        u = draws[q]
        if u < p / 4:
            state.apply_x(int(q))
        elif u < p / 2:
            state.apply_y(int(q))
        else:
            state.apply_z(int(q))


def run_decoder(
    setup: DecoderSetup,
    size_r: int,
    trajectories: int,
    seed: int,
    fixed_r: tuple[int, ...] | None = None,
) -> TrajectoryStats:
    """Monte-Carlo estimate of the decoder's EPR statistics.

    Per trajectory: sample an output subsystem R of the requested size
    (or use fixed_r), run the mirrored noisy circuit, project the R
    output pairs onto EPR (squared norm -> P_EPR) and then the probe
    pair (conditional squared norm -> F_EPR).  delta is the product
    P_EPR * F_EPR * 4**|A|, equal to 1 for noiseless evolution.
    """
    n = setup.n_inputs
    if not 0 <= size_r <= n:
        raise ValueError("size_r outside 0..N")
    if trajectories < 1:
        raise ValueError("need at least one trajectory")
    if fixed_r is not None:
        fixed = tuple(sorted(int(q) for q in fixed_r))
        if len(set(fixed)) != size_r or any(not 0 <= q < n for q in fixed):
            raise ValueError("fixed_r inconsistent with size_r")

    segments, n_noise = _build_segments(setup)

    # noiseless checkpoints: state right before each noise point, plus the end
    prefixes: list[DenseState] = []
    state = DenseState(
        setup.n_total, np.zeros(1 << setup.n_total, dtype=setup.dtype)
    )
    state.psi[0] = 1.0
    for j, seg in enumerate(segments):
        for op in seg:
            op(state)
        if j < n_noise:
            prefixes.append(state.copy())
    final_clean = state

    na = setup.n_alice
    probe_pairs = [(2 * n + j, 2 * n + na + j) for j in range(na)]
    ps = np.empty(trajectories, dtype=np.float64)
    pfs = np.empty(trajectories, dtype=np.float64)

    for t_index in range(trajectories):
        rng = substream(seed, "decoder-trajectory", t_index)
        if fixed_r is not None:
            r_subset = fixed_r
        else:
            r_subset = tuple(sorted(int(q) for q in rng.choice(n, size_r, replace=False)))
        draws = rng.random((n_noise, setup.n_total))
        if setup.p > 0:
            thresh = setup.p / 2 if setup.dephasing_only else 3 * setup.p / 4
            hits = np.nonzero((draws < thresh).any(axis=1))[0]
        else:
            hits = np.array([], dtype=np.int64)

        if hits.size == 0:
            psi = final_clean.copy()
        else:
            first = int(hits[0])
            psi = prefixes[first].copy()
            _apply_noise_row(psi, setup, draws[first])
            for j in range(first + 1, n_noise + 1):
                for op in segments[j]:
                    op(psi)
                if j < n_noise:
                    _apply_noise_row(psi, setup, draws[j])

        for i in r_subset:
            psi.project_epr(i, n + i)
        p_traj = psi.norm_sq()
        for qa, qb in probe_pairs:
            psi.project_epr(qa, qb)
        ps[t_index] = p_traj
        pfs[t_index] = psi.norm_sq()

    scale = float(4**na)
    p_mean = float(ps.mean())
    pf_mean = float(pfs.mean())
    f_mean = pf_mean / p_mean if p_mean > 0 else 0.0
    tcount = trajectories
    if tcount > 1 and p_mean > 0:
        var_p = float(ps.var(ddof=1))
        var_pf = float(pfs.var(ddof=1))
        cov = float(np.cov(ps, pfs, ddof=1)[0, 1])
        stderr_p = math.sqrt(var_p / tcount)
        stderr_delta = scale * math.sqrt(var_pf / tcount)
        var_f = (
            f_mean**2
            * (var_pf / pf_mean**2 + var_p / p_mean**2 - 2 * cov / (pf_mean * p_mean))
            / tcount
            if pf_mean > 0
            else var_pf / p_mean**2 / tcount
        )
        stderr_f = math.sqrt(max(var_f, 0.0))
    else:
        stderr_p = stderr_f = stderr_delta = 0.0
    return TrajectoryStats(
        p_epr=p_mean,
        f_epr=f_mean,
        delta=scale * pf_mean,
        stderr_p=stderr_p,
        stderr_f=stderr_f,
        stderr_delta=stderr_delta,
        trajectories=tcount,
        size_r=size_r,
    )
