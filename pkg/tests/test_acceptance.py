"""End-to-end acceptance gate.

Each test checks one numbered claim about the package as a whole, prints
a single PASS/FAIL line with the measured numbers, and uses a fixed seed
so the whole gate is deterministic.  Statistical checks use 3-sigma
bands; exact checks use integer equality or 1e-9.
"""

import math

import numpy as np

from fastscramble.circuits import (
    build_hypercube_circuit,
    build_nn_bricklayer,
    build_random_all_to_all,
    build_random_nn,
    build_scrambling_circuit,
    execute,
    truncate_interactions,
)
from fastscramble.dense import DecoderSetup, DenseState, depolarize_trajectory, run_decoder
from fastscramble.experiments import (
    area_law_mean_entropy,
    consecutive_entropy_profile,
    page_curve,
    rmt_deficit_moments_bits,
    rmt_mean_deficit,
    rmt_rank_prob,
)
from fastscramble.graphstate import graph_entropy_bits, hypercube, page_scrambling_fraction
from fastscramble.haydenpreskill import (
    channel_state,
    min_r_for_saturation,
    mutual_info_bits,
    mutual_info_bits_direct,
)
from fastscramble.seeding import substream
from fastscramble.tableau import StabilizerTableau

_LN2 = math.log(2.0)


def _verdict(tag: str, failures: list, detail: str) -> None:
    ok = not failures
    print(f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{tag}: {failures[:8]}"


def _scrambled(n: int, basis: str = "z") -> StabilizerTableau:
    m = n.bit_length() - 1
    state = StabilizerTableau.new_polarized(n, basis)
    execute(build_scrambling_circuit(m), state)
    return state


def test_c01_hypercube_circuit_equals_graph_state():
    """The shuffle circuit prepares the hypercube graph state exactly."""
    failures = []
    checked = 0
    for m in (2, 3, 4):
        n = 1 << m
        state = StabilizerTableau.new_polarized(n, "x")
        execute(build_hypercube_circuit(m), state)
        graph = hypercube(m)
        for mask in range(1 << n):
            subset = [q for q in range(n) if mask >> q & 1]
            s_circ = state.renyi2_entropy_bits(subset)
            s_graph = graph_entropy_bits(graph, subset)
            checked += 1
            if s_circ != s_graph:
                failures.append((m, mask, s_circ, s_graph))
    _verdict("c01", failures, f"exhaustive m=2,3,4 ({checked} subsets, exact)")


def test_c02_q7_small_subsystems_rank_saturated():
    """Every sampled |A| <= 16 subset of the 128-qubit hypercube state
    is maximally entangled."""
    sizes = list(range(1, 17))
    fractions = page_scrambling_fraction(hypercube(7), sizes, 6250, seed=102)
    failures = [(a, f) for a, f in fractions.items() if f != 1.0]
    _verdict("c02", failures, "1e5 subsets of Q7, sizes 1..16, zero deficits")


def _deficit_matches_rank_law(n: int, basis: str, seed: int) -> list:
    """Mean deficit per size vs the random-binary-matrix value, in nats."""
    sizes = [a for a in range(1, n) if 2 * a <= n - 4]
    stats = page_curve(_scrambled(n, basis), sizes, 20000, seed, label=f"c3-{basis}{n}")
    failures = []
    for st in stats:
        _, std_bits = rmt_deficit_moments_bits(n, st.size)
        sigma = std_bits * _LN2 / math.sqrt(st.samples)
        got = st.mean_deficit_bits * _LN2
        want = rmt_mean_deficit(n, st.size)
        if abs(got - want) > 3 * sigma:
            failures.append(
                (n, basis, st.size, round(got, 6), round(want, 6), round(3 * sigma, 6))
            )
    return failures


def test_c03_page_deficit_matches_random_matrix_mean():
    failures = _deficit_matches_rank_law(16, "z", 103) + _deficit_matches_rank_law(
        32, "z", 203
    )
    _verdict("c03", failures, "N=16,32 full depth, 2e4 samples/size, 3-sigma")


def test_c04_deficit_fractions_match_rank_law():
    """Observed deficit fractions at N=16 track the rank-deficit pmf."""
    n = 16
    sizes = [a for a in range(1, n // 2 + 1) if 2 * a <= n - 4]
    stats = page_curve(_scrambled(n), sizes, 20000, 104, label="c4")
    failures = []
    for st in stats:
        for eps in (0, 1):
            want = rmt_rank_prob(n, st.size, eps)
            sigma = math.sqrt(want * (1 - want) / st.samples)
            got = st.deficit_fraction(eps)
            if abs(got - want) > 3 * sigma:
                failures.append((st.size, eps, round(got, 6), round(want, 6)))
    _verdict("c04", failures, "N=16 sizes 1..6, eps 0,1 within 3-sigma")


def test_c05_deficit_agreement_is_basis_independent():
    failures = []
    for basis, seed in (("x", 105), ("y", 205), ("z", 305)):
        failures += _deficit_matches_rank_law(16, basis, seed)
    _verdict("c05", failures, "N=16 deficit agreement for x,y,z inputs")


def test_c06_family_separation_at_half_cut():
    """At N=64, t=12, the shuffle circuit scrambles like all-to-all and
    ten times better than nearest-neighbor."""
    n, size, t = 64, 31, 12
    state = _scrambled(n)
    es = page_curve(state, [size], 20000, 106, label="c6-es")[0]

    def family(builder, label):
        means = []
        for i in range(20):
            prog = builder(n, t, substream(106, f"c6-{label}", i))
            s = StabilizerTableau.new_polarized(n, "z")
            execute(prog, s)
            pg = page_curve(s, [size], 1000, 106 + i, label=f"c6-{label}{i}")[0]
            means.append(pg.mean_deficit_bits)
        arr = np.asarray(means)
        return arr.mean(), arr.std(ddof=1) / math.sqrt(len(arr))

    a2a_mean, a2a_err = family(build_random_all_to_all, "a2a")
    nn_mean, _ = family(build_random_nn, "nn")
    gap = abs(es.mean_deficit_bits - a2a_mean)
    band = 3 * math.hypot(es.stderr_deficit_bits, a2a_err)
    failures = []
    if gap > band:
        failures.append(("a2a", gap, band))
    if nn_mean < 10 * es.mean_deficit_bits:
        failures.append(("nn-ratio", nn_mean / es.mean_deficit_bits))
    _verdict(
        "c06", failures,
        f"es={es.mean_deficit_bits:.4f} a2a={a2a_mean:.4f} "
        f"nn/es={nn_mean / es.mean_deficit_bits:.1f}x",
    )


def test_c07_information_retrieval_needs_few_outputs():
    """|R| only slightly above |A| already carries Alice's information."""
    failures = []
    got = {}
    for n in (32, 64):
        cs = channel_state(build_scrambling_circuit(n.bit_length() - 1))
        for a in (1, 3, 5):
            r_min, _ = min_r_for_saturation(
                cs, a, samples=5000, seed=107, random_alice=True
            )
            got[(n, a)] = r_min
            if r_min is None or r_min > a + 2:
                failures.append((n, a, r_min))
    _verdict("c07", failures, f"r_min={got} all <= |A|+2, 5e3 samples/point")


def test_c08_mutual_information_complement_identity():
    """I2(A:RB) + I2(A: outputs without R) = 2|A|, exactly, per sample."""
    n = 32
    cs = channel_state(build_scrambling_circuit(5))
    t = cs.tableau
    failures = []
    for k in range(10000):
        rng = substream(108, "c8", k)
        a_size = int(rng.integers(1, 9))
        r_size = int(rng.integers(0, n + 1))
        alice = sorted(int(q) for q in rng.choice(n, a_size, replace=False))
        r = sorted(int(q) for q in rng.choice(n, r_size, replace=False))
        lhs = mutual_info_bits_direct(cs, alice, r)
        a_refs = cs.references(alice)
        r_bar = [q for q in range(n) if q not in set(r)]
        i2_rbar = (
            t.renyi2_entropy_bits(a_refs)
            + t.renyi2_entropy_bits(r_bar)
            - t.renyi2_entropy_bits(a_refs + r_bar)
        )
        if lhs + i2_rbar != 2 * a_size:
            failures.append((k, alice, r, lhs, i2_rbar))
            if len(failures) > 5:
                break
    _verdict("c08", failures, "1e4 random (A, R) at N=32, exact in bits")


def test_c09_decoder_matches_tableau_channel():
    """Noiseless dense-engine EPR statistics equal the closed forms from
    the stabilizer channel state, for every |R|."""
    prog = build_scrambling_circuit(3)
    cs = channel_state(prog)
    setup = DecoderSetup(program=prog, alice_inputs=(0,), p=0.0, crosstalk=False)
    failures = []
    for r_size in range(1, 8):
        rng = substream(109, "c9-r", r_size)
        r = tuple(sorted(int(q) for q in rng.choice(8, r_size, replace=False)))
        i2 = mutual_info_bits(cs, [0], r)
        st = run_decoder(setup, r_size, trajectories=10000, seed=109, fixed_r=r)
        tol_p = max(3 * st.stderr_p, 1e-9)
        tol_f = max(3 * st.stderr_f, 1e-9)
        if abs(st.p_epr - 2.0**-i2) > tol_p:
            failures.append(("P", r_size, st.p_epr, 2.0**-i2))
        if abs(st.f_epr - 2.0 ** (i2 - 2)) > tol_f:
            failures.append(("F", r_size, st.f_epr, 2.0 ** (i2 - 2)))
    _verdict("c09", failures, "N=8 |A|=1 p=0, |R|=1..7, 1e4 trajectories each")


def test_c10_delta_normalization_and_noise_ordering():
    """delta = 1 without noise; sinks with depth under noise; the shuffle
    circuit out-teleports a plain brickwork at equal depth."""
    prog = build_scrambling_circuit(3)
    failures = []

    clean = run_decoder(
        DecoderSetup(program=prog, alice_inputs=(0,), p=0.0, crosstalk=True),
        3, trajectories=10000, seed=110,
    )
    if abs(clean.delta - 1.0) > max(3 * clean.stderr_delta, 1e-9):
        failures.append(("clean-delta", clean.delta))

    deltas = {}
    es_t6 = None
    for t in (2, 4, 6):
        setup = DecoderSetup(
            program=truncate_interactions(prog, t), alice_inputs=(0,),
            p=0.02, crosstalk=True, dtype=np.complex64,
        )
        st = run_decoder(setup, 3, trajectories=10000, seed=110)
        deltas[t] = st.delta
        if t == 6:
            es_t6 = st
    if not deltas[2] > deltas[4] > deltas[6]:
        failures.append(("monotone", deltas))

    nn = run_decoder(
        DecoderSetup(
            program=build_nn_bricklayer(8, 6), alice_inputs=(0,),
            p=0.02, crosstalk=True, dtype=np.complex64,
        ),
        3, trajectories=10000, seed=210,
    )
    margin = 3 * math.hypot(es_t6.stderr_f, nn.stderr_f)
    if not es_t6.f_epr > nn.f_epr + margin:
        failures.append(("fidelity-order", es_t6.f_epr, nn.f_epr, margin))
    _verdict(
        "c10", failures,
        f"delta(p=0)={clean.delta:.9f} deltas={{2:{deltas[2]:.3f},4:{deltas[4]:.3f},"
        f"6:{deltas[6]:.3f}}} F_es={es_t6.f_epr:.4f} F_nn={nn.f_epr:.4f}",
    )


def test_c11_depolarizing_trajectories_average_to_channel():
    """Trajectory average of the noisy 1-qubit state is the depolarizing
    channel output, entry by entry."""
    base = DenseState.new_polarized(1, "z")
    base.apply_h(0)
    base.apply_phase(0)
    rho_in = np.outer(base.psi, base.psi.conj())
    failures = []
    for p in (0.1, 0.5):
        samples = 100000
        entries = np.empty((samples, 4), dtype=complex)
        for k in range(samples):
            rng = substream(111, f"c11-p{p}", k)
            s = base.copy()
            depolarize_trajectory(s, p, rng)
            rho = np.outer(s.psi, s.psi.conj())
            entries[k] = rho.reshape(-1)
        mean = entries.mean(axis=0)
        want = ((1 - p) * rho_in + p * np.eye(2) / 2).reshape(-1)
        sig = entries.std(axis=0, ddof=1) / math.sqrt(samples)
        for idx in range(4):
            tol = 3 * float(np.abs(sig[idx])) + 1e-12
            if abs(mean[idx] - want[idx]) > tol:
                failures.append((p, idx, mean[idx], want[idx], tol))
    _verdict("c11", failures, "p=0.1,0.5 entrywise 3-sigma, 1e5 trajectories each")


def test_c12_tableau_and_dense_engines_agree():
    """Both engines report the same entropy on random Clifford circuits."""
    failures = []
    for i in range(200):
        rng = substream(112, "c12", i)
        n = 2 + i % 5
        tab = StabilizerTableau.new_polarized(n, "z")
        den = DenseState.new_polarized(n, "z")
        for _ in range(int(rng.integers(3 * n, 6 * n))):
            kind = int(rng.integers(0, 6))
            if kind < 4:
                q = int(rng.integers(n))
                op = ("apply_h", "apply_phase", "apply_phase_dag", "apply_x")[kind]
                getattr(tab, op)(q)
                getattr(den, op)(q)
            else:
                a, b = (int(q) for q in rng.choice(n, 2, replace=False))
                if kind == 4:
                    tab.apply_cnot(a, b)
                    den.apply_cnot(a, b)
                else:
                    tab.apply_cz(a, b)
                    den.apply_cz(a, b)
        for mask in range(1, 1 << n):
            subset = [q for q in range(n) if mask >> q & 1]
            s_tab = tab.renyi2_entropy_bits(subset)
            s_den = den.renyi2_entropy_bits(subset)
            if abs(s_den - s_tab) > 1e-9:
                failures.append((i, mask, s_tab, s_den))
        if len(failures) > 5:
            break
    _verdict("c12", failures, "200 random circuits n<=6, all bipartitions, 1e-9")


def test_c13_area_law_composition_formula():
    """The contiguous-cell composition formula, fed with the measured
    window profile, reproduces sampled subset entropies of shallow
    nearest-neighbor circuits within the trajectory scatter band."""
    n, t, a_max, reals = 64, 12, 10, 100
    prof_sum = np.zeros(a_max)
    direct = np.empty((reals, a_max))
    for i in range(reals):
        prog = build_random_nn(n, t, substream(113, "c13-circ", i))
        state = StabilizerTableau.new_polarized(n, "z")
        execute(prog, state)
        p0 = consecutive_entropy_profile(state, 0, a_max)
        p1 = consecutive_entropy_profile(state, n // 2, a_max)
        prof_sum += 0.5 * (np.asarray(p0, dtype=float) + np.asarray(p1, dtype=float))
        stats = page_curve(
            state, range(1, a_max + 1), 200,
            int(substream(113, "c13-dir", i).integers(2**31)), label=f"c13-{i}",
        )
        direct[i] = [st.mean_entropy_bits for st in stats]
    profile = prof_sum / reals
    failures = []
    for a in range(1, a_max + 1):
        want = area_law_mean_entropy(profile, a, n)
        got = direct[:, a - 1].mean()
        scatter = direct[:, a - 1].std(ddof=1)
        if abs(want - got) > 3 * scatter:
            failures.append((a, want, got, 3 * scatter))
    _verdict(
        "c13", failures,
        f"N=64 NN t=12, {reals} realizations, formula within 3-sigma scatter",
    )
