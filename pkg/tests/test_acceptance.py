"""The twelve acceptance criteria, each at its stated tolerance."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hardcore.cli import main as cli_main
from hardcore.complex import boundary_operator, build_susy_hamiltonian, betti, laplacian, supercharge, supercharge_laplacian
from hardcore.fock import enumerate_basis
from hardcore.gadgets import (
    TwoQubitGadget,
    compile_couplings,
    compile_target,
    effective_matrix,
    encode_qubit,
    factorization_audit,
    relaxed_block_residual,
    verify_simulation,
    xz_target,
)
from hardcore.graph import ConstraintGraph, build_triangle_graph, complete_graph, cycle_graph, edgeless_graph
from hardcore.operators import assemble_hopping, assemble_number_weighted, pauli_decompose

from .oracles import brute_mwis, exact_reduced_betti, random_graph

R3 = np.sqrt(3)
SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def coeffs(m):
    return {w: c for c, w in pauli_decompose(m, tol=1e-12).terms}


def check_coeffs(m, expected, tol=1e-9):
    got = coeffs(m)
    for w in set(got) | set(expected):
        assert abs(got.get(w, 0.0) - expected.get(w, 0.0)) < tol, (w, got.get(w), expected.get(w))


def family(seed, count, n_max):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        edges, w = random_graph(rng, n)
        out.append((n, edges, ConstraintGraph.from_edges(n, edges, w)))
    return out


def mediator_excited_states(gadget):
    """(x)(j1 +- j3)/sqrt(2) with qubit i empty, in the standard layout."""
    (_, _, _), (j1, _, j3) = gadget.layout.qubit_modes
    x, _, _ = gadget.layout.mediator_modes[(0, 1)]
    plus, minus = np.zeros(gadget.basis.dim), np.zeros(gadget.basis.dim)
    for m in (j1, j3):
        plus[gadget.basis.index[1 << m | 1 << x]] = 1 / np.sqrt(2)
    minus[gadget.basis.index[1 << j1 | 1 << x]] = 1 / np.sqrt(2)
    minus[gadget.basis.index[1 << j3 | 1 << x]] = -1 / np.sqrt(2)
    return plus, minus


RANDOM_FAMILY = family(2024, 50, 8)


def test_criterion_1_triangle_encoding():
    g = build_triangle_graph(hopping=1.0)
    blocks = []
    for k in (0, 1):
        b = enumerate_basis(g, k)
        blocks.append(assemble_hopping(g, b).toarray() + np.eye(b.dim))
    vals = np.sort(np.concatenate([np.linalg.eigvalsh(h) for h in blocks]))
    assert np.allclose(vals, [0, 0, 1, 3], atol=1e-12)
    vac, h1 = blocks
    assert abs(vac[0, 0] - 1.0) < 1e-12
    enc = encode_qubit()
    for vec, e in ((enc.s0, 0.0), (enc.s1, 0.0), (enc.s2, 3.0)):
        assert np.abs(h1 @ vec - e * vec).max() < 1e-12


def test_criterion_2_v1_prime_matrix():
    expected = -1 / 54 * np.array(
        [
            [4 + R3, 4 + 2 * R3, -5 + 2 * R3, -2],
            [4 + 2 * R3, 16 + 9 * R3, -2, -5 - 2 * R3],
            [-5 + 2 * R3, -2, 16 - 9 * R3, 4 - 2 * R3],
            [-2, -5 - 2 * R3, 4 - 2 * R3, 4 - R3],
        ]
    )
    assert np.abs(effective_matrix("fis", "v1p") - expected).max() < 1e-9


def test_criterion_3_fis_pauli_forms():
    check_coeffs(effective_matrix("fis", "v1"), {"II": -20 / 27, "XX": 4 / 27, "ZZ": 12 / 27, "XI": 1 / 27, "IX": 1 / 27})
    check_coeffs(effective_matrix("fis", "v2"), {"II": -10 / 27, "XX": 8 / 27, "XI": -1 / 27, "IX": -1 / 27})
    check_coeffs(effective_matrix("fis", "vmain"), {"II": -10 / 9, "XX": 4 / 9, "ZZ": 4 / 9})


def test_criterion_4_laplacian_gadget():
    gadget = TwoQubitGadget("laplacian")
    plain = TwoQubitGadget("fis")
    for g, (e_plus, e_minus) in ((plain, (3.0, 1.0)), (gadget, (4.0, 2.0))):
        h0 = g.h0.toarray()
        plus, minus = mediator_excited_states(g)
        assert np.abs(h0 @ plus - e_plus * plus).max() < 1e-9
        assert np.abs(h0 @ minus - e_minus * minus).max() < 1e-9
    check_coeffs(effective_matrix("laplacian", "v1"), {"II": -28 / 72, "XX": 5 / 72, "ZZ": 15 / 72, "XI": 2 / 72, "IX": 2 / 72})
    check_coeffs(effective_matrix("laplacian", "v2"), {"II": -14 / 72, "XX": 10 / 72, "XI": -2 / 72, "IX": -2 / 72})
    check_coeffs(effective_matrix("laplacian", "vmain"), {"II": -7 / 12, "XX": 5 / 24, "ZZ": 5 / 24})
    check_coeffs(effective_matrix("laplacian", "vextra"), {"II": 4 / 3, "XX": 1 / 6, "ZZ": 1 / 6})


def test_criterion_5_laplacian_correspondence():
    for n, _, g in RANDOM_FAMILY:
        for k in range(n + 1):
            lap = laplacian(g, k).toarray()
            if lap.size == 0:
                continue
            ham = build_susy_hamiltonian(g, k).toarray()
            assert np.allclose(np.linalg.eigvalsh(lap), np.linalg.eigvalsh(ham), rtol=0, atol=1e-9)
            assert np.abs(supercharge_laplacian(g, k).toarray() - lap).max() < 1e-9


def test_criterion_6_chain_complex():
    for n, _, g in RANDOM_FAMILY:
        for k in range(2, n + 1):
            dd = (boundary_operator(g, k - 1) @ boundary_operator(g, k)).toarray()
            qq = (supercharge(g, k - 1) @ supercharge(g, k)).toarray()
            assert dd.size == 0 or np.abs(dd).max() < 1e-12
            assert qq.size == 0 or np.abs(qq).max() < 1e-12


def test_criterion_7_homology_oracles():
    c5 = [(i, (i + 1) % 5) for i in range(5)]
    assert betti(cycle_graph(5), 2) == exact_reduced_betti(5, c5, 2) == 1
    for n in (3, 4, 5):
        kn = [(a, b) for a in range(n) for b in range(a + 1, n)]
        assert betti(complete_graph(n), 1) == exact_reduced_betti(n, kn, 1) == n - 1
    for n in (1, 2, 3, 4, 5):
        for k in range(1, n + 1):
            assert betti(edgeless_graph(n), k) == exact_reduced_betti(n, [], k) == 0


def test_criterion_8_classical_consistency():
    for n, edges, g in family(8, 100, 12):
        best = max(
            float(assemble_number_weighted(g, b).toarray().diagonal().max())
            for b in (enumerate_basis(g, k) for k in range(n + 1))
            if b.dim
        )
        assert best == brute_mwis(n, edges, g.vertex_weights)[0]


def _sweep_checks(flavor, lam_exact):
    target = xz_target(2, {(0, 1): 1.0}, flavor)
    rep = verify_simulation(target, [1e2, 1e3, 1e4], flavor)
    assert abs(rep.points[0].lambda_target - lam_exact) < 1e-12
    e = rep.errors
    assert e[0] > e[1] > e[2]
    assert rep.exponent is not None and rep.exponent <= -0.4
    assert e[-1] < 5e-2
    return rep


def test_criterion_9_end_to_end_fis():
    _sweep_checks("fis", -8 / 9)


def test_criterion_10_end_to_end_laplacian():
    _sweep_checks("laplacian", -3 / 4)
    g = TwoQubitGadget("laplacian")
    assert relaxed_block_residual(g.h0, g.v(), g.v_extra, g.low) < 1e-9


def test_criterion_11_weight_factorization():
    rng = np.random.default_rng(11)
    instances = [compile_target(xz_target(2, {(0, 1): 1.0}, "fis"), d, "fis") for d in (1e2, 1e3, 1e4)]
    for _ in range(20):
        n = int(rng.integers(2, 5))
        pairs = {(i, j): float(rng.choice([0.25, 0.5, 1.0, 3.0])) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.6}
        instances.append(compile_couplings(n, pairs, float(rng.choice([7.0, 1e2, 1e3])), "fis"))
    for inst in instances:
        assert factorization_audit(inst) == []


def test_criterion_12_determinism(tmp_path):
    runs = []
    cases = [
        ("compile-verify", "--input", SAMPLES / "target_fis2.json", "--seed", "0x5EED"),
        ("spectrum", "--input", SAMPLES / "gadget2.json", "--k", "2", "--method", "iterative", "--seed", "3"),
        ("homology", "--input", SAMPLES / "c5.json", "--k", "2"),
        ("effective", "v1p"),
    ]
    for args in cases:
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{args[0]}{rep}.json"
            cmd = [sys.executable, "-m", "hardcore", *map(str, args), "--output", str(out)]
            subprocess.run(cmd, check=True)
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]
        json.loads(blobs[0])
