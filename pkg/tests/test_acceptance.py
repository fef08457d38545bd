"""Acceptance gate: thirteen numbered criteria, one test per criterion.

Run with ``pytest -v tests/test_acceptance.py`` to get a pass/fail line per
criterion.  Tolerances are pinned in each test body and are not shared
constants on purpose: each criterion states its own bar.
"""

import json
import math
import time

import numpy as np
import pytest
import scipy.linalg

from zxwkit import (build_hamiltonian_diagram, cap, check_soundness,
                    check_sum_commutativity, commuting_exponential,
                    controlled_matrix, controlled_state_normal_form,
                    controlled_sum_matrices, controlled_sum_states, cup,
                    derivative_at_zero, diagram_from_json, diagram_to_json,
                    eval_diagram, extract_axz_circuit, hadamard_diagram,
                    oracle_matrix, parse_pauli_sum, putzer_coefficients,
                    state_oracle, structural_equal, swap_pair,
                    taylor_diagram, trotter_diagram, verify_controlled,
                    verify_schrodinger_linearity, w_diagram, zbox_diagram)
from zxwkit.rules import TEMPLATES

EXAMPLE_SUM = "1.0 XXI\n1.0 IXX\n-1.0 ZII\n-1.0 IZI\n-1.0 IIZ"
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def _expm(h, t):
    return scipy.linalg.expm(-0.5j * t * np.asarray(h, dtype=complex))


def _random_sum(rng, max_m=3, max_terms=6):
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_terms + 1))
    lines = []
    for _ in range(n):
        coeff = rng.normal()
        text = "".join(rng.choice(list("IXYZ"), m))
        lines.append(f"{coeff!r} {text}")
    return parse_pauli_sum("\n".join(lines))


def test_criterion_01_generator_semantics():
    tol = 1e-12
    had = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    assert np.abs(eval_diagram(hadamard_diagram()) - had).max() <= tol
    w = np.array([[1, 0], [0, 1], [0, 1], [0, 0]], dtype=complex)
    assert np.abs(eval_diagram(w_diagram()) - w).max() <= tol
    bend = np.array([1, 0, 0, 1], dtype=complex)
    assert np.abs(eval_diagram(cap()).reshape(-1) - bend).max() <= tol
    assert np.abs(eval_diagram(cup()).reshape(-1) - bend).max() <= tol
    sw = np.zeros((4, 4), dtype=complex)
    sw[0, 0] = sw[1, 2] = sw[2, 1] = sw[3, 3] = 1.0
    assert np.abs(eval_diagram(swap_pair()) - sw).max() <= tol
    rng = np.random.default_rng(2024)
    for _ in range(20):
        a = complex(rng.normal(), rng.normal())
        n = int(rng.integers(0, 3))
        m = int(rng.integers(0, 3))
        if n == 0 and m == 0:
            m = 1
        want = np.zeros((2 ** m, 2 ** n), dtype=complex)
        want[0, 0] = 1.0
        want[-1, -1] = a
        assert np.abs(eval_diagram(zbox_diagram(a, n, m)) - want).max() <= tol
    print("criterion 01 PASS - generator matrices match, tol 1e-12")


def test_criterion_02_rule_soundness():
    start = time.perf_counter()
    rep = check_soundness(names=list(TEMPLATES), draws=50, seed=7)
    elapsed = time.perf_counter() - start
    assert rep.ok, [n for n, r in rep.reports.items() if not r.ok]
    assert rep.total_failures == 0
    for name, r in rep.reports.items():
        assert r.draws == 50
        for res in r.results:
            assert res.verdict in ("exact", "scalar"), (name, res.verdict)
            if res.verdict == "scalar":
                assert res.scale != 0j   # the reported lambda
    assert elapsed < 30.0, elapsed
    print(f"criterion 02 PASS - {len(rep.reports)} templates x 50 draws, "
          f"0 failures in {elapsed:.1f}s")


def test_criterion_03_controlled_contract():
    tol = 1e-9
    rng = np.random.default_rng(333)
    worst = 0.0
    for dim in [2] * 10 + [4] * 6 + [8] * 4:
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rep = verify_controlled(controlled_matrix(m), m, tol=tol)
        assert rep["ok"], (dim, rep)
        worst = max(worst, rep["err_discharge"], rep["err_idle"])
    for i in range(20):
        dim = (2, 4, 8)[i % 3]
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        rep = verify_controlled(controlled_state_normal_form(v), v, tol=tol)
        assert rep["ok"], (dim, rep)
        worst = max(worst, rep["err_discharge"], rep["err_idle"])
    print(f"criterion 03 PASS - 20 matrices + 20 states, worst residual "
          f"{worst:.2e} <= 1e-9")


def test_criterion_04_sum_algebra():
    tol = 1e-9
    rng = np.random.default_rng(444)
    for k in (2, 3, 4):
        mats = [rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
                for _ in range(k)]
        weights = [complex(rng.normal(), rng.normal()) for _ in range(k)]
        cd = controlled_sum_matrices([controlled_matrix(m) for m in mats],
                                     weights=weights)
        target = sum(w * m for w, m in zip(weights, mats))
        rep = verify_controlled(cd, target, tol=tol)
        assert rep["ok"], (k, rep)
    for k in (2, 3, 4):
        vecs = [rng.normal(size=4) + 1j * rng.normal(size=4)
                for _ in range(k)]
        weights = [complex(rng.normal(), rng.normal()) for _ in range(k)]
        comps = [controlled_state_normal_form(v) for v in vecs]
        cd = controlled_sum_states(comps, weights=weights)
        rep = verify_controlled(cd, state_oracle(vecs, weights), tol=tol)
        assert rep["ok"], (k, rep)
    print("criterion 04 PASS - weighted sums for k in 2..4, tol 1e-9")


def test_criterion_05_hamiltonian_encoding():
    tol = 1e-9
    h = parse_pauli_sum(EXAMPLE_SUM)
    cd, discharged = build_hamiltonian_diagram(h)
    want = (np.kron(np.kron(X, X), np.eye(2))
            + np.kron(np.eye(2), np.kron(X, X))
            - np.kron(np.kron(Z, np.eye(2)), np.eye(2))
            - np.kron(np.kron(np.eye(2), Z), np.eye(2))
            - np.kron(np.eye(4), Z))
    got = eval_diagram(discharged)
    resid = float(np.abs(got - want).max())
    assert resid <= tol, resid
    rep = verify_controlled(cd, want, tol=tol)
    assert rep["ok"], rep
    rng = np.random.default_rng(555)
    worst = resid
    for _ in range(20):
        hr = _random_sum(rng)
        cdr, _ = build_hamiltonian_diagram(hr)
        repr_ = verify_controlled(cdr, oracle_matrix(hr), tol=tol)
        assert repr_["ok"], repr_
        worst = max(worst, repr_["err_discharge"])
    print(f"criterion 05 PASS - 5-term example + 20 random sums, worst "
          f"{worst:.2e} <= 1e-9")


def test_criterion_06_commutativity():
    rng = np.random.default_rng(666)
    for _ in range(10):
        h = _random_sum(rng, max_m=3, max_terms=5)
        perm = [int(x) for x in rng.permutation(len(h.terms))]
        verdict = check_sum_commutativity(h, perm)
        assert verdict.ok, (perm, verdict)
    print("criterion 06 PASS - 10 random term permutations leave both "
          "plugs unchanged")


def test_criterion_07_schrodinger_linearity():
    rng = np.random.default_rng(777)
    worst = 0.0
    for _ in range(5):
        h = _random_sum(rng, max_m=2, max_terms=4)
        while h.m != 2:
            h = _random_sum(rng, max_m=2, max_terms=4)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        phi = rng.normal(size=4) + 1j * rng.normal(size=4)
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        rep = verify_schrodinger_linearity(h, psi, phi, a, b,
                                           t_grid=[0.0, 0.4], dt=1e-3,
                                           tol=1e-5)
        assert rep.ok, rep.worst_ratio
        worst = max(worst, rep.worst_ratio)
    print(f"criterion 07 PASS - 5 random 2-qubit cases, worst residual "
          f"ratio {worst:.2e} <= 1e-5 * |H| * |chi|")


def test_criterion_08_commuting_exponentials():
    h = parse_pauli_sum("1.0 ZZZ\n2.0 XZX")
    w = commuting_exponential(h)
    hm = oracle_matrix(h)
    worst = 0.0
    for t in (0.1, 0.5, 1.0):
        err = float(np.abs(w.unitary(t) - _expm(hm, t)).max())
        assert err <= 1e-9, (t, err)
        worst = max(worst, err)
    verdict = derivative_at_zero(w, hm, steps=(1e-3, 5e-4))
    assert verdict.ok
    assert verdict.slope is not None
    assert abs(verdict.slope - 2.0) <= 0.2, verdict.slope
    print(f"criterion 08 PASS - gadget product matches expm (worst "
          f"{worst:.2e}), Richardson slope {verdict.slope:.2f}")


def test_criterion_09_taylor():
    rng = np.random.default_rng(999)
    a, b = rng.normal(), rng.normal()
    h = parse_pauli_sum(f"{a!r} ZZ\n{b!r} ZX")
    hm = oracle_matrix(h)
    t = 0.4
    got = eval_diagram(taylor_diagram(h, 3, t))
    partial = np.zeros((4, 4), dtype=complex)
    power = np.eye(4, dtype=complex)
    for k in range(4):
        partial += power / math.factorial(k)
        power = power @ (-0.5j * t * hm)
    resid = float(np.abs(got - partial).max())
    assert resid <= 1e-9, resid
    errs = {}
    for tt in (0.4, 0.2):
        u = eval_diagram(taylor_diagram(h, 3, tt))
        errs[tt] = float(np.linalg.norm(u - _expm(hm, tt), 2))
    ratio = errs[0.4] / errs[0.2]
    assert 16.0 * 0.75 <= ratio <= 16.0 * 1.25, ratio
    print(f"criterion 09 PASS - order-3 partial sum exact "
          f"({resid:.2e}), halving t shrinks error by {ratio:.1f}")


def test_criterion_10_trotter():
    h = parse_pauli_sum("3.0 ZY\n2.0 ZZ")
    hm = oracle_matrix(h)
    t = 0.5
    errs = {}
    for steps in (5, 10):
        u = eval_diagram(trotter_diagram(h, steps, t))
        errs[steps] = float(np.linalg.norm(u - _expm(hm, t), 2))
    ratio = errs[5] / errs[10]
    assert 2.0 * 0.8 <= ratio <= 2.0 * 1.2, ratio
    print(f"criterion 10 PASS - doubling steps shrinks error by "
          f"{ratio:.2f} (want 2.0 +- 20%)")


def test_criterion_11_cayley_hamilton_putzer():
    tol = 1e-8
    worst = 0.0
    cases = []
    rng = np.random.default_rng(1111)
    for _ in range(19):
        dim = int(rng.choice([2, 3, 4]))
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        cases.append((m + m.conj().T) / 2.0)
    cases.append(np.kron(Z, np.eye(2)))   # repeated-eigenvalue case
    for hm in cases:
        t = float(rng.uniform(0.2, 1.5))
        coeffs = putzer_coefficients(hm, [t])
        resid = float(np.abs(coeffs.reconstruct(hm) - _expm(hm, t)).max())
        assert resid <= tol, resid
        worst = max(worst, resid)
    print(f"criterion 11 PASS - 20 Hermitian reconstructions, worst "
          f"{worst:.2e} <= 1e-8")


def test_criterion_12_extraction():
    tol = 1e-9
    rng = np.random.default_rng(1212)
    worst = 0.0
    for _ in range(10):
        a, b = (float(x) for x in rng.uniform(-2.0, 2.0, size=2))
        if math.hypot(a, b) < 1e-3:
            a = 1.0
        t = float(rng.uniform(0.1, 2.0))
        circ = extract_axz_circuit(a, b, t)
        want = _expm(a * X + b * Z, t)
        err = float(np.abs(circ.to_matrix() - want).max())
        assert err <= tol, (a, b, t, err)
        worst = max(worst, err)
    print(f"criterion 12 PASS - 10 extractions, worst {worst:.2e} <= 1e-9")


def test_criterion_13_plumbing():
    from zxwkit import (and_box, pink_spider, triangle, w_spider)
    rng = np.random.default_rng(1313)
    for _ in range(50):
        pick = int(rng.integers(0, 5))
        if pick == 0:
            d = zbox_diagram(complex(rng.normal(), rng.normal()),
                             int(rng.integers(0, 3)),
                             int(rng.integers(1, 3)))
        elif pick == 1:
            d = pink_spider(int(rng.integers(1, 3)),
                            int(rng.integers(1, 3)),
                            math.pi * int(rng.integers(0, 2)))
        elif pick == 2:
            d = and_box(int(rng.integers(1, 4)))
        elif pick == 3:
            d = w_spider(int(rng.integers(2, 6)))
        else:
            d = triangle(inverse=bool(rng.integers(0, 2)))
        text = diagram_to_json(d)
        json.loads(text)   # well-formed JSON
        assert structural_equal(d, diagram_from_json(text))
    lines = []
    for i in range(70):
        text = "".join(rng.choice(list("IXYZ"), 10))
        lines.append(f"{rng.normal()!r} {text}")
    start = time.perf_counter()
    h = parse_pauli_sum("\n".join(lines))
    cd, discharged = build_hamiltonian_diagram(h)
    elapsed = time.perf_counter() - start
    assert h.m == 10 and len(h.terms) == 70
    assert len(discharged.nodes) > 70
    assert elapsed < 5.0, elapsed
    print(f"criterion 13 PASS - 50 JSON round trips; 70-term 10-qubit "
          f"build in {elapsed:.2f}s < 5s")
