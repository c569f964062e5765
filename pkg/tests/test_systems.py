"""Tests for the labeled-operator core."""

from fractions import Fraction

import numpy as np
import pytest

from codefid.systems import (
    LabeledOperator,
    LabelError,
    align,
    embed,
    hermitize,
    identity,
    is_ppt,
    is_psd_exact,
    max_entangled,
    merge_labels,
    min_eig,
    partial_trace,
    partial_transpose,
    random_unitary,
    relabel,
    shape,
    swap_operator,
    sym_antisym,
    tensor,
    trace_product,
)


def op(labels_dims, entries):
    return LabeledOperator(shape(*labels_dims), np.asarray(entries))


SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_tensor_identities():
    a = identity(shape(("P", 2)))
    b = identity(shape(("Q", 3)))
    t = tensor(a, b)
    assert t.labels == ("P", "Q")
    assert np.allclose(t.entries, np.eye(6))


def test_tensor_basis_projectors():
    a = op([("P", 2)], np.diag([1.0, 0.0]))
    b = op([("Q", 2)], np.diag([0.0, 1.0]))
    t = tensor(a, b)
    assert np.allclose(t.entries, np.diag([0.0, 1.0, 0.0, 0.0]))


def test_tensor_pauli_entry():
    # direct 4x4 expansion: (sigma_x (x) sigma_x)[0, 3] = 1
    t = tensor(op([("P", 2)], SX), op([("Q", 2)], SX))
    assert t.entries[0, 3] == 1
    assert t.entries[3, 0] == 1
    assert t.entries[0, 0] == 0


def test_tensor_label_collision():
    a = identity(shape(("P", 2)))
    with pytest.raises(LabelError):
        tensor(a, a)


def test_partial_trace_max_entangled_marginal():
    for d in (2, 3, 4):
        phi = max_entangled(d, labels=("R", "Q"))
        marg = partial_trace(phi, ["Q"])
        assert marg.labels == ("R",)
        assert np.allclose(marg.entries, np.eye(d) / d)


def test_partial_trace_product_rule():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    t = tensor(op([("P", 3)], a), op([("Q", 2)], b))
    reduced = partial_trace(t, ["Q"])
    assert np.allclose(reduced.entries, a * np.trace(b))
    assert np.isclose(t.trace(), reduced.trace())


def test_partial_trace_symmetric_projector():
    # independent oracle: S[(i j),(k l)] = (d_ik d_jl + d_il d_jk)/2, traced by loop
    d = 3
    s_explicit = np.zeros((9, 9))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    s_explicit[i * d + j, k * d + l] = ((i == k) * (j == l) + (i == l) * (j == k)) / 2
    traced = np.zeros((d, d))
    for i in range(d):
        for k in range(d):
            traced[i, k] = sum(s_explicit[i * d + j, k * d + j] for j in range(d))
    assert np.allclose(traced, 2 * np.eye(3))
    s, _ = sym_antisym(d, labels=("P", "Q"))
    assert np.allclose(s.entries, s_explicit)
    assert np.allclose(partial_trace(s, ["Q"]).entries, traced)


def test_partial_transpose_involution_and_commutation():
    rng = np.random.default_rng(3)
    x = op([("P", 2), ("Q", 3)], rng.normal(size=(6, 6)))
    assert np.allclose(partial_transpose(partial_transpose(x, ["Q"]), ["Q"]).entries, x.entries)
    ab = partial_transpose(partial_transpose(x, ["P"]), ["Q"])
    ba = partial_transpose(partial_transpose(x, ["Q"]), ["P"])
    assert np.allclose(ab.entries, ba.entries)
    assert np.allclose(ab.entries, x.entries.T)


def test_partial_transpose_identity():
    eye = identity(shape(("P", 2), ("Q", 2)))
    assert np.allclose(partial_transpose(eye, ["P"]).entries, np.eye(4))


def test_partial_transpose_max_entangled_is_swap_combination():
    # t_B phi = (S - A)/K for a K-dimensional pair
    for d in (2, 3):
        phi = max_entangled(d, labels=("R", "Q"), exact=True)
        s, a = sym_antisym(d, labels=("R", "Q"), exact=True)
        lhs = partial_transpose(phi, ["Q"])
        rhs = (s - a) * Fraction(1, d)
        assert np.array_equal(lhs.entries, rhs.entries)
    phi2 = max_entangled(2, labels=("R", "Q"))
    assert np.isclose(min_eig(partial_transpose(phi2, ["Q"])), -0.5)


def test_max_entangled_entries():
    assert max_entangled(1, labels=("R", "Q")).entries[0, 0] == 1
    phi = max_entangled(2, labels=("R", "Q"))
    expect = np.zeros((4, 4))
    for r, c in [(0, 0), (0, 3), (3, 0), (3, 3)]:
        expect[r, c] = 0.5
    assert np.allclose(phi.entries, expect)
    assert np.isclose(phi.trace(), 1.0)


def test_transpose_trick():
    # (M x I)|phi> = (I x M^T)|phi> for the projector: conjugate both sides
    rng = np.random.default_rng(11)
    for d in (2, 3, 4):
        ket = np.zeros(d * d, dtype=complex)
        for i in range(d):
            ket[i * d + i] = 1 / np.sqrt(d)
        for _ in range(20):
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            lhs = np.kron(m, np.eye(d)) @ ket
            rhs = np.kron(np.eye(d), m.T) @ ket
            assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_sym_antisym_structure():
    for d in (2, 3, 4, 5):
        s, a = sym_antisym(d, labels=("P", "Q"), exact=True)
        assert s.trace() == Fraction(d * (d + 1), 2)
        assert a.trace() == Fraction(d * (d - 1), 2)
        eye = identity(shape(("P", d), ("Q", d)), exact=True)
        assert np.array_equal((s + a).entries, eye.entries)
        zero = (s @ a).entries
        assert all(v == 0 for v in zero.flat)
        assert np.array_equal((s @ s).entries, s.entries)
        assert np.array_equal((a @ a).entries, a.entries)


def test_sym_antisym_swap_consistency():
    d = 3
    s, _ = sym_antisym(d, labels=("P", "Q"))
    f = swap_operator(d, labels=("P", "Q"))
    assert np.allclose(s.entries, (np.eye(9) + f.entries) / 2)


def test_usefulfact_transpose_under_trace():
    rng = np.random.default_rng(23)
    x = op([("P", 2), ("Q", 3)], rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    y = op([("Q", 3)], rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    lhs = partial_trace(x @ partial_transpose(y, ["Q"]), ["Q"])
    rhs = partial_trace(partial_transpose(x, ["Q"]) @ y, ["Q"])
    assert np.max(np.abs(lhs.entries - rhs.entries)) < 1e-12


def test_align_and_embed():
    rng = np.random.default_rng(5)
    x = op([("Q", 2)], rng.normal(size=(2, 2)))
    target = shape(("P", 3), ("Q", 2))
    e = embed(x, target)
    assert e.labels == ("P", "Q")
    assert np.allclose(e.entries, np.kron(np.eye(3), x.entries))
    a = op([("P", 2)], rng.normal(size=(2, 2)))
    b = op([("Q", 3)], rng.normal(size=(3, 3)))
    pa, pb = align(a, b)
    assert pa.labels == pb.labels == ("P", "Q")
    assert np.isclose(trace_product(a, b), np.trace(a.entries) * np.trace(b.entries))


def test_permute_round_trip():
    rng = np.random.default_rng(9)
    x = op([("P", 2), ("Q", 3), ("R", 2)], rng.normal(size=(12, 12)))
    y = x.permuted(["R", "P", "Q"])
    assert y.labels == ("R", "P", "Q")
    assert np.allclose(y.permuted(["P", "Q", "R"]).entries, x.entries)
    assert np.isclose(y.trace(), x.trace())


def test_merge_and_relabel():
    rng = np.random.default_rng(13)
    x = op([("P", 2), ("Q", 2)], rng.normal(size=(4, 4)))
    m = merge_labels(x, [("PQ", ["P", "Q"])])
    assert m.labels == ("PQ",)
    assert np.allclose(m.entries, x.entries)
    r = relabel(x, {"P": "Z"})
    assert r.labels == ("Z", "Q")


def test_is_ppt_cases():
    a = op([("P", 2)], np.diag([0.3, 0.7]))
    b = op([("Q", 2)], np.diag([0.5, 0.5]))
    assert is_ppt(tensor(a, b), ["P"])
    phi = max_entangled(2, labels=("P", "Q"))
    assert not is_ppt(phi, ["P"])
    with pytest.raises(LabelError):
        is_ppt(phi, ["P", "Q"])


def test_hermitize():
    x = op([("P", 2)], np.array([[1.0, 1e-14], [0.0, 2.0]]))
    h = hermitize(x)
    assert np.allclose(h.entries, h.entries.conj().T)
    bad = op([("P", 2)], np.array([[1.0, 0.5], [0.0, 2.0]]))
    with pytest.raises(ValueError):
        hermitize(bad)


def test_is_psd_exact():
    s, a = sym_antisym(3, labels=("P", "Q"), exact=True)
    assert is_psd_exact(s)
    assert is_psd_exact(a)
    assert not is_psd_exact(s - a)
    half = s * Fraction(1, 2)
    assert is_psd_exact(half)
    phi = max_entangled(2, labels=("P", "Q"), exact=True)
    assert not is_psd_exact(partial_transpose(phi, ["Q"]) * Fraction(2))


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(17)
    for d in (2, 3, 5):
        u = random_unitary(d, rng)
        assert np.max(np.abs(u @ u.conj().T - np.eye(d))) < 1e-12
