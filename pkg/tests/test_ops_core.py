import numpy as np
import pytest
from numpy.testing import assert_allclose

from lioueps.errors import HermiticityError, SpaceMismatchError
from lioueps.ops_core import (
    HilbertSpace,
    Operator,
    build_boson_ops,
    build_qubit_ops,
    hermitian_spectral_decomposition,
    hs_inner,
    hs_norm,
    tensor,
)
from conftest import random_hermitian


def test_qubit_ops_printed_definitions():
    q = build_qubit_ops()
    sp, sm = q["sigma_plus"].matrix, q["sigma_minus"].matrix
    sx, sy, sz = q["sigma_x"].matrix, q["sigma_y"].matrix, q["sigma_z"].matrix
    eye = q["identity"].matrix
    # sigma_+ sigma_- projects onto the excited state (second basis vector)
    assert_allclose(sp @ sm, np.diag([0.0, 1.0]), atol=1e-15)
    assert_allclose(eye - 2 * sp @ sm, sz, atol=1e-15)
    assert_allclose(sz, np.diag([1.0, -1.0]), atol=1e-15)
    # ladder combinations close exactly
    assert_allclose((sx + 1j * sy) / 2, sp, atol=1e-15)
    assert_allclose((sx - 1j * sy) / 2, sm, atol=1e-15)
    assert_allclose(sm, np.array([[0, 1], [0, 0]]), atol=1e-15)
    # the triple built from these definitions is left-handed
    assert_allclose(sx @ sy - sy @ sx, -2j * sz, atol=1e-15)


def test_boson_ops_ladder_and_truncation():
    b = build_boson_ops(3)
    a, adag, n = b["a"].matrix, b["adag"].matrix, b["n"].matrix
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(a) == 2
    assert_allclose(n, np.diag([0.0, 1.0, 2.0]), atol=1e-15)
    ket2 = np.array([0, 0, 1.0])
    assert_allclose(n @ ket2, 2 * ket2, atol=1e-15)
    # hard cutoff: commutator is the identity except the bottom-right entry
    comm = a @ adag - adag @ a
    assert_allclose(comm, np.diag([1.0, 1.0, 1.0 - 3]), atol=1e-14)


def test_boson_ops_rejects_degenerate_space():
    with pytest.raises(ValueError, match="degenerate space"):
        build_boson_ops(1)


def test_tensor_products():
    q = build_qubit_ops()
    eye = q["identity"]
    assert_allclose(tensor(eye, eye).matrix, np.eye(4), atol=1e-15)
    assert_allclose(np.diag(tensor(q["sigma_z"], eye).matrix),
                    [1, 1, -1, -1], atol=1e-15)
    b = build_boson_ops(2)
    t = tensor(b["a"], b["identity"]).matrix
    nz = {(i, j) for i, j in zip(*np.nonzero(t))}
    assert nz == {(0, 2), (1, 3)}
    assert tensor(q["sigma_x"], b["a"]).space.dims == (2, 2)


def test_tensor_associativity(rng):
    # exact entrywise equality on integer-valued factors (products are
    # exact in binary floating point there)
    dims = (2, 3, 2)
    ops = [Operator(HilbertSpace((d,)),
                    rng.integers(-4, 5, (d, d)) + 1j * rng.integers(-4, 5, (d, d)))
           for d in dims]
    left = tensor(tensor(ops[0], ops[1]), ops[2])
    right = tensor(ops[0], tensor(ops[1], ops[2]))
    assert np.array_equal(left.matrix, right.matrix)
    assert left.space.dims == right.space.dims
    # generic complex factors agree to rounding
    ops = [Operator(HilbertSpace((d,)),
                    rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
           for d in dims]
    left = tensor(tensor(ops[0], ops[1]), ops[2]).matrix
    right = tensor(ops[0], tensor(ops[1], ops[2])).matrix
    assert np.abs(left - right).max() <= 1e-15 * np.abs(left).max()


def test_hs_inner_paulis_and_generic():
    q = build_qubit_ops()
    assert hs_inner(q["sigma_x"], q["sigma_y"]) == pytest.approx(0.0)
    assert hs_inner(q["sigma_x"], q["sigma_x"]) == pytest.approx(2.0)
    space = q["identity"].space
    a = Operator(space, [[1 + 2j, 3], [4j, 5 - 1j]])
    e = Operator(space, [[2, 1j], [7, 0.5]])
    expected = sum(np.conj(a.matrix[i, j]) * e.matrix[i, j]
                   for i in range(2) for j in range(2))
    assert hs_inner(a, e) == pytest.approx(expected)
    assert hs_norm(a) == pytest.approx(np.sqrt(hs_inner(a, a).real))


def test_hs_inner_space_mismatch():
    q = build_qubit_ops()
    b = build_boson_ops(3)
    with pytest.raises(SpaceMismatchError):
        hs_inner(q["sigma_x"], b["a"])


def test_hs_inner_conjugate_symmetry(rng):
    for _ in range(25):
        dim = int(rng.integers(2, 17))
        space = HilbertSpace((dim,))
        a = Operator(space, rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        b = Operator(space, rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        assert abs(hs_inner(a, b) - np.conj(hs_inner(b, a))) <= 1e-14 * hs_norm(a) * hs_norm(b)
        self_ip = hs_inner(a, a)
        assert abs(self_ip.imag) <= 1e-14 * abs(self_ip)
        assert self_ip.real >= 0


def test_hermitian_decomposition_qubit_cases():
    q = build_qubit_ops()
    dec = hermitian_spectral_decomposition(q["sigma_z"])
    assert_allclose(dec.eigenvalues, [1.0, -1.0], atol=1e-15)
    assert_allclose(np.abs(dec.eigenvectors), np.eye(2), atol=1e-14)
    dec_x = hermitian_spectral_decomposition(q["sigma_x"])
    assert_allclose(dec_x.eigenvalues, [1.0, -1.0], atol=1e-15)
    assert_allclose(np.abs(dec_x.eigenvectors), np.full((2, 2), 1 / np.sqrt(2)), atol=1e-14)


def test_hermitian_decomposition_reconstructs_random_inputs(rng):
    for _ in range(100):
        dim = int(rng.integers(2, 17))
        space = HilbertSpace((dim,))
        a = Operator(space, random_hermitian(rng, dim))
        dec = hermitian_spectral_decomposition(a)
        assert np.linalg.norm(dec.reconstruct() - a.matrix) <= 1e-10
        gram = dec.eigenvectors.conj().T @ dec.eigenvectors
        assert np.abs(gram - np.eye(dim)).max() <= 1e-12
        assert np.all(np.diff(dec.eigenvalues) <= 1e-12)


def test_hermitian_decomposition_rejects_non_hermitian():
    space = HilbertSpace((2,))
    with pytest.raises(HermiticityError, match="not Hermitian"):
        hermitian_spectral_decomposition(Operator(space, [[0, 1], [0, 0]]))


def test_hilbert_space_indexing_bijection():
    space = HilbertSpace((2, 3))
    seen = set()
    for idx in range(space.dim):
        multi = space.multi_of(idx)
        assert space.index_of(multi) == idx
        seen.add(multi)
    assert len(seen) == 6
    assert space.dim == 6


def test_operator_rejects_nonfinite_and_wrong_shape():
    space = HilbertSpace((2,))
    with pytest.raises(ValueError, match="finite"):
        Operator(space, [[np.nan, 0], [0, 0]])
    with pytest.raises(ValueError, match="shape"):
        Operator(space, np.zeros((3, 3)))


def test_operator_matrix_is_immutable():
    q = build_qubit_ops()
    with pytest.raises(ValueError):
        q["sigma_x"].matrix[0, 0] = 5.0
