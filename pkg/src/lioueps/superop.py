"""Vectorization and assembly of superoperator matrices.

Vectorization convention (fixed globally, tagged on every SuperOp):
row-major stacking, vec(|m><n|) sits at flat index m*D + n, so that
vec(A B C) = (A kron C^T) vec(B).  Under this convention

    left_action(O)  = O kron 1          (O . )
    right_action(O) = 1 kron O^T        ( . O)

and the Hilbert-Schmidt product is the plain vector inner product,
<A|B> = vec(A)^dag vec(B).

Rate folding: a LindbladModel stores jump channels as (rate, operator)
pairs and every builder uses the effective jump operator
Gamma = sqrt(rate) * X inside the unit-normalized dissipator

    D[Gamma] rho = Gamma rho Gamma^dag - 1/2 {Gamma^dag Gamma, rho}.

This is the one convention that reproduces all the closed-form spectra
of the bundled model families (see models.py); dense storage only, the
supported envelope is D^2 up to a few thousand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HermiticityError
from .ops_core import DEFAULT_HERM_TOL, HilbertSpace, Operator

VEC_CONVENTION = "vec-rowmajor"


@dataclass(frozen=True)
class LindbladModel:
    """Hermitian Hamiltonian plus jump channels (rate, operator).

    The single source of truth for building the full generator, its
    no-jump part, and the effective non-Hermitian Hamiltonian.
    """

    H: Operator
    jumps: tuple[tuple[float, Operator], ...] = ()
    herm_tol: float = DEFAULT_HERM_TOL

    def __post_init__(self):
        if not self.H.is_hermitian(self.herm_tol):
            raise HermiticityError("model Hamiltonian is not Hermitian")
        jumps = tuple((float(g), x) for g, x in self.jumps)
        for g, x in jumps:
            if g < 0:
                raise ValueError(f"jump rate must be >= 0, got {g}")
            if not x.space.compatible(self.H.space):
                raise ValueError("jump operator lives on a different space than H")
        object.__setattr__(self, "jumps", jumps)

    @property
    def space(self) -> HilbertSpace:
        return self.H.space

    @property
    def dim(self) -> int:
        return self.H.space.dim

    def folded_jump_matrices(self) -> list[np.ndarray]:
        """Effective jump operators Gamma = sqrt(rate) * X as raw arrays."""
        return [np.sqrt(g) * x.matrix for g, x in self.jumps]


@dataclass(frozen=True)
class SuperOp:
    """Dense D^2 x D^2 matrix acting on vectorized operators."""

    space: HilbertSpace
    matrix: np.ndarray
    convention: str = VEC_CONVENTION

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d2 = self.space.dim ** 2
        if m.shape != (d2, d2):
            raise ValueError(f"superoperator shape {m.shape} does not match D^2 = {d2}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def __call__(self, rho: Operator) -> Operator:
        """Apply to an operator: devectorize(matrix @ vec(rho))."""
        return devectorize(self.matrix @ vectorize(rho), self.space)


def vectorize(a) -> np.ndarray:
    """Row-major vectorization; accepts an Operator or a square array."""
    m = a.matrix if isinstance(a, Operator) else np.asarray(a, dtype=complex)
    return m.reshape(-1).copy()


def devectorize(v: np.ndarray, space: HilbertSpace | None = None):
    """Inverse of vectorize.

    Returns an Operator when a space is given, otherwise a bare array.
    Raises ValueError if the length is not a perfect square.
    """
    v = np.asarray(v, dtype=complex)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    m = v.reshape(d, d)
    if space is None:
        return m
    if space.dim != d:
        raise ValueError(f"space dimension {space.dim} does not match vector length {v.size}")
    return Operator(space, m)


def left_action(o: Operator) -> SuperOp:
    """Matrix of rho -> O rho."""
    eye = np.eye(o.space.dim)
    return SuperOp(o.space, np.kron(o.matrix, eye))


def right_action(o: Operator) -> SuperOp:
    """Matrix of rho -> rho O."""
    eye = np.eye(o.space.dim)
    return SuperOp(o.space, np.kron(eye, o.matrix.T))


def _dissipator_matrix(g: np.ndarray) -> np.ndarray:
    eye = np.eye(g.shape[0])
    gdg = g.conj().T @ g
    return np.kron(g, g.conj()) - 0.5 * np.kron(gdg, eye) - 0.5 * np.kron(eye, gdg.T)


def dissipator_superop(gamma_op: Operator) -> SuperOp:
    """Matrix of the unit-normalized dissipator D[Gamma].

    D[Gamma] rho = Gamma rho Gamma^dag - 1/2 {Gamma^dag Gamma, rho};
    the rate, if any, is expected to be folded into Gamma already.
    """
    return SuperOp(gamma_op.space, _dissipator_matrix(gamma_op.matrix))


def jump_superop(gamma_op: Operator) -> SuperOp:
    """Matrix of the jump term rho -> Gamma rho Gamma^dag (= Gamma kron Gamma^*)."""
    return SuperOp(gamma_op.space, np.kron(gamma_op.matrix, gamma_op.matrix.conj()))


def effective_hamiltonian(model: LindbladModel) -> Operator:
    """H_eff = H - (i/2) sum_mu Gamma_mu^dag Gamma_mu."""
    m = model.H.matrix.astype(complex).copy()
    for g in model.folded_jump_matrices():
        m -= 0.5j * (g.conj().T @ g)
    return Operator(model.space, m, model.H.units)


def assemble_liouvillian(model: LindbladModel) -> SuperOp:
    """Full generator: -i[H, .] plus all dissipators (rates folded in).

    The result annihilates the trace row: vec(1)^dag L = 0.
    """
    h = model.H.matrix
    eye = np.eye(model.dim)
    mat = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for g in model.folded_jump_matrices():
        mat += _dissipator_matrix(g)
    return SuperOp(model.space, mat)


def assemble_liouvillian_no_jumps(model: LindbladModel) -> SuperOp:
    """No-jump generator: -i(H_eff . - . H_eff^dag).

    Equals assemble_liouvillian(model) minus every jump term; not trace
    preserving as soon as any jump operator is nonzero.
    """
    heff = effective_hamiltonian(model).matrix
    eye = np.eye(model.dim)
    mat = -1j * (np.kron(heff, eye) - np.kron(eye, heff.conj()))
    return SuperOp(model.space, mat)


def apply_liouvillian(model: LindbladModel, rho: Operator) -> Operator:
    """Apply the full generator directly in operator form.

    Same map as assemble_liouvillian, but O(D^3) instead of O(D^4)
    storage; use this at large cutoffs where the dense superoperator
    matrix would not fit.
    """
    if not rho.space.compatible(model.space):
        raise ValueError("state lives on a different space than the model")
    h = model.H.matrix
    r = rho.matrix
    out = -1j * (h @ r - r @ h)
    for g in model.folded_jump_matrices():
        gdg = g.conj().T @ g
        out += g @ r @ g.conj().T - 0.5 * (gdg @ r + r @ gdg)
    return Operator(model.space, out)


def trace_row(s: SuperOp) -> np.ndarray:
    """vec(1)^dag L, the row that must vanish for a trace-preserving generator."""
    return vectorize(np.eye(s.dim)).conj() @ s.matrix


def kraus_step(model: LindbladModel, rho: Operator, tau: float) -> Operator:
    """One step of the minimal two-operator Kraus map.

    rho -> M0 rho M0^dag + tau * Gamma rho Gamma^dag with
    M0 = 1 - i tau H_eff.  Agrees with the Euler step rho + tau L rho
    up to an exactly quadratic defect tau^2 H_eff rho H_eff^dag, so
    halving tau quarters the defect.

    Only defined for models with exactly one jump channel.
    """
    if len(model.jumps) != 1:
        raise ValueError("kraus_step requires a model with exactly one jump channel")
    if tau <= 0:
        raise ValueError("tau must be positive")
    g = model.folded_jump_matrices()[0]
    m0 = np.eye(model.dim) - 1j * tau * effective_hamiltonian(model).matrix
    r = rho.matrix
    out = m0 @ r @ m0.conj().T + tau * (g @ r @ g.conj().T)
    return Operator(model.space, out)
