"""Spectral analysis of superoperators and effective Hamiltonians.

analyze_liouvillian diagonalizes a trace-preserving generator, sorts the
eigenvalues by |Re| (slowest decay first), pairs left and right
eigenmatrices so that Tr(sigma_i rho_j) = delta_ij, and extracts the
steady state from the zero-eigenvalue sector.  Near-defective pairs are
flagged instead of force-normalized: the spectral expansion of the
dynamics is invalid exactly at an exceptional point, and silently
rescaled left eigenmatrices there would poison every downstream
coefficient.

Sorting convention: |Re(lambda)| ascending, ties broken by Im(lambda)
ascending, final deterministic tiebreak on the eigenmatrix entries
(lexicographic).  For effective Hamiltonians the analogous order is
|Im(h)| ascending then Re(h): the no-jump generator maps h onto
-i(h_l - h_m^*), so Im(h) plays the role of Re(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import HermiticityError, SpectralError
from .ops_core import (
    HilbertSpace,
    Operator,
    hermitian_spectral_decomposition,
)
from .superop import (
    LindbladModel,
    SuperOp,
    assemble_liouvillian,
    devectorize,
    effective_hamiltonian,
    vectorize,
)

DEFAULT_ZERO_TOL = 1e-10
# At an exact EP the eigensolver splits the defective pair by O(sqrt(eps)),
# and |Tr(sigma rho)| of the returned unit vectors lands at the same scale
# (~1e-8): a much smaller threshold would never fire in double precision,
# while healthy pairs sit at O(0.1).
DEFAULT_DEFECT_TOL = 1e-6


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _entry_key(v: np.ndarray) -> tuple:
    return tuple(x for pair in ((z.real, z.imag) for z in v) for x in pair)

def _sort_indices(vals: np.ndarray, vecs: np.ndarray, primary) -> list[int]:
    """Total deterministic order: primary key, then eigenvector entries."""
    return sorted(range(len(vals)),
                  key=lambda i: primary(vals[i]) + (_entry_key(vecs[:, i]),))


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude entry is real and positive."""
    k = int(np.argmax(np.abs(v)))
    piv = v[k]
    if piv == 0:
        return v
    return v * (abs(piv) / piv)


def hermitian_representative(m: np.ndarray) -> tuple[np.ndarray, float]:
    """Best Hermitian phase rotation of a matrix.

    Finds the phase theta minimizing the anti-Hermitian residual of
    m * exp(i theta) and returns (Hermitian part of the rotated matrix,
    relative residual).  Eigensolvers return real-eigenvalue
    eigenmatrices with arbitrary phases; this recovers the Hermitian
    representative they are proportional to.
    """
    h1 = 0.5 * (m + m.conj().T)
    h2 = (m - m.conj().T) / 2j
    g11 = np.vdot(h2, h2).real
    g22 = np.vdot(h1, h1).real
    g12 = np.vdot(h1, h2).real
    gram = np.array([[g11, g12], [g12, g22]])
    w, u = np.linalg.eigh(gram)
    c, s = u[:, 0]
    theta = np.arctan2(s, c)
    rot = m * np.exp(1j * theta)
    herm = 0.5 * (rot + rot.conj().T)
    anti = 0.5 * (rot - rot.conj().T)
    scale = max(np.linalg.norm(m), 1e-300)
    return herm, float(np.linalg.norm(anti) / scale)


def _canonical_sign(m: np.ndarray) -> np.ndarray:
    """Fix the +-1 ambiguity of a Hermitian matrix deterministically."""
    flat = m.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    piv = flat[k]
    ref = piv.real if abs(piv.real) >= abs(piv.imag) else piv.imag
    return -m if ref < 0 else m


# ---------------------------------------------------------------------------
# Liouvillian spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Sorted eigensystem of a trace-preserving generator.

    right_mats[i] has unit Hilbert-Schmidt norm; left_mats[i] is scaled
    so that Tr(left_mats[i] @ right_mats[j]) = delta_ij wherever no
    defect flag is set.  For flagged (near-defective) indices the left
    matrix is kept at unit norm and unscaled.
    """

    space: HilbertSpace
    eigenvalues: np.ndarray
    right_mats: np.ndarray
    left_mats: np.ndarray
    defect_flags: np.ndarray
    steady_state: Operator
    zero_indices: tuple[int, ...]
    zero_sector_rank: int

    @property
    def dim(self) -> int:
        return self.space.dim

    def right(self, i: int) -> Operator:
        return Operator(self.space, self.right_mats[i])

    def left(self, i: int) -> Operator:
        return Operator(self.space, self.left_mats[i])

    def right_vectors(self) -> np.ndarray:
        """Vectorized right eigenmatrices as unit columns, shape (D^2, n)."""
        return self.right_mats.reshape(len(self.eigenvalues), -1).T.copy()

    def mode_weights(self, rho0: Operator) -> np.ndarray:
        """Expansion coefficients c_i = Tr(sigma_i rho0)."""
        return np.array([np.trace(s @ rho0.matrix) for s in self.left_mats])


def analyze_liouvillian(liou: SuperOp,
                        zero_tol: float = DEFAULT_ZERO_TOL,
                        defect_tol: float = DEFAULT_DEFECT_TOL,
                        cluster_tol: float | None = None) -> Spectrum:
    """Full eigensystem of a trace-preserving generator.

    Raises SpectralError when no zero eigenvalue is found within
    zero_tol (the input was not a Liouvillian, or trace preservation
    was broken upstream).  Degenerate zero sectors are orthonormalized
    and the trace-carrying combination defines the steady state, which
    is validated to be Hermitian, positive semidefinite and trace one.
    """
    mat = liou.matrix
    n = mat.shape[0]
    if cluster_tol is None:
        # a defective eigenvalue splits by O(sqrt(eps ||L||)) in double
        # precision; clustering just above that scale lets the cluster
        # mean restore O(eps) accuracy at exceptional points
        cluster_tol = max(1e-9, 4.0 * np.sqrt(np.finfo(float).eps * np.linalg.norm(mat, 2)))

    vals, vecs = scipy.linalg.eig(mat)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    order = _sort_indices(vals, vecs, lambda z: (abs(z.real), z.imag))
    vals = vals[order]
    vecs = vecs[:, order]

    # replace each tight cluster by its mean eigenvalue
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(vals[stop] - vals[start]) <= cluster_tol:
            stop += 1
        if stop - start > 1:
            vals[start:stop] = vals[start:stop].mean()
        start = stop

    zero_mask = np.abs(vals) <= zero_tol
    zero_idx = np.flatnonzero(zero_mask)
    if zero_idx.size == 0:
        raise SpectralError("not a Liouvillian (trace check failed upstream?)")

    # zero sector: record its rank, then orthonormalize (it is guaranteed
    # diagonalizable, so the span is an invariant subspace)
    zblock = vecs[:, zero_idx]
    svals = np.linalg.svd(zblock, compute_uv=False)
    zero_rank = int(np.sum(svals > 1e-8 * svals[0]))
    q, _ = np.linalg.qr(zblock)
    vecs[:, zero_idx] = q

    # steady state: trace-carrying combination of the zero sector
    trace_vec = vectorize(np.eye(liou.dim))
    ss_vec = q @ (q.conj().T @ trace_vec)
    if np.linalg.norm(ss_vec) < 1e-12:
        raise SpectralError("zero sector carries no trace; cannot extract a steady state")
    ss = devectorize(ss_vec)
    ss = 0.5 * (ss + ss.conj().T)
    ss = ss / np.trace(ss).real
    if np.linalg.eigvalsh(ss).min() < -1e-10:
        raise SpectralError("steady-state extraction produced an indefinite matrix")

    # deterministic representatives: Hermitian rotation for isolated real
    # eigenvalues, canonical phase otherwise
    for i in range(n):
        if zero_mask[i]:
            vecs[:, i] = _canonical_phase(vecs[:, i])
            continue
        isolated = np.sum(np.abs(vals - vals[i]) <= cluster_tol) == 1
        if isolated and abs(vals[i].imag) <= zero_tol:
            m, resid = hermitian_representative(devectorize(vecs[:, i]))
            if resid <= 1e-8:
                m = _canonical_sign(m / np.linalg.norm(m))
                vecs[:, i] = m.reshape(-1)
                continue
        vecs[:, i] = _canonical_phase(vecs[:, i])

    # left eigenvectors: right eigenvectors of the conjugate transpose
    lvals, lvecs = scipy.linalg.eig(mat.conj().T)
    lvecs = lvecs / np.linalg.norm(lvecs, axis=0)
    lvals_c = lvals.conj()

    left = np.zeros_like(vecs)
    flags = np.zeros(n, dtype=bool)
    used = np.zeros(n, dtype=bool)

    clusters: list[list[int]] = []
    for i in range(n):
        if clusters and abs(vals[i] - vals[clusters[-1][0]]) <= cluster_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    for cluster in clusters:
        lam = vals[cluster[0]]
        cand = [j for j in range(n) if not used[j]]
        cand.sort(key=lambda j: abs(lvals_c[j] - lam))
        chosen = cand[:len(cluster)]
        for j in chosen:
            used[j] = True
        y = lvecs[:, chosen]
        x = vecs[:, cluster]
        b = y.conj().T @ x
        smin = np.linalg.svd(b, compute_uv=False)[-1]
        if smin < defect_tol:
            flags[cluster] = True
            left[:, cluster] = y
        else:
            left[:, cluster] = y @ np.linalg.inv(b).conj().T

    d = liou.dim
    right_mats = np.stack([vecs[:, i].reshape(d, d) for i in range(n)])
    # store sigma_i = devec(y_i)^dag so that Tr(sigma_i rho_j) = y_i^dag x_j
    left_mats = np.stack([left[:, i].reshape(d, d).conj().T for i in range(n)])

    return Spectrum(
        space=liou.space,
        eigenvalues=vals,
        right_mats=right_mats,
        left_mats=left_mats,
        defect_flags=flags,
        steady_state=Operator(liou.space, ss),
        zero_indices=tuple(int(i) for i in zero_idx),
        zero_sector_rank=zero_rank,
    )


# ---------------------------------------------------------------------------
# effective-Hamiltonian spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NhhSpectrum:
    """Eigensystem of an effective non-Hermitian Hamiltonian.

    eigenvectors holds unit columns; near_defective is set when the
    eigenvector matrix is ill-conditioned (eigenvalues have merged).
    The induced no-jump eigenvalues -i(h_l - h_m^*) reproduce the
    spectrum of the no-jump generator as a multiset, with eigenmatrices
    |phi_l><phi_m|.
    """

    space: HilbertSpace
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    near_defective: bool

    @property
    def dim(self) -> int:
        return self.space.dim

    def induced_eigenvalues(self) -> np.ndarray:
        """No-jump eigenvalues -i(h_l - h_m^*), flat index l*D + m."""
        h = self.eigenvalues
        return ((-1j * h)[:, None] + (1j * h.conj())[None, :]).reshape(-1)

    def induced_eigenmatrix(self, l: int, m: int) -> np.ndarray:
        """Unit-norm eigenmatrix |phi_l><phi_m| of the no-jump generator."""
        return np.outer(self.eigenvectors[:, l], self.eigenvectors[:, m].conj())


def analyze_nhh(heff: Operator, defect_cond: float = 1e8) -> NhhSpectrum:
    """Eigensystem of H_eff, sorted by (|Im h|, Re h).

    Defectiveness is a flag, not an error: the eigenvector-matrix
    condition number is compared against defect_cond.
    """
    vals, vecs = scipy.linalg.eig(heff.matrix)
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    order = _sort_indices(vals, vecs, lambda z: (abs(z.imag), z.real))
    vals = vals[order]
    vecs = vecs[:, order]
    for i in range(vecs.shape[1]):
        vecs[:, i] = _canonical_phase(vecs[:, i])
    cond = np.linalg.cond(vecs)
    return NhhSpectrum(heff.space, vals, vecs, bool(cond > defect_cond))


# ---------------------------------------------------------------------------
# eigenmatrix decompositions
# ---------------------------------------------------------------------------

def pm_decomposition(rho: Operator, herm_tol: float = 1e-8) -> tuple[Operator, Operator]:
    """Split a Hermitian traceless eigenmatrix into two density matrices.

    Diagonalizes rho and regroups the positive and negative eigenvalue
    parts, each rescaled to trace one, so that rho is proportional to
    (plus - minus).  The wave functions inside plus/minus are the ones
    comparable with effective-Hamiltonian eigenvectors.
    """
    m = rho.matrix
    scale = max(np.abs(m).max(), 1e-300)
    if np.abs(m - m.conj().T).max() > herm_tol * scale:
        raise HermiticityError("pm_decomposition requires a Hermitian input")
    dec = hermitian_spectral_decomposition(Operator(rho.space, 0.5 * (m + m.conj().T)), tol=np.inf)
    p = dec.eigenvalues
    tiny = 1e-12 * np.abs(p).max()
    pos = p > tiny
    neg = p < -tiny
    if not pos.any() or not neg.any():
        raise SpectralError("not traceless: eigenvalues do not change sign")
    vp = dec.eigenvectors[:, pos]
    vm = dec.eigenvectors[:, neg]
    plus = (vp * p[pos]) @ vp.conj().T / p[pos].sum()
    minus = (vm * p[neg]) @ vm.conj().T / p[neg].sum()
    return Operator(rho.space, plus), Operator(rho.space, minus)


def sym_antisym(rho: Operator) -> tuple[Operator, Operator]:
    """Hermitian combinations rho + rho^dag and i(rho - rho^dag)."""
    sym = rho.matrix + rho.matrix.conj().T
    anti = 1j * (rho.matrix - rho.matrix.conj().T)
    return Operator(rho.space, sym), Operator(rho.space, anti)


# ---------------------------------------------------------------------------
# automated lemma checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class LemmaReport:
    checks: tuple[LemmaCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  {c.detail}"
                 for c in self.checks]
        return "\n".join(lines)


def check_lemmas(spectrum: Spectrum, model: LindbladModel,
                 t: float = 0.1,
                 zero_tol: float = DEFAULT_ZERO_TOL) -> LemmaReport:
    """Run the structural checks every Liouvillian spectrum must satisfy.

    eigenmode-decay       exp(L t) rho_i = exp(lambda_i t) rho_i
    traceless-decay       lambda_i != 0 implies Tr rho_i = 0 (and a
                          nonzero trace pins the eigenvalue to zero)
    conjugate-pairing     lambda_i* is an eigenvalue, with eigenmatrix
                          rho_i^dag
    commuting-jumps       if every jump operator commutes with H_eff,
                          all eigenmatrices are of the form
                          |phi_l><phi_m|
    zero-sector-
    diagonalizable        the zero-eigenvalue sector is non-defective
    no-steady-state-ep    no zero-eigenvalue branch carries a defect
                          flag (an EP cannot live on the steady state)
    """
    liou = assemble_liouvillian(model)
    mat = liou.matrix
    n = len(spectrum.eigenvalues)
    vals = spectrum.eigenvalues
    vecs = spectrum.right_vectors()
    scale = max(np.linalg.norm(mat), 1e-300)
    checks = []

    # L1: eigenmode propagation
    prop = scipy.linalg.expm(mat * t)
    resid = max(
        float(np.linalg.norm(prop @ vecs[:, i] - np.exp(vals[i] * t) * vecs[:, i]))
        for i in range(n))
    checks.append(LemmaCheck("eigenmode-decay", resid <= 1e-8,
                             f"max |exp(Lt) rho - exp(lambda t) rho| = {resid:.2e} at t={t}"))

    # L2: a nonzero trace forces a zero eigenvalue (equivalently, every
    # decaying eigenmatrix is traceless)
    traces = np.array([abs(np.trace(spectrum.right_mats[i])) for i in range(n)])
    nonzero = np.abs(vals) > zero_tol
    ok2 = not np.any(nonzero & (traces > 1e-8))
    worst = float(traces[nonzero].max()) if nonzero.any() else 0.0
    checks.append(LemmaCheck("traceless-decay", ok2,
                             f"max |Tr rho_i| over decaying modes = {worst:.2e}"))

    # L3: conjugate pairing
    pair_tol = max(1e-8, 1e-10 * scale)
    worst3 = 0.0
    ok3 = True
    for i in range(n):
        partners = np.flatnonzero(np.abs(vals - vals[i].conj()) <= pair_tol)
        if partners.size == 0:
            ok3 = False
            worst3 = np.inf
            break
        span = vecs[:, partners]
        target = vectorize(spectrum.right_mats[i].conj().T)
        coef, *_ = np.linalg.lstsq(span, target, rcond=None)
        resid3 = float(np.linalg.norm(span @ coef - target))
        worst3 = max(worst3, resid3)
    checks.append(LemmaCheck("conjugate-pairing", ok3 and worst3 <= 1e-8,
                             f"max projection residual of rho_i^dag = {worst3:.2e}"))

    # L4: commuting jump operators
    heff = effective_hamiltonian(model).matrix
    comms = [np.abs(g @ heff - heff @ g).max() for g in model.folded_jump_matrices()]
    commuting = all(c <= 1e-12 * max(np.abs(heff).max(), 1.0) for c in comms)
    if commuting and model.jumps:
        nhh = analyze_nhh(effective_hamiltonian(model))
        phi = nhh.eigenvectors
        worst4 = 1.0
        for i in range(n):
            ovl = np.abs(phi.conj().T @ spectrum.right_mats[i] @ phi).max()
            worst4 = min(worst4, float(ovl))
        checks.append(LemmaCheck("commuting-jumps", worst4 >= 1 - 1e-8,
                                 f"min best overlap with |phi_l><phi_m| = {worst4:.12f}"))
    else:
        checks.append(LemmaCheck("commuting-jumps", True,
                                 "not applicable (jump operators do not commute with H_eff)"))

    # L5: zero sector diagonalizable
    zi = list(spectrum.zero_indices)
    mult = len(zi)
    resid5 = max(float(np.linalg.norm(mat @ vecs[:, i])) for i in zi)
    ok5 = spectrum.zero_sector_rank == mult and resid5 <= 1e-8 * scale
    checks.append(LemmaCheck("zero-sector-diagonalizable", ok5,
                             f"multiplicity {mult}, rank {spectrum.zero_sector_rank}, "
                             f"max |L rho| = {resid5:.2e}"))

    # T1 guard: steady-state branches never coalesce
    ok_t1 = not any(spectrum.defect_flags[i] for i in zi)
    checks.append(LemmaCheck("no-steady-state-ep", ok_t1,
                             "zero-eigenvalue branches carry no defect flag"))

    return LemmaReport(tuple(checks))
