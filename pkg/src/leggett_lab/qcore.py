"""Dense Pauli algebra and brute-force correlators for small qubit registers.

This module is the ground-truth side of every cross-check in the package:
correlations computed here come straight from density matrices and Kronecker
products, with no closed-form shortcuts. Party counts are capped at 12, so
dense O(4^N) storage is deliberate and keeps the arithmetic auditable.
"""
from __future__ import annotations

import numpy as np

MAX_PARTIES = 12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
UNIT_NORM_TOL = 1e-12
PSD_TOL = 1e-10
IMAG_TOL = 1e-10
# Eigenvalue checks above this dimension are opt-in; see DensityMatrix.
PSD_AUTO_DIM = 64

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def as_direction(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"direction must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("direction has non-finite components")
    return v


def check_unit(vector, tol: float = UNIT_NORM_TOL) -> np.ndarray:
    """Return the vector unchanged if it has unit length, else raise naming the norm."""
    v = as_direction(vector)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"expected a unit vector, got norm {norm!r}")
    return v


def pauli_dot(direction) -> np.ndarray:
    """sigma . n for a unit direction n on the Poincare sphere."""
    n = check_unit(direction)
    return n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z


def _pauli_dot_linear(vector) -> np.ndarray:
    # linear extension: no unit-norm requirement
    v = as_direction(vector)
    return v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(matrices) -> np.ndarray:
    """Kronecker product of a sequence, first factor most significant."""
    mats = list(matrices)
    if not mats:
        raise ValueError("need at least one matrix")
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m))
    return out


def matrices_close(a, b, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol)


class DensityMatrix:
    """Validated density matrix on N qubits.

    check_psd=None runs an eigenvalue check only for dimension <= 64; pass
    True to force it for larger systems (slow) or False to skip it.
    """

    def __init__(self, matrix, check_psd: bool | None = None):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        n = dim.bit_length() - 1
        if dim != 2**n or n < 1 or n > MAX_PARTIES:
            raise ValueError(f"dimension {dim} is not 2^N with 1 <= N <= {MAX_PARTIES}")
        if float(np.max(np.abs(m - m.conj().T))) > HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {tr!r}")
        if check_psd is None:
            check_psd = dim <= PSD_AUTO_DIM
        if check_psd:
            lowest = float(np.linalg.eigvalsh(m)[0])
            if lowest < -PSD_TOL:
                raise ValueError(f"density matrix has eigenvalue {lowest!r} below -{PSD_TOL}")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_parties(self) -> int:
        return self.dim.bit_length() - 1

    def close_to(self, other, tol: float = 1e-12) -> bool:
        o = other.matrix if isinstance(other, DensityMatrix) else np.asarray(other)
        return matrices_close(self.matrix, o, tol)


def ghz_density(n_parties: int, check_psd: bool | None = None) -> DensityMatrix:
    """GHZ density matrix: value 1/2 at the four corner entries, zero elsewhere."""
    n = int(n_parties)
    if not 2 <= n <= MAX_PARTIES:
        raise ValueError(f"party count must be in [2, {MAX_PARTIES}], got {n_parties}")
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    m[0, 0] = m[0, -1] = m[-1, 0] = m[-1, -1] = 0.5
    return DensityMatrix(m, check_psd=check_psd)


def partial_trace(rho: DensityMatrix, party: int) -> DensityMatrix:
    """Trace out one party (1-based index) of a multi-qubit density matrix."""
    n = rho.n_parties
    p = int(party)
    if not 1 <= p <= n:
        raise ValueError(f"party index must be in [1, {n}], got {party}")
    if n < 2:
        raise ValueError("cannot trace out the only party")
    tensor = rho.matrix.reshape((2,) * (2 * n))
    traced = np.trace(tensor, axis1=p - 1, axis2=n + p - 1)
    dim = 2 ** (n - 1)
    return DensityMatrix(traced.reshape(dim, dim))


def correlation_bruteforce(rho: DensityMatrix, directions) -> float:
    """Tr[rho (sigma.v_1 x ... x sigma.v_N)] for one direction per party.

    Directions are not required to be unit vectors: the value extends
    linearly in each slot, and the tests rely on that multilinearity.
    """
    dirs = [as_direction(d) for d in directions]
    if len(dirs) != rho.n_parties:
        raise ValueError(f"got {len(dirs)} directions for {rho.n_parties} parties")
    observable = kron_all([_pauli_dot_linear(d) for d in dirs])
    value = complex(np.trace(rho.matrix @ observable))
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"correlation has imaginary part {value.imag!r}")
    return float(value.real)
