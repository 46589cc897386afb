"""Dense complex linear algebra for finite quantum systems.

Operators are plain ``numpy`` arrays. The ``check_*`` helpers validate the
algebraic invariants (Hermitian, unitary, projection, density matrix) and
return the array cast to ``complex128`` so that callers can chain them.

All matrix functions go through the Hermitian eigendecomposition; the
exponential of a Hermitian generator is ``V exp(i t D) V*``.

Tensor order: the leftmost factor of a Kronecker product is the most
significant index block. On a chain the site with the smallest label is the
leftmost factor.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

# structural invariants / derived identities
STRUCT_TOL = 1e-12
DERIVED_TOL = 1e-10


class DomainError(ValueError):
    """A scalar function is undefined at an eigenvalue of its argument."""


def _as_square(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def operator_norm(A: np.ndarray) -> float:
    """Largest singular value."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return float(np.linalg.norm(A, 2))


def dagger(A: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B + B @ A


def check_hermitian(A: np.ndarray, tol: float = STRUCT_TOL) -> np.ndarray:
    A = _as_square(A)
    defect = np.max(np.abs(A - dagger(A))) if A.size else 0.0
    if defect > tol * (1.0 + operator_norm(A)):
        raise ValueError(f"operator is not Hermitian (defect {defect:.3e})")
    return A


def check_unitary(U: np.ndarray, tol: float = DERIVED_TOL) -> np.ndarray:
    U = _as_square(U)
    defect = operator_norm(dagger(U) @ U - np.eye(U.shape[0]))
    if defect > tol:
        raise ValueError(f"operator is not unitary (defect {defect:.3e})")
    return U


def check_projection(E: np.ndarray, tol: float = STRUCT_TOL) -> np.ndarray:
    E = _as_square(E)
    if operator_norm(E @ E - E) > tol or operator_norm(E - dagger(E)) > tol:
        raise ValueError("operator is not an orthogonal projection")
    return E


def projection_rank(E: np.ndarray) -> int:
    return int(round(float(np.trace(E).real)))


def check_density(rho: np.ndarray, tol: float = STRUCT_TOL) -> np.ndarray:
    rho = check_hermitian(rho, tol)
    evals = np.linalg.eigvalsh(rho)
    if evals.size and evals[0] < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {evals[0]:.3e}")
    if abs(np.trace(rho).real - 1.0) > DERIVED_TOL:
        raise ValueError(f"density matrix has trace {np.trace(rho).real!r}")
    return rho


def eigh(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition ``H = V diag(w) V*`` with a diagnostic on failure."""
    H = _as_square(H)
    try:
        return np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigendecomposition failed: {exc}") from exc


def spectral_exp(H: np.ndarray, z: complex, spectrum=None) -> np.ndarray:
    """``exp(i z H)`` for Hermitian ``H`` and a real or complex time ``z``.

    ``spectrum`` may carry a precomputed ``(w, V)`` pair.
    """
    w, V = spectrum if spectrum is not None else eigh(H)
    return (V * np.exp(1j * z * w)) @ dagger(V)


def hermitian_evolution(H: np.ndarray, t: float) -> np.ndarray:
    """The unitary ``U(t) = exp(i t H)``."""
    return spectral_exp(H, float(t))


def matrix_function(H: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real scalar function to a Hermitian operator through its spectrum.

    ``f`` is called on the array of eigenvalues. A non-finite value of ``f``
    at any eigenvalue raises :class:`DomainError` naming that eigenvalue.
    """
    w, V = eigh(H)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=np.complex128)
    bad = ~np.isfinite(fw)
    if np.any(bad):
        raise DomainError(f"function undefined at eigenvalue {w[bad][0]!r}")
    return (V * fw) @ dagger(V)


def tensor(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product; the first argument is the most significant block."""
    out = np.ones((1, 1), dtype=np.complex128)
    for M in mats:
        out = np.kron(out, M)
    return out


def partial_trace(rho: np.ndarray, keep: Iterable[int], dims: Sequence[int]) -> np.ndarray:
    """Reduced operator on the factors listed in ``keep``.

    ``dims`` is the tensor factorization of the space, most significant
    factor first. Kept factors appear in increasing order. Keeping nothing
    returns the 1x1 matrix holding the trace.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims)) if dims else 1
    if rho.shape != (total, total):
        raise ValueError(f"factorization {dims} inconsistent with shape {rho.shape}")
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    T = rho.reshape(dims + dims)
    # contract row index i with column index i for every traced factor
    row = list(range(n))
    col = list(range(n, 2 * n))
    for i in traced:
        col[i] = row[i]
    out_idx = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum(T, row + col, out_idx)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of the difference."""
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def range_basis(E: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the range of a projection."""
    w, V = eigh(E)
    return V[:, w > 0.5]
