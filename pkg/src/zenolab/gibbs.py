"""Gibbs and Zeno-Gibbs states, KMS residuals, and relative entropy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DERIVED_TOL,
    check_density,
    check_hermitian,
    dagger,
    eigh,
    operator_norm,
    range_basis,
)

MAX_EXPONENT = 700.0
# relative entropy S(omega, phi) = Tr rho_phi (log rho_phi - log rho_omega)
ENTROPY_SIGN = "S(omega,phi)=Tr[rho_phi(log rho_phi - log rho_omega)]"


class NumericalOverflowError(ArithmeticError):
    pass


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError(f"inverse temperature must be positive and finite, got {beta}")
    return beta


def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    """``exp(-beta H) / Tr exp(-beta H)``, ground energy subtracted first."""
    beta = _check_beta(beta)
    w, V = eigh(check_hermitian(H))
    weights = np.exp(-beta * (w - w[0]))
    weights /= weights.sum()
    return (V * weights) @ dagger(V)


def zeno_gibbs_state(H: np.ndarray, beta: float, E: np.ndarray) -> np.ndarray:
    """Gibbs state of ``EHE`` with the trace restricted to the range of ``E``."""
    B = range_basis(E)
    if B.shape[1] == 0:
        raise ValueError("Zeno projection has rank 0")
    reduced = dagger(B) @ np.asarray(H, dtype=np.complex128) @ B
    return B @ gibbs_state(0.5 * (reduced + dagger(reduced)), beta) @ dagger(B)


def restrict(op: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Matrix of ``op`` in an orthonormal basis of the range of ``E``."""
    B = range_basis(E)
    return dagger(B) @ op @ B


def kms_residual(
    rho: np.ndarray,
    H: np.ndarray,
    beta: float,
    A: np.ndarray,
    B: np.ndarray,
    support: np.ndarray | None = None,
) -> float:
    """``|Tr(rho A e^{-bH} B e^{bH}) - Tr(rho B A)| / (||A|| ||B||)``.

    With ``support`` (a projection) every operator is first restricted to
    its range, which is how non-faithful states such as Zeno-Gibbs states
    are tested.
    """
    beta = _check_beta(beta)
    if support is not None:
        rho, H, A, B = (restrict(X, support) for X in (rho, H, A, B))
    w, V = eigh(H)
    width = beta * (w[-1] - w[0])
    if width > MAX_EXPONENT:
        raise NumericalOverflowError(
            f"beta * spectral width = {width:.1f} exceeds {MAX_EXPONENT}; rescale H or beta"
        )
    shifted = w - w[0]
    down = (V * np.exp(-beta * shifted)) @ dagger(V)
    up = (V * np.exp(beta * shifted)) @ dagger(V)
    lhs = np.trace(rho @ A @ down @ B @ up)
    rhs = np.trace(rho @ B @ A)
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        raise NumericalOverflowError("non-finite KMS correlation; rescale H or beta")
    scale = operator_norm(A) * operator_norm(B)
    if scale == 0:
        return 0.0
    return float(abs(lhs - rhs) / scale)


def relative_entropy(omega: np.ndarray, phi: np.ndarray, tol: float = 1e-12) -> float:
    """``S(omega, phi) = Tr rho_phi (log rho_phi - log rho_omega)``.

    Returns ``inf`` when the support of ``phi`` is not contained in that of
    ``omega``.
    """
    p, P = eigh(phi)
    q, Q = eigh(omega)
    p = np.clip(p, 0.0, None)
    pos = p > tol
    entropy_term = float(np.sum(p[pos] * np.log(p[pos])))
    # weight of phi's eigenvector i on omega's eigenvector j
    overlap = np.abs(dagger(Q) @ P) ** 2
    flow = overlap @ p  # phi's weight on each omega eigenvector
    null = q <= tol
    if np.any(flow[null] > 1e3 * tol):
        return float("inf")
    cross = float(np.sum(flow[~null] * np.log(q[~null])))
    return entropy_term - cross


@dataclass(frozen=True)
class EntropyReport:
    relative_entropy: float
    bound: float
    equality_gap: float


def raggio_werner_check(omega: np.ndarray, E: np.ndarray, omega_tilde: np.ndarray) -> EntropyReport:
    """Compare ``S(omega, omega_tilde)`` with ``-log omega(E)``.

    ``omega_tilde`` must give ``E`` probability one.
    """
    weight = float(np.trace(omega_tilde @ E).real)
    if abs(weight - 1.0) > DERIVED_TOL:
        raise ValueError(f"omega_tilde(E) = {weight!r}, expected 1")
    s = relative_entropy(omega, omega_tilde)
    bound = -float(np.log(np.trace(omega @ E).real))
    return EntropyReport(s, bound, s - bound)


def compress_state(rho: np.ndarray, E: np.ndarray) -> np.ndarray:
    """``E rho E / Tr(E rho E)``."""
    out = E @ rho @ E
    norm = np.trace(out).real
    if norm <= 0:
        raise ValueError("state gives the projection zero weight")
    return out / norm


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G* / Tr`` with ``G`` a complex Gaussian ``dim x rank`` matrix."""
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ dagger(G)
    return check_density(rho / np.trace(rho).real, tol=1e-10)


def random_operator(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    A = random_operator(dim, rng)
    return 0.5 * (A + dagger(A))
