"""Quasi-free (one-particle) backend for long X-Y chains.

A particle-number-conserving Gaussian state is fixed by its correlation
matrix ``G[x, y] = <a*_y a_x>``. Under ``H = sum h[x,y] a*_x a_y`` the
Heisenberg dynamics ``tau_t(A) = e^{itH} A e^{-itH}`` gives

    G(t) = e^{-ith} G e^{ith},

the orientation pinned against the dense backend in the test suite. Sites
are indexed ``0..N-1``; the center of an odd chain is ``N // 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .lattice import XYParameters

NUMBER_STATE_TOL = 1e-12


class UnsupportedStateError(ValueError):
    """The Zeno site is not in a number eigenstate."""


def one_particle_xy(p: XYParameters, N: int) -> np.ndarray:
    """Tridiagonal ``N x N`` matrix with ``h`` on the diagonal and ``J/2`` beside it."""
    if N < 1:
        raise ValueError("N must be at least 1")
    off = np.full(N - 1, 0.5 * p.J)
    return np.diag(np.full(N, float(p.h))) + np.diag(off, 1) + np.diag(off, -1)


def check_correlation(G: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    G = np.asarray(G, dtype=np.complex128)
    if np.max(np.abs(G - G.conj().T), initial=0.0) > tol:
        raise ValueError("correlation matrix is not Hermitian")
    w = np.linalg.eigvalsh(G)
    if w.size and (w[0] < -tol or w[-1] > 1 + tol):
        raise ValueError(f"correlation eigenvalues outside [0, 1]: [{w[0]}, {w[-1]}]")
    return G


def fermi(eps: np.ndarray, beta: float) -> np.ndarray:
    # 1/(1+e^{x}) written to avoid overflow for large |x|
    x = beta * np.asarray(eps, dtype=float)
    return np.where(x > 0, np.exp(-np.abs(x)) / (1 + np.exp(-np.abs(x))), 1 / (1 + np.exp(-np.abs(x))))


def quasifree_gibbs(hmat: np.ndarray, beta: float) -> np.ndarray:
    """``f(h)`` with the Fermi function ``f(e) = 1/(1 + e^{beta e})``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    eps, W = np.linalg.eigh(hmat)
    return ((W * fermi(eps, beta)) @ W.conj().T).astype(np.complex128)


def propagator(hmat: np.ndarray, t: float) -> np.ndarray:
    """``e^{-ith}``."""
    eps, W = np.linalg.eigh(hmat)
    return (W * np.exp(-1j * t * eps)) @ W.conj().T


def evolve_correlation(G: np.ndarray, hmat: np.ndarray, t: float) -> np.ndarray:
    """``e^{-ith} G e^{ith}``."""
    G = np.asarray(G, dtype=np.complex128)
    if G.shape != hmat.shape:
        raise ValueError("correlation matrix and one-particle Hamiltonian sizes differ")
    U = propagator(hmat, t)
    return U @ G @ U.conj().T


def decoupled_hamiltonian(hmat: np.ndarray, site: int) -> np.ndarray:
    """``h_L (+) 0 (+) h_R``: the row and column of ``site`` zeroed."""
    out = np.array(hmat, dtype=float, copy=True)
    out[site, :] = 0.0
    out[:, site] = 0.0
    return out


def _check_number_state(G: np.ndarray, site: int) -> None:
    occ = G[site, site].real
    coherence = np.delete(G[site], site)
    if min(abs(occ), abs(occ - 1)) > NUMBER_STATE_TOL or np.max(np.abs(coherence), initial=0.0) > NUMBER_STATE_TOL:
        raise UnsupportedStateError(
            f"site {site} is not in a number eigenstate (occupation {occ}); "
            "use the dense backend for general site states"
        )


def zeno_block_evolution(G: np.ndarray, p: XYParameters, N: int, zeno_site: int, t: float) -> np.ndarray:
    """Evolve ``G`` under the Zeno generator for a number-eigenstate site.

    The generator is the chain Hamiltonian with ``zeno_site`` cut out; the
    constant ``h <n_site>`` is dropped since it does not act on correlations.
    """
    if not 0 < zeno_site < N - 1:
        raise ValueError("zeno_site must be an interior site")
    G = np.asarray(G, dtype=np.complex128)
    _check_number_state(G, zeno_site)
    return evolve_correlation(G, decoupled_hamiltonian(one_particle_xy(p, N), zeno_site), t)


def block_norm(G: np.ndarray, site: int) -> float:
    """Frobenius norm of the correlations between sites left and right of ``site``."""
    return float(np.linalg.norm(G[:site, site + 1 :]))


def product_initial_state(p: XYParameters, N: int, beta: float, site: int | None = None) -> np.ndarray:
    """``G_L (+) 0 (+) G_R``: subchain Gibbs states with the center emptied."""
    site = N // 2 if site is None else site
    G = np.zeros((N, N), dtype=np.complex128)
    if site > 0:
        G[:site, :site] = quasifree_gibbs(one_particle_xy(p, site), beta)
    if site < N - 1:
        G[site + 1 :, site + 1 :] = quasifree_gibbs(one_particle_xy(p, N - site - 1), beta)
    return G


@dataclass(frozen=True)
class _Propagation:
    """Diagonal correlations ``G(t)[x, x]`` reusing one eigendecomposition."""

    eps: np.ndarray
    W: np.ndarray
    M: np.ndarray  # W* G0 W

    @classmethod
    def build(cls, hmat: np.ndarray, G0: np.ndarray) -> "_Propagation":
        eps, W = np.linalg.eigh(hmat)
        return cls(eps, W, W.conj().T @ G0 @ W)

    def occupations(self, t: float, sites: np.ndarray) -> np.ndarray:
        rows = self.W[sites] * np.exp(-1j * t * self.eps)[None, :]
        # G(t)[x,x] = sum_kl rows[x,k] M[k,l] conj(rows[x,l])
        return np.einsum("xk,kl,xl->x", rows, self.M, rows.conj()).real


def recurrence_horizon(N: int, J: float) -> float:
    """Ballistic estimate ``N / (2|J|)`` of the first finite-size recurrence."""
    return float("inf") if J == 0 else N / (2 * abs(J))


def relaxation_experiment(
    p: XYParameters,
    N: int,
    beta: float,
    zeno: bool,
    times,
    sites=None,
) -> Trajectory:
    """Occupations ``<a*_x a_x>(t)`` after releasing the emptied center site.

    With ``zeno=False`` the product state evolves under the full chain and
    the reference is the global Gibbs value; with ``zeno=True`` it evolves
    under the decoupled blocks and the reference is the block Gibbs value
    (which is the initial state itself). ``values`` has one column per
    entry of ``sites`` (default: the center).
    """
    if N % 2 != 1 or N < 3:
        raise ValueError("relaxation experiment needs an odd chain with N >= 3")
    times = np.asarray(times, dtype=float)
    center = N // 2
    sites = np.atleast_1d(np.array([center] if sites is None else sites, dtype=int))
    hmat = one_particle_xy(p, N)
    G0 = product_initial_state(p, N, beta, center)
    if zeno:
        generator = decoupled_hamiltonian(hmat, center)
        reference = G0
    else:
        generator = hmat
        reference = quasifree_gibbs(hmat, beta)
    prop = _Propagation.build(generator, G0)
    values = np.array([prop.occupations(t, sites) for t in times])
    horizon = recurrence_horizon(N, p.J)
    meta = {
        "N": N,
        "beta": beta,
        "zeno": zeno,
        "sites": sites.tolist(),
        "reference": np.diag(reference).real[sites],
        "recurrence_horizon": horizon,
        "beyond_horizon": bool(np.any(times > horizon)),
    }
    return Trajectory(times, values, meta)
