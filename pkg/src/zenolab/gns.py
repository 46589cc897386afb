"""Standard-form (GNS) representation of a faithful finite-dimensional state.

Vectors are matrices with the Hilbert-Schmidt inner product ``<X, Y> = Tr(X* Y)``,
the cyclic vector is ``Omega = rho^{1/2}``, observables act by left
multiplication, and the dynamics acts as ``X -> e^{i z H} X e^{-i z H}``.
For complex ``z`` this map is not unitary but is exact on every vector,
since in finite dimension every vector is entire analytic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import dagger, eigh, matrix_function, operator_norm

FAITHFUL_TOL = 1e-14


@dataclass(frozen=True)
class GnsSpace:
    rho: np.ndarray
    omega_vector: np.ndarray
    H: np.ndarray
    spectrum: tuple[np.ndarray, np.ndarray]

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def inner(self, X: np.ndarray, Y: np.ndarray) -> complex:
        return complex(np.vdot(X, Y))

    def norm(self, X: np.ndarray) -> float:
        return float(np.linalg.norm(X))

    def vector(self, A: np.ndarray) -> np.ndarray:
        """``A Omega``."""
        return np.asarray(A) @ self.omega_vector

    def expectation(self, A: np.ndarray) -> complex:
        return self.inner(self.omega_vector, self.vector(A))

    def propagators(self, z: complex) -> tuple[np.ndarray, np.ndarray]:
        """``(e^{i z H}, e^{-i z H})``."""
        w, V = self.spectrum
        return (V * np.exp(1j * z * w)) @ dagger(V), (V * np.exp(-1j * z * w)) @ dagger(V)

    def evolve(self, X: np.ndarray, z: complex) -> np.ndarray:
        left, right = self.propagators(z)
        return left @ X @ right


def gns_construct(rho: np.ndarray, H: np.ndarray, tol: float = 1e-10) -> GnsSpace:
    """Build the standard form of ``rho``; ``rho`` must be faithful and commute with ``H``."""
    rho = np.asarray(rho, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    w = np.linalg.eigvalsh(rho)
    if w[0] <= FAITHFUL_TOL:
        raise ValueError(f"state is not faithful (smallest eigenvalue {w[0]:.3e}); restrict to its support")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("state is not normalized")
    if operator_norm(rho @ H - H @ rho) > tol:
        raise ValueError("state is not stationary under H")
    omega = matrix_function(rho, np.sqrt)
    return GnsSpace(rho, omega, H, eigh(H))


def vector_leakage(space: GnsSpace, E: np.ndarray, A: np.ndarray, z: complex) -> float:
    """``||E_perp U(z) E A Omega||``."""
    Eperp = np.eye(space.dim) - E
    return space.norm(Eperp @ space.evolve(E @ space.vector(A), z))


@dataclass(frozen=True)
class AzcCheck:
    passed: bool
    ratio: float
    measured: float


def vector_azc_check(space: GnsSpace, E: np.ndarray, A: np.ndarray, z: complex, C: float, r0: float) -> AzcCheck:
    """Test ``||E_perp U(z) E A Omega|| <= C ||A Omega|| |z|`` at one complex time.

    ``measured`` is ``||E_perp U(z) E A Omega|| / (||A Omega|| |z|)`` and
    ``ratio`` is ``measured / C``; the check passes when ``ratio <= 1``.
    """
    z = complex(z)
    if z.imag < 0:
        raise ValueError("the Zeno condition is tested for Im z >= 0 only")
    if not 0 < abs(z) < r0:
        raise ValueError(f"|z| = {abs(z)} must lie in (0, r0 = {r0})")
    scale = space.norm(space.vector(A)) * abs(z)
    leak = vector_leakage(space, E, A, z)
    measured = leak / scale if scale > 0 else 0.0
    if C > 0:
        ratio = measured / C
    else:
        ratio = 0.0 if measured == 0 else float("inf")
    return AzcCheck(ratio <= 1.0, ratio, measured)


def zeno_vector(space: GnsSpace, E: np.ndarray, X: np.ndarray, z: complex, n: int) -> np.ndarray:
    """``[E U(z/n) E]^n X`` in the GNS space."""
    if n < 1:
        raise ValueError("n must be positive")
    left, right = space.propagators(complex(z) / n)
    step = E @ left @ E
    out = np.asarray(X, dtype=np.complex128)
    for _ in range(n):
        out = step @ out @ right
    return out


def complex_zeno_cauchy(space: GnsSpace, E: np.ndarray, A: np.ndarray, t: float, beta: float, n: int, m: int) -> float:
    """``||(F_n(t + i beta/2) - F_m(t + i beta/2)) A Omega||``."""
    if not m > n >= 1:
        raise ValueError(f"need m > n >= 1, got n={n}, m={m}")
    z = complex(t, beta / 2.0)
    X = space.vector(A)
    return space.norm(zeno_vector(space, E, X, z, n) - zeno_vector(space, E, X, z, m))


def azc_sup(space: GnsSpace, E: np.ndarray, A: np.ndarray, r0: float, levels: int) -> float:
    """Largest measured ratio over ``|z| = r0 2^-k``, ``arg z in {0, pi/4, pi/2}``."""
    best = 0.0
    norm = space.norm(space.vector(A))
    for k in range(levels):
        for phase in (0.0, np.pi / 4, np.pi / 2):
            z = r0 * 2.0**-k * np.exp(1j * phase)
            best = max(best, vector_leakage(space, E, A, z) / (norm * abs(z)))
    return best
