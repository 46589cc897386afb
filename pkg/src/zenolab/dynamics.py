"""Dense-backend dynamical experiments.

* return to equilibrium of a locally perturbed state under the full dynamics,
* blocking of that relaxation by repeated projective measurement,
* relaxation toward the Zeno-Gibbs state under the compressed dynamics.

Infinite-time limits are replaced by windowed time averages; every
:class:`Trajectory` records its window and a finite-size recurrence horizon.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .gibbs import zeno_gibbs_state
from .linalg import dagger, eigh, spectral_exp

SURVIVAL_FLOOR = 1e-14


class SurvivalUnderflowError(ArithmeticError):
    def __init__(self, step: int, weight: float):
        super().__init__(f"survival weight {weight:.3e} below {SURVIVAL_FLOOR} at step {step}")
        self.step = step
        self.weight = weight


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if self.times.ndim != 1 or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if len(self.values) != len(self.times):
            raise ValueError("one value row per time point required")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trajectory contains non-finite values")

    def window_average(self, start: float, stop: float | None = None) -> np.ndarray:
        stop = self.times[-1] if stop is None else stop
        mask = (self.times >= start) & (self.times <= stop)
        if not np.any(mask):
            raise ValueError(f"no samples in window [{start}, {stop}]")
        return self.values[mask].mean(axis=0)

    def second_half_average(self) -> np.ndarray:
        return self.window_average(0.5 * (self.times[0] + self.times[-1]))


def _heisenberg_series(initial, H, A, times):
    w, V = eigh(H)
    # Tr(rho U A U*) with U = V e^{itw} V*: work in the eigenbasis of H
    rho = dagger(V) @ initial @ V
    a = dagger(V) @ A @ V
    out = np.empty(len(times), dtype=np.complex128)
    for k, t in enumerate(times):
        phase = np.exp(1j * t * w)
        # (U A U*)_{ij} = e^{itw_i} a_ij e^{-itw_j}
        out[k] = np.sum(rho.T * (phase[:, None] * a * phase.conj()[None, :]))
    return out


def _real_if_close(values: np.ndarray) -> np.ndarray:
    if np.max(np.abs(values.imag), initial=0.0) < 1e-12:
        return values.real
    return values


def observable_trajectory(initial: np.ndarray, H: np.ndarray, A: np.ndarray, times) -> Trajectory:
    """``Tr(initial U(t) A U(t)*)`` with ``U(t) = exp(itH)``."""
    times = np.asarray(times, dtype=float)
    initial = np.asarray(initial, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    if initial.shape != H.shape or np.shape(A) != H.shape:
        raise ValueError("state, Hamiltonian and observable dimensions differ")
    values = _real_if_close(_heisenberg_series(initial, H, np.asarray(A, dtype=np.complex128), times))
    return Trajectory(times, values, {"window": (float(times[0]), float(times[-1]))})


def zeno_blocked_trajectory(
    initial: np.ndarray, H: np.ndarray, E: np.ndarray, t: float, n: int, A: np.ndarray
) -> Trajectory:
    """Evolve for ``t`` with ``n`` equally spaced selective measurements of ``E``.

    After each step the state is ``V rho V* / w_k`` with ``V = E U(t/n) E``
    and survival weight ``w_k = Tr(V rho V*)``. ``values[k] = Tr(rho_k A)``
    for ``k = 0..n``; the weights and their product go to the metadata.
    """
    initial = np.asarray(initial, dtype=np.complex128)
    E = np.asarray(E, dtype=np.complex128)
    if np.max(np.abs(E @ initial @ E - initial)) > 1e-10:
        raise ValueError("initial state does not live in the range of E")
    V = E @ spectral_exp(H, t / n) @ E
    Vd = dagger(V)
    rho = initial
    values = [np.trace(rho @ A)]
    weights = []
    for k in range(1, n + 1):
        rho = V @ rho @ Vd
        w = float(np.trace(rho).real)
        if w < SURVIVAL_FLOOR:
            raise SurvivalUnderflowError(k, w)
        rho = rho / w
        weights.append(w)
        values.append(np.trace(rho @ A))
    times = t * np.arange(n + 1) / n
    weights = np.array(weights)
    meta = {
        "weights": weights,
        "survival": float(np.prod(weights)),
        "final_state": rho,
        "steps": n,
    }
    return Trajectory(times, _real_if_close(np.array(values)), meta)


def zeno_relaxation(
    initial: np.ndarray, H: np.ndarray, E: np.ndarray, beta: float, A_E: np.ndarray, times
) -> Trajectory:
    """Evolve ``initial`` under ``exp(it EHE)`` and compare with the Zeno-Gibbs value of ``A_E``.

    Metadata: ``reference`` (Zeno-Gibbs expectation), ``initial_distance``
    and ``late_distance`` (mean distance over the second half of the window).
    """
    initial = np.asarray(initial, dtype=np.complex128)
    E = np.asarray(E, dtype=np.complex128)
    if np.max(np.abs(E @ initial @ E - initial)) > 1e-10:
        raise ValueError("initial state is not supported in the range of E")
    EHE = E @ H @ E
    traj = observable_trajectory(initial, EHE, A_E, times)
    reference = complex(np.trace(zeno_gibbs_state(H, beta, E) @ A_E))
    reference = reference.real if abs(reference.imag) < 1e-12 else reference
    dist = np.abs(traj.values - reference)
    half = traj.times >= 0.5 * (traj.times[0] + traj.times[-1])
    traj.metadata.update(
        reference=reference,
        initial_distance=float(dist[0]),
        late_distance=float(dist[half].mean()),
    )
    return traj


def energy_series(initial: np.ndarray, H: np.ndarray, times) -> Trajectory:
    return observable_trajectory(initial, H, H, times)
