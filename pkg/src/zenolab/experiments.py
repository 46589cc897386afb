"""Experiment definitions for the config-driven runner.

Each experiment splits into independent tasks (one per grid point) so the
runner can fan them out to worker processes; rows are reassembled by task
index. Random draws use a stream derived from ``(seed, task index)``, so
results do not depend on the number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gibbs, gns, quasifree, zeno
from .config import ConfigError, ExperimentConfig
from .dynamics import observable_trajectory
from .lattice import (
    ChainGeometry,
    build_site_projection,
    build_xy_hamiltonian,
    number,
    xy_zeno_hamiltonians,
)
from .linalg import range_basis, tensor, trace_distance

COLUMNS = {
    "zeno-converge": ("t", "n", "cauchy_defect", "generator_defect", "bound"),
    "azc": ("tau", "ratio", "constant"),
    "continuous": ("K", "t", "deviation"),
    "gibbs-product": ("beta", "trace_distance", "left_dim", "right_dim"),
    "kms": ("pair_index", "residual"),
    "rw-entropy": ("trial", "relative_entropy", "bound", "gap"),
    "rte-dense": ("t", "site", "value", "reference_value"),
    "rte-quasifree": ("t", "site", "value", "reference_value"),
    "complex-zeno": ("n", "m", "defect"),
}


def task_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def model_operators(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian and Zeno projection of the configured model."""
    if cfg.model.preset == "two-level":
        return zeno.two_level_model()
    g = cfg.model.geometry
    H = build_xy_hamiltonian(cfg.model.params, g)
    E = build_site_projection(cfg.zeno.state, cfg.zeno.site, g)
    return H, E


def _t_max(cfg: ExperimentConfig) -> float:
    exp = cfg.experiment
    if exp.t_max is not None:
        return exp.t_max
    return max(abs(t) for t in exp.t) / min(exp.n)


@dataclass(frozen=True)
class Plan:
    tasks: list
    run: Callable[[ExperimentConfig, int, object], list[tuple]]


# -- zeno-converge ----------------------------------------------------------


def _converge_task(cfg, index, arg):
    t, n, constant = arg
    H, E = model_operators(cfg)
    return [
        (
            t,
            n,
            zeno.cauchy_defect(H, E, t, n, 2 * n),
            zeno.generator_defect(H, E, t, n),
            zeno.cauchy_bound(constant, t, n),
        )
    ]


def _plan_converge(cfg):
    H, E = model_operators(cfg)
    constant = zeno.azc_constant(H, E, _t_max(cfg), cfg.experiment.levels).constant
    return Plan([(t, n, constant) for t in cfg.experiment.t for n in cfg.experiment.n], _converge_task)


# -- azc --------------------------------------------------------------------


def _azc_task(cfg, index, arg):
    H, E = model_operators(cfg)
    est = zeno.azc_constant(H, E, _t_max(cfg), cfg.experiment.levels)
    return [(float(tau), float(r), est.constant) for tau, r in zip(est.grid, est.ratios)]


# -- continuous -------------------------------------------------------------


def _continuous_task(cfg, index, arg):
    K, t = arg
    H, E = model_operators(cfg)
    return [(K, t, zeno.continuous_deviation(H, E, K, t))]


# -- gibbs-product ----------------------------------------------------------


def _product_task(cfg, index, beta):
    p, g, psi, site = cfg.model.params, cfg.model.geometry, cfg.zeno.state, cfg.zeno.site
    H = build_xy_hamiltonian(p, g)
    E = build_site_projection(psi, site, g)
    rho_E = gibbs.zeno_gibbs_state(H, beta, E)
    H_minus, _, H_plus = xy_zeno_hamiltonians(p, psi, g, site)
    product = tensor(gibbs.gibbs_state(H_minus, beta), psi.projector, gibbs.gibbs_state(H_plus, beta))
    left = 2 ** (site - g.lo)
    right = 2 ** (g.hi - site)
    # empty sides carry a 1x1 factor, which tensor() absorbs
    return [(beta, trace_distance(rho_E, product), left, right)]


# -- kms --------------------------------------------------------------------


def _kms_task(cfg, index, arg):
    H, E = model_operators(cfg)
    beta = cfg.model.beta
    rng = task_rng(cfg.seed, index)
    d = H.shape[0]
    A, B = gibbs.random_operator(d, rng), gibbs.random_operator(d, rng)
    if cfg.experiment.target == "zeno":
        rho = gibbs.zeno_gibbs_state(H, beta, E)
        r = gibbs.kms_residual(rho, E @ H @ E, beta, E @ A @ E, E @ B @ E, support=E)
    else:
        r = gibbs.kms_residual(gibbs.gibbs_state(H, beta), H, beta, A, B)
    return [(index, r)]


# -- rw-entropy -------------------------------------------------------------


def _rw_task(cfg, index, arg):
    H, E = model_operators(cfg)
    omega = gibbs.gibbs_state(H, cfg.model.beta)
    rng = task_rng(cfg.seed, index)
    B = range_basis(E)
    sigma = B @ gibbs.random_density(B.shape[1], rng) @ B.conj().T
    rep = gibbs.raggio_werner_check(omega, E, sigma)
    return [(index, rep.relative_entropy, rep.bound, rep.equality_gap)]


# -- return to equilibrium --------------------------------------------------


def product_state(cfg: ExperimentConfig, beta: float) -> np.ndarray:
    """Subchain Gibbs states around the frozen site: ``G(H_L) (x) rho_0 (x) G(H_R)``."""
    p, g, psi, site = cfg.model.params, cfg.model.geometry, cfg.zeno.state, cfg.zeno.site
    left = ChainGeometry(g.lo, site - 1)
    right = ChainGeometry(site + 1, g.hi)
    return tensor(
        gibbs.gibbs_state(build_xy_hamiltonian(p, left), beta),
        psi.projector,
        gibbs.gibbs_state(build_xy_hamiltonian(p, right), beta),
    )


def _rte_dense_task(cfg, index, site):
    p, g = cfg.model.params, cfg.model.geometry
    if site not in g:
        raise ConfigError(f"observable site {site} outside the chain")
    beta = cfg.model.beta
    H = build_xy_hamiltonian(p, g)
    A = number(site, g)
    initial = product_state(cfg, beta)
    if cfg.experiment.zeno:
        E = build_site_projection(cfg.zeno.state, cfg.zeno.site, g)
        generator = E @ H @ E
        reference = np.trace(gibbs.zeno_gibbs_state(H, beta, E) @ A).real
    else:
        generator = H
        reference = np.trace(gibbs.gibbs_state(H, beta) @ A).real
    traj = observable_trajectory(initial, generator, A, cfg.experiment.times)
    return [(float(t), site, float(np.real(v)), float(reference)) for t, v in zip(traj.times, traj.values)]


def _rte_quasifree_task(cfg, index, arg):
    exp = cfg.experiment
    N = exp.N
    center = N // 2
    offsets = list(exp.sites)
    sites = [center + s for s in offsets]
    if any(not 0 <= s < N for s in sites):
        raise ConfigError("site offsets fall outside the chain")
    traj = quasifree.relaxation_experiment(cfg.model.params, N, cfg.model.beta, exp.zeno, exp.times, sites)
    ref = traj.metadata["reference"]
    return [
        (float(t), off, float(traj.values[k, j]), float(ref[j]))
        for k, t in enumerate(traj.times)
        for j, off in enumerate(offsets)
    ]


# -- complex-zeno -----------------------------------------------------------


def _complex_task(cfg, index, n):
    H, E = model_operators(cfg)
    beta = cfg.model.beta
    space = gns.gns_construct(gibbs.gibbs_state(H, beta), H)
    # one observable shared by every grid point
    A = gibbs.random_operator(H.shape[0], task_rng(cfg.seed, 0))
    t = cfg.experiment.t[0]
    return [(n, 2 * n, gns.complex_zeno_cauchy(space, E, A, t, beta, n, 2 * n))]


def plan(cfg: ExperimentConfig) -> Plan:
    exp = cfg.experiment
    name = exp.name
    if name == "zeno-converge":
        return _plan_converge(cfg)
    if name == "azc":
        return Plan([None], _azc_task)
    if name == "continuous":
        return Plan([(K, t) for K in exp.K for t in exp.t], _continuous_task)
    if name == "gibbs-product":
        return Plan(list(exp.betas or (cfg.model.beta,)), _product_task)
    if name == "kms":
        return Plan([None] * exp.pairs, _kms_task)
    if name == "rw-entropy":
        return Plan([None] * exp.trials, _rw_task)
    if name == "rte-dense":
        return Plan(list(exp.sites), _rte_dense_task)
    if name == "rte-quasifree":
        return Plan([None], _rte_quasifree_task)
    if name == "complex-zeno":
        return Plan(list(exp.n), _complex_task)
    raise ValueError(f"unknown experiment {name!r}")
