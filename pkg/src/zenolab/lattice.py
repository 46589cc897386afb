"""One-dimensional lattice models on dense Hilbert spaces.

Per-site basis: index 0 is the empty state, index 1 the occupied state.
Jordan-Wigner fermions are

    a_x = (prod_{y < x} Z_y) a_x^{loc},    Z = diag(1, -1),  a^{loc} = [[0, 1], [0, 0]],

so the string runs over sites strictly to the left of ``x``. Combined with
the tensor convention of :mod:`zenolab.linalg` (smallest label is the most
significant factor) this makes every nearest-neighbour hopping term strictly
local to its bond.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .linalg import STRUCT_TOL, check_hermitian, dagger, tensor

LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)
RAISE = LOWER.T.copy()
NUMBER = np.diag([0.0, 1.0]).astype(np.complex128)
PARITY = np.diag([1.0, -1.0]).astype(np.complex128)
ID2 = np.eye(2, dtype=np.complex128)

DENSE_MAX_SITES = 14


class DenseSizeError(ValueError):
    """Chain too long for the dense backend."""


@dataclass(frozen=True)
class ChainGeometry:
    """The interval of sites ``lo..hi`` (inclusive)."""

    lo: int
    hi: int
    local_dim: int = 2

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty chain [{self.lo}, {self.hi}]")
        if self.local_dim < 1:
            raise ValueError("local_dim must be positive")

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(range(self.lo, self.hi + 1))

    @property
    def n_sites(self) -> int:
        return self.hi - self.lo + 1

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    def __contains__(self, site) -> bool:
        return isinstance(site, (int, np.integer)) and self.lo <= site <= self.hi

    def __iter__(self):
        return iter(self.sites)

    def __len__(self):
        return self.n_sites

    def index(self, site: int) -> int:
        if site not in self:
            raise ValueError(f"site {site} outside chain [{self.lo}, {self.hi}]")
        return site - self.lo

    def covers(self, sites: Iterable[int]) -> bool:
        return all(s in self for s in sites)


@dataclass(frozen=True)
class XYParameters:
    J: float = 1.0
    h: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(self.J) and np.isfinite(self.h)):
            raise ValueError("X-Y parameters must be finite")


@dataclass(frozen=True)
class SitePureState:
    """A normalized vector in a site space (or a block of adjacent sites)."""

    amplitudes: tuple[complex, ...]

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=np.complex128)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("amplitudes must be a vector of length >= 2")
        n_sites = np.log2(v.size)
        if n_sites != int(n_sites):
            raise ValueError("amplitude vector length must be a power of two")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise ValueError(f"amplitudes not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in v))

    @classmethod
    def normalized(cls, amplitudes) -> "SitePureState":
        v = np.asarray(amplitudes, dtype=np.complex128)
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=np.complex128)

    @property
    def n_sites(self) -> int:
        return int(np.log2(len(self.amplitudes)))

    @property
    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())

    def expect(self, op: np.ndarray) -> complex:
        v = self.vector
        return complex(v.conj() @ op @ v)


EMPTY = SitePureState((1.0, 0.0))
OCCUPIED = SitePureState((0.0, 1.0))


def _check_dense(g: ChainGeometry, max_sites: int = DENSE_MAX_SITES) -> None:
    if g.n_sites > max_sites:
        raise DenseSizeError(
            f"{g.n_sites} sites exceed the dense cap of {max_sites}; "
            "use zenolab.quasifree for long chains"
        )


@lru_cache(maxsize=256)
def _annihilation(lo: int, hi: int, site: int) -> np.ndarray:
    g = ChainGeometry(lo, hi)
    k = g.index(site)
    factors = [PARITY] * k + [LOWER] + [ID2] * (g.n_sites - k - 1)
    out = tensor(*factors)
    out.setflags(write=False)
    return out


def annihilation(site: int, g: ChainGeometry) -> np.ndarray:
    """Jordan-Wigner annihilation operator ``a_site`` on the chain."""
    _check_dense(g)
    return _annihilation(g.lo, g.hi, site).copy()


def creation(site: int, g: ChainGeometry) -> np.ndarray:
    return dagger(annihilation(site, g))


def number(site: int, g: ChainGeometry) -> np.ndarray:
    a = annihilation(site, g)
    return dagger(a) @ a


def embed(op: np.ndarray, support: Sequence[int], g: ChainGeometry) -> np.ndarray:
    """Place an operator on ``support`` (in increasing site order) into the chain."""
    support = list(support)
    if sorted(support) != support or len(set(support)) != len(support):
        raise ValueError("support must be strictly increasing")
    if not g.covers(support):
        raise ValueError(f"support {support} not inside [{g.lo}, {g.hi}]")
    _check_dense(g)
    d = g.local_dim
    k = len(support)
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (d**k, d**k):
        raise ValueError(f"operator shape {op.shape} does not fit {k} sites")
    rest = [s for s in g.sites if s not in support]
    full = np.kron(op, np.eye(d ** len(rest), dtype=np.complex128))
    # axes currently ordered support + rest; move them to chain order
    order = support + rest
    n = g.n_sites
    T = full.reshape([d] * (2 * n))
    pos = [order.index(s) for s in g.sites]
    T = T.transpose(pos + [n + p for p in pos])
    return T.reshape(g.dim, g.dim)


# --------------------------------------------------------------------------
# X-Y model


def build_xy_hamiltonian(
    p: XYParameters, g: ChainGeometry, max_sites: int = DENSE_MAX_SITES
) -> np.ndarray:
    """``(J/2) sum_x (a*_x a_{x+1} + h.c.) + h sum_x a*_x a_x`` on the chain."""
    if g.local_dim != 2:
        raise ValueError("the X-Y chain needs local_dim = 2")
    _check_dense(g, max_sites)
    H = np.zeros((g.dim, g.dim), dtype=np.complex128)
    for x in g.sites:
        a = _annihilation(g.lo, g.hi, x)
        H += p.h * dagger(a) @ a
        if x < g.hi:
            b = _annihilation(g.lo, g.hi, x + 1)
            hop = dagger(a) @ b
            H += 0.5 * p.J * (hop + dagger(hop))
    return H


def build_p0(p: XYParameters, g: ChainGeometry, site: int = 0) -> np.ndarray:
    """Coupling of ``site`` to the rest of the chain.

    Returns ``(J/2)(a*_{-1}a_0 + a*_0 a_1 + h.c.) + h a*_0 a_0`` (relative to
    ``site``), the operator for which ``H[lo,hi] = H[lo,site-1] + P0 + H[site+1,hi]``.
    The perturbed generator that isolates the site is ``H - P0``.
    """
    for s in (site - 1, site, site + 1):
        if s not in g:
            raise ValueError(f"chain [{g.lo}, {g.hi}] lacks site {s} needed by P0")
    a = {s: annihilation(s, g) for s in (site - 1, site, site + 1)}
    ad = {s: dagger(a[s]) for s in a}
    bonds = (
        ad[site - 1] @ a[site]
        + ad[site] @ a[site + 1]
        + ad[site] @ a[site - 1]
        + ad[site + 1] @ a[site]
    )
    return 0.5 * p.J * bonds + p.h * ad[site] @ a[site]


def xy_on(p: XYParameters, sites: Iterable[int], g: ChainGeometry) -> np.ndarray:
    """X-Y Hamiltonian of the sub-interval ``sites`` embedded on ``g``.

    An empty ``sites`` gives the zero operator.
    """
    sites = sorted(sites)
    if not sites:
        return np.zeros((g.dim, g.dim), dtype=np.complex128)
    if sites != list(range(sites[0], sites[-1] + 1)):
        raise ValueError("sites must form an interval")
    sub = ChainGeometry(sites[0], sites[-1])
    return embed(build_xy_hamiltonian(p, sub), sites, g)


# --------------------------------------------------------------------------
# generic finite-range interactions


@dataclass(frozen=True)
class Interaction:
    """Map from finite site subsets to Hermitian local terms.

    ``terms[X]`` acts on the sites of ``X`` in increasing order. ``range_bound``
    limits the diameter ``max(X) - min(X)``.
    """

    terms: Mapping[frozenset, np.ndarray] = field(default_factory=dict)
    range_bound: int = 1

    def __post_init__(self):
        checked = {}
        for X, op in self.terms.items():
            X = frozenset(X)
            if not X:
                raise ValueError("interaction term with empty support")
            if max(X) - min(X) > self.range_bound:
                raise ValueError(f"term {sorted(X)} exceeds range bound {self.range_bound}")
            checked[X] = check_hermitian(op)
        object.__setattr__(self, "terms", checked)

    def supported_in(self, region: Iterable[int]) -> list[frozenset]:
        region = set(region)
        return sorted((X for X in self.terms if X <= region), key=lambda X: sorted(X))


def xy_interaction(p: XYParameters, g: ChainGeometry) -> Interaction:
    """Single-site and bond terms of the X-Y chain on ``g``."""
    bond = build_xy_hamiltonian(XYParameters(p.J, 0.0), ChainGeometry(0, 1))
    terms = {frozenset({x}): p.h * NUMBER for x in g.sites}
    for x in g.sites[:-1]:
        terms[frozenset({x, x + 1})] = bond
    return Interaction(terms, range_bound=1)


def _sum_terms(phi: Interaction, keys: Iterable[frozenset], ambient: ChainGeometry) -> np.ndarray:
    H = np.zeros((ambient.dim, ambient.dim), dtype=np.complex128)
    for X in keys:
        H += embed(phi.terms[X], sorted(X), ambient)
    return H


def _region(region) -> set:
    return set(region.sites) if isinstance(region, ChainGeometry) else set(region)


def local_hamiltonian(phi: Interaction, region, ambient: ChainGeometry) -> np.ndarray:
    """Sum of all terms supported inside ``region``, embedded on ``ambient``."""
    region = _region(region)
    if not ambient.covers(region):
        raise ValueError("region not inside the ambient chain")
    return _sum_terms(phi, phi.supported_in(region), ambient)


def surface_terms(phi: Interaction, inner, outer) -> list[frozenset]:
    inner, outer = _region(inner), _region(outer)
    if not inner <= outer:
        raise ValueError("inner region is not contained in the outer region")
    rest = outer - inner
    return sorted(
        (X for X in phi.terms if X <= outer and X & rest and X & inner),
        key=lambda X: sorted(X),
    )


def surface_energy(phi: Interaction, inner, outer, ambient: ChainGeometry | None = None) -> np.ndarray:
    """Terms inside ``outer`` that meet both ``inner`` and ``outer \\ inner``."""
    if ambient is None:
        if not isinstance(outer, ChainGeometry):
            raise ValueError("ambient chain required when outer is a plain site set")
        ambient = outer
    return _sum_terms(phi, surface_terms(phi, inner, outer), ambient)


def removal_perturbation(phi: Interaction, inner, outer, ambient: ChainGeometry | None = None) -> np.ndarray:
    """``H(inner) + W(inner; outer)``: everything in ``outer`` touching ``inner``."""
    if ambient is None:
        if not isinstance(outer, ChainGeometry):
            raise ValueError("ambient chain required when outer is a plain site set")
        ambient = outer
    return local_hamiltonian(phi, inner, ambient) + surface_energy(phi, inner, outer, ambient)


# --------------------------------------------------------------------------
# Zeno projections and averaged Hamiltonians


def build_site_projection(psi: SitePureState, site: int, g: ChainGeometry) -> np.ndarray:
    """``1 (x) |psi><psi| (x) 1`` with ``psi`` starting at ``site``.

    A multi-site ``psi`` occupies ``site, site+1, ...``.
    """
    support = list(range(site, site + psi.n_sites))
    if not g.covers(support):
        raise ValueError(f"sites {support} outside chain [{g.lo}, {g.hi}]")
    return embed(psi.projector, support, g)


def _split_site(H: np.ndarray, site: int, g: ChainGeometry) -> np.ndarray:
    """Blocks ``H[i, j]`` on the reduced chain with ``H = sum_ij H[i,j] (x) |i><j|``."""
    n = g.n_sites
    k = g.index(site)
    T = np.asarray(H, dtype=np.complex128).reshape([2] * (2 * n))
    # bring the site's row/col axes to the front
    rows = [k] + [i for i in range(n) if i != k]
    T = T.transpose(rows + [n + r for r in rows])
    d = 2 ** (n - 1)
    T = T.reshape(2, d, 2, d)
    return T.transpose(0, 2, 1, 3)  # (i, j, reduced_row, reduced_col)


def insert_site(reduced: np.ndarray, site_op: np.ndarray, site: int, g: ChainGeometry) -> np.ndarray:
    """Inverse of the site split: ``reduced (x) site_op`` with ``site_op`` in its chain slot."""
    n = g.n_sites
    k = g.index(site)
    full = np.kron(site_op, reduced)  # site first, then the other sites in order
    T = full.reshape([2] * (2 * n))
    order = [k] + [i for i in range(n) if i != k]
    pos = [order.index(i) for i in range(n)]
    return T.transpose(pos + [n + q for q in pos]).reshape(g.dim, g.dim)


def averaged_hamiltonian(
    H: np.ndarray,
    psi: SitePureState,
    site: int,
    g: ChainGeometry,
    local_term: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Average ``H`` over the frozen state ``psi`` at ``site``.

    Returns ``(averaged, scalar)`` where ``averaged`` acts on the chain with
    ``site`` removed, such that ``insert_site(averaged, P_psi) + scalar * E``
    equals ``E H E``. ``local_term`` is the part of ``H`` supported on the
    site alone; its expectation becomes ``scalar`` and is removed from
    ``averaged``. Without it the scalar is 0 and ``averaged`` keeps the
    constant.
    """
    if psi.n_sites != 1:
        raise ValueError("averaged_hamiltonian handles single-site states")
    g.index(site)
    blocks = _split_site(H, site, g)
    v = psi.vector
    weights = np.outer(v.conj(), v)  # <psi|i><j|psi>
    averaged = np.einsum("ij,ijab->ab", weights, blocks)
    scalar = 0.0
    if local_term is not None:
        scalar = float(psi.expect(local_term).real)
        averaged = averaged - scalar * np.eye(averaged.shape[0])
    return averaged, scalar


def xy_zeno_hamiltonians(
    p: XYParameters, psi: SitePureState, g: ChainGeometry, site: int = 0
) -> tuple[np.ndarray, float, np.ndarray]:
    """Closed forms of the left, scalar and right parts of ``E H E`` for the X-Y chain.

    With ``m = <psi|a|psi>``:

        H_+ = (J/2)(conj(m) a_{s+1} + m a*_{s+1}) + H[s+1, hi]
        H_- = (J/2)(m a*_{s-1} + conj(m) a_{s-1}) + H[lo, s-1]
        scalar = h <psi|a* a|psi>

    ``H_-`` and ``H_+`` act on their own subchains; the boundary operators
    are the local site matrices (no Jordan-Wigner string). Either side may
    be empty, in which case a 1x1 zero is returned for it.
    """
    if site not in g:
        raise ValueError(f"site {site} outside chain")
    m = psi.expect(LOWER)
    scalar = p.h * float(psi.expect(NUMBER).real)

    def side(lo, hi, boundary):
        if lo > hi:
            return np.zeros((1, 1), dtype=np.complex128)
        sub = ChainGeometry(lo, hi)
        Hs = build_xy_hamiltonian(p, sub)
        edge = 0.5 * p.J * (np.conj(m) * LOWER + m * RAISE)
        return Hs + embed(edge, [boundary], sub)

    H_minus = side(g.lo, site - 1, site - 1)
    H_plus = side(site + 1, g.hi, site + 1)
    return H_minus, scalar, H_plus
