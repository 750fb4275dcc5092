"""Hierarchy construction for the composite environment.

The environment seen by the two-level system is a set of exponentially
correlated influences: up to three independent Ornstein-Uhlenbeck processes
(one modulating the level splitting, two modulating the transverse coupling)
and a bosonic bath with a Lorentzian spectral density in its high-temperature
form.  Each influence contributes one hierarchy channel (the bath two, one
per branch of its correlation function), and every channel is described by
the same triple of coefficients:

* ``alpha``   - decay rate of the channel memory, enters as m_k * alpha_k on
  the diagonal of the generator,
* ``phi0``    - superoperator coupling an auxiliary matrix to its neighbour
  one level deeper,
* ``phi1``    - superoperator coupling to the neighbour one level shallower,
  applied with weight m_k.

Auxiliary density matrices are labelled by a multi-index m over the enabled
channels and truncated at total depth L.  The physical state is the m = 0
element; everything else is bookkeeping for the environment memory.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from .errors import ConfigError, HierarchyTooLargeError
from .operators import (
    J0,
    JMINUS,
    JPLUS,
    CouplingMode,
    commutator_super,
    coupling_ops,
    left_super,
    right_super,
    unvec,
    vec,
)

#: Environment variable capping the number of hierarchy indices.
MAX_INDICES_ENV = "HEOM_MAX_INDICES"
DEFAULT_MAX_INDICES = 400_000


class HighTemperatureValidityWarning(UserWarning):
    """Raised when beta * gamma_b leaves the regime the bath model assumes."""


def index_budget(override: int | None = None) -> int:
    """Maximum number of hierarchy indices allowed for one generator."""
    if override is not None:
        return int(override)
    raw = os.environ.get(MAX_INDICES_ENV)
    if raw is None:
        return DEFAULT_MAX_INDICES
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{MAX_INDICES_ENV} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ConfigError(f"{MAX_INDICES_ENV} must be positive, got {value}")
    return value


class FieldChannel(enum.Enum):
    """Which system operator an Ornstein-Uhlenbeck process modulates."""

    #: Longitudinal noise on the level splitting, couples through J0.
    DEPHASING = "dephasing"
    #: Real quadrature of the transverse noise, couples through J+ + J-.
    RELAX_RE = "relax_re"
    #: Imaginary quadrature, couples through i(J+ - J-).
    RELAX_IM = "relax_im"


_FIELD_COUPLING = {
    FieldChannel.DEPHASING: J0,
    FieldChannel.RELAX_RE: JPLUS + JMINUS,
    FieldChannel.RELAX_IM: 1j * (JPLUS - JMINUS),
}


@dataclass(frozen=True)
class OuProcess:
    """One stationary Ornstein-Uhlenbeck process acting on the system.

    The process has autocovariance delta**2 * exp(-gamma * |t - t'|), so
    ``delta`` is the stationary standard deviation (an energy in units of
    the level splitting) and ``gamma`` the inverse correlation time.
    """

    kind: FieldChannel
    delta: float
    gamma: float
    enabled: bool = True

    def __post_init__(self):
        if self.delta < 0:
            raise ConfigError(f"field {self.kind.value}: delta must be >= 0, got {self.delta}")
        if self.gamma <= 0:
            raise ConfigError(f"field {self.kind.value}: gamma must be > 0, got {self.gamma}")

    @classmethod
    def disabled(cls, kind: FieldChannel) -> "OuProcess":
        return cls(kind=kind, delta=0.0, gamma=1.0, enabled=False)

    @property
    def delta_sq(self) -> float:
        return self.delta * self.delta

    def coupling_operator(self) -> np.ndarray:
        return _FIELD_COUPLING[self.kind]


@dataclass(frozen=True)
class BathParams:
    """High-temperature bosonic bath with a Lorentzian spectral profile.

    ``delta_sq`` is the squared coupling amplitude, ``gamma`` the spectral
    cutoff (inverse bath correlation time) and ``beta`` the inverse
    temperature.  The model keeps terms through first order in beta, which
    is why :func:`bath_channel_coeffs` warns once beta * gamma grows large.
    """

    delta_sq: float
    gamma: float
    beta: float = 0.0
    mode: CouplingMode = CouplingMode.FULL
    enabled: bool = True

    def __post_init__(self):
        if self.delta_sq < 0:
            raise ConfigError(f"bath: delta_sq must be >= 0, got {self.delta_sq}")
        if self.gamma <= 0:
            raise ConfigError(f"bath: gamma must be > 0, got {self.gamma}")
        if self.beta < 0:
            raise ConfigError(f"bath: beta must be >= 0, got {self.beta}")

    @classmethod
    def disabled(cls) -> "BathParams":
        return cls(delta_sq=0.0, gamma=1.0, beta=0.0, enabled=False)

    @property
    def delta(self) -> float:
        return math.sqrt(self.delta_sq)

    @property
    def spectral_prefactor(self) -> float:
        """Overall scale of the spectral density, gamma * delta_sq / pi."""
        return self.gamma * self.delta_sq / math.pi

    @property
    def ht_valid(self) -> bool:
        """Whether the first-order-in-beta treatment of the bath is trustworthy."""
        return self.beta * self.gamma < 0.5


@dataclass(frozen=True)
class ChannelCoeffs:
    """Coefficients of one hierarchy channel, see the module docstring."""

    label: str
    alpha: float
    phi0: np.ndarray
    phi1: np.ndarray

    def __post_init__(self):
        for name in ("phi0", "phi1"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != (4, 4):
                raise ValueError(f"{name} must be 4x4, got shape {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def field_channel_coeffs(proc: OuProcess) -> ChannelCoeffs:
    """Hierarchy coefficients of one Ornstein-Uhlenbeck channel.

    Both couplings are the same pure commutator, -i * delta * [V, .], with V
    the coupling operator of the process; the memory decays at rate gamma.
    """
    if not proc.enabled:
        raise ConfigError(f"field {proc.kind.value}: channel is disabled")
    phi = -1j * proc.delta * commutator_super(proc.coupling_operator())
    return ChannelCoeffs(
        label=f"field_{proc.kind.value}",
        alpha=-proc.gamma,
        phi0=phi,
        phi1=phi.copy(),
    )


def bath_channel_coeffs(bath: BathParams) -> tuple[ChannelCoeffs, ChannelCoeffs]:
    """Hierarchy coefficients of the two bath branches.

    The deeper-neighbour couplings are plain commutators of the coupling
    operators.  The shallower-neighbour couplings carry the first-order
    thermal correction, a one-sided multiplication weighted by beta * gamma,
    which is what breaks detailed balance away from infinite temperature.
    """
    if not bath.enabled:
        raise ConfigError("bath: channel is disabled")
    if not bath.ht_valid:
        warnings.warn(
            f"bath model assumes beta * gamma << 1, got {bath.beta * bath.gamma:.3g}",
            HighTemperatureValidityWarning,
            stacklevel=2,
        )
    c1, c2 = coupling_ops(bath.mode)
    delta = bath.delta
    half = 0.5 * delta
    thermal = 1j * bath.beta * bath.gamma
    coeff1 = ChannelCoeffs(
        label="bath_1",
        alpha=-bath.gamma,
        phi0=-delta * commutator_super(c1),
        phi1=half * (commutator_super(c2) - thermal * left_super(c2)),
    )
    coeff2 = ChannelCoeffs(
        label="bath_2",
        alpha=-bath.gamma,
        phi0=-delta * commutator_super(c2),
        phi1=half * (commutator_super(c1) - thermal * right_super(c1)),
    )
    return coeff1, coeff2


def _compositions(total: int, k: int):
    # lexicographic over k-tuples of nonnegative integers with fixed sum
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first, *rest)


def enumerate_indices(
    n_channels: int, depth: int, *, max_indices: int | None = None
) -> np.ndarray:
    """All hierarchy multi-indices up to total depth, graded lexicographic.

    Indices are ordered by total depth first, then lexicographically, so the
    physical element is always row 0 and the layout is stable across runs.
    """
    if depth < 0:
        raise ConfigError(f"hierarchy depth must be >= 0, got {depth}")
    if n_channels < 0 or n_channels > 5:
        raise ConfigError(f"number of channels must be in 0..5, got {n_channels}")
    if n_channels == 0:
        return np.zeros((1, 0), dtype=np.int64)
    total = math.comb(depth + n_channels, n_channels)
    budget = index_budget(max_indices)
    if total > budget:
        raise HierarchyTooLargeError(
            f"hierarchy needs {total} indices ({n_channels} channels, depth {depth}) "
            f"but the budget is {budget}; lower the depth or raise {MAX_INDICES_ENV}"
        )
    out = np.empty((total, n_channels), dtype=np.int64)
    pos = 0
    for d in range(depth + 1):
        for comp in _compositions(d, n_channels):
            out[pos] = comp
            pos += 1
    return out


class HeomGenerator:
    """Linear generator of the truncated hierarchy.

    The generator acts on a stack of auxiliary matrices, stored as an
    (n_indices, 4) complex array of vectorized 2x2 matrices.  It is available
    both as a sparse matrix over the flattened stack and matrix free through
    :meth:`apply`; the two agree to machine precision and tests rely on that.

    Auxiliary matrices are rescaled by default so that couplings grow like
    the square root of the depth instead of linearly.  The physical element
    is untouched by the rescaling, so observables never need unscaling.
    """

    def __init__(
        self,
        h_sys: np.ndarray,
        channels: tuple[ChannelCoeffs, ...] | list[ChannelCoeffs],
        depth: int,
        *,
        rescale: bool = True,
        max_indices: int | None = None,
    ):
        h_sys = np.asarray(h_sys, dtype=complex)
        if h_sys.shape != (2, 2):
            raise ValueError(f"system hamiltonian must be 2x2, got {h_sys.shape}")
        if np.max(np.abs(h_sys - h_sys.conj().T)) > 1e-12:
            raise ValueError("system hamiltonian must be hermitian")
        self.h_sys = h_sys
        self.channels = tuple(channels)
        self.depth = int(depth)
        self.rescale = bool(rescale)
        self.indices = enumerate_indices(
            len(self.channels), self.depth, max_indices=max_indices
        )
        self.free_superop = -1j * commutator_super(h_sys)
        self._alphas = np.array([c.alpha for c in self.channels], dtype=float)
        if self.channels:
            self._depth_decay = self.indices @ self._alphas
        else:
            self._depth_decay = np.zeros(1)
        self._scales = self._channel_scales()
        self._edges = self._build_edges()

    @property
    def n_indices(self) -> int:
        return self.indices.shape[0]

    @property
    def dim(self) -> int:
        """Dimension of the flattened stack the sparse matrix acts on."""
        return 4 * self.n_indices

    def _channel_scales(self) -> np.ndarray:
        scales = np.ones(len(self.channels))
        if not self.rescale:
            return scales
        for k, ch in enumerate(self.channels):
            n0 = np.linalg.norm(ch.phi0)
            n1 = np.linalg.norm(ch.phi1)
            if n0 > 0 and n1 > 0:
                scales[k] = math.sqrt(n1 / n0)
        return scales

    def _build_edges(self):
        # Per channel: source rows, neighbour rows and scalar weights for the
        # couplings one level deeper (phi0) and one level shallower (phi1).
        position = {tuple(row): i for i, row in enumerate(self.indices)}
        totals = self.indices.sum(axis=1) if self.channels else np.zeros(1, dtype=np.int64)
        edges = []
        for k in range(len(self.channels)):
            b = self._scales[k]
            mk = self.indices[:, k]
            up_src, up_dst, up_w = [], [], []
            dn_src, dn_dst, dn_w = [], [], []
            for i, row in enumerate(self.indices):
                if totals[i] < self.depth:
                    up = list(row)
                    up[k] += 1
                    j = position[tuple(up)]
                    up_src.append(i)
                    up_dst.append(j)
                    up_w.append(b * math.sqrt(mk[i] + 1) if self.rescale else 1.0)
                if mk[i] > 0:
                    dn = list(row)
                    dn[k] -= 1
                    j = position[tuple(dn)]
                    dn_src.append(i)
                    dn_dst.append(j)
                    dn_w.append(math.sqrt(mk[i]) / b if self.rescale else float(mk[i]))
            edges.append(
                (
                    np.asarray(up_src, dtype=np.int64),
                    np.asarray(up_dst, dtype=np.int64),
                    np.asarray(up_w, dtype=float),
                    np.asarray(dn_src, dtype=np.int64),
                    np.asarray(dn_dst, dtype=np.int64),
                    np.asarray(dn_w, dtype=float),
                )
            )
        return edges

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Matrix-free action on an (n_indices, 4) stack."""
        out = values @ self.free_superop.T
        out += self._depth_decay[:, None] * values
        for k, ch in enumerate(self.channels):
            up_src, up_dst, up_w, dn_src, dn_dst, dn_w = self._edges[k]
            if up_src.size:
                out[up_src] += up_w[:, None] * (values[up_dst] @ ch.phi0.T)
            if dn_src.size:
                out[dn_src] += dn_w[:, None] * (values[dn_dst] @ ch.phi1.T)
        return out

    @cached_property
    def matrix(self) -> sparse.csr_matrix:
        """Sparse matrix over the flattened stack, row blocks of four."""
        n = self.n_indices
        parts = [
            sparse.kron(sparse.identity(n, format="csr"), self.free_superop, format="csr"),
            sparse.diags(np.repeat(self._depth_decay, 4).astype(complex), format="csr"),
        ]
        for k, ch in enumerate(self.channels):
            up_src, up_dst, up_w, dn_src, dn_dst, dn_w = self._edges[k]
            if up_src.size:
                block = sparse.coo_matrix((up_w, (up_src, up_dst)), shape=(n, n))
                parts.append(sparse.kron(block, ch.phi0, format="csr"))
            if dn_src.size:
                block = sparse.coo_matrix((dn_w, (dn_src, dn_dst)), shape=(n, n))
                parts.append(sparse.kron(block, ch.phi1, format="csr"))
        total = parts[0]
        for p in parts[1:]:
            total = total + p
        return total.tocsr()

    def gershgorin_bound(self) -> float:
        """Upper bound on the spectral radius, used for step-size checks."""
        m = self.matrix
        row_sums = np.add.reduceat(
            np.abs(m.data), m.indptr[:-1][np.diff(m.indptr) > 0]
        )
        return float(row_sums.max()) if row_sums.size else 0.0


@dataclass
class AdmStack:
    """State of the full hierarchy: one vectorized matrix per multi-index."""

    generator: HeomGenerator
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.generator.n_indices, 4)
        if self.values.shape != expected:
            raise ValueError(f"stack shape {self.values.shape}, expected {expected}")

    @classmethod
    def from_density_matrix(cls, generator: HeomGenerator, rho: np.ndarray) -> "AdmStack":
        """Stack with the physical element set and all auxiliaries zero."""
        values = np.zeros((generator.n_indices, 4), dtype=complex)
        values[0] = vec(rho)
        return cls(generator=generator, values=values)

    def physical(self) -> np.ndarray:
        """The physical 2x2 density matrix, row 0 of the stack."""
        return unvec(self.values[0])

    def apply_left(self, op: np.ndarray) -> "AdmStack":
        """Left-multiply every auxiliary matrix by ``op``."""
        mapped = self.values @ left_super(op).T
        return AdmStack(generator=self.generator, values=mapped)

    def copy(self) -> "AdmStack":
        return AdmStack(generator=self.generator, values=self.values.copy())
