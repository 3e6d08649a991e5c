"""Scattering centers, port maps, and lead dispersion.

A scattering system is a finite complex center matrix coupled to
semi-infinite uniform leads with hopping ``-J``.  Lead modes at wave
vector ``k`` (lattice constant 1) carry energy ``E = -2 J cos k`` and
group velocity ``v_g = 2 J sin k``; both vanish usefully only inside the
open band ``0 < k < pi``.

Site indexing is 0-based everywhere.  The bundled two-site prototypes use
the default port layout left -> site 0, right -> site 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BandEdgeError
from .numerics import as_complex_matrix

LEFT = "left"
RIGHT = "right"

# Prototype kinds: dissipatively coupled two-site centers, with and without
# a common imaginary on-site shift.
DAMPED = "damped"
UNDAMPED = "undamped"
PROTOTYPE_KINDS = (DAMPED, UNDAMPED)


def require_in_band(k: float) -> float:
    """Validate ``0 < k < pi`` strictly, else raise :class:`BandEdgeError`."""
    k = float(k)
    if not 0.0 < k < math.pi:
        raise BandEdgeError(f"wave vector k={k} outside the open band (0, pi)")
    return k


@dataclass(frozen=True)
class Port:
    """Lead attachment: a center site index plus a side label."""

    site: int
    label: str


@dataclass(frozen=True)
class ScatteringSystem:
    """A center matrix, an ordered port list, and the lead coupling J."""

    center: np.ndarray
    ports: tuple[Port, ...]
    coupling: float = 1.0

    def __post_init__(self):
        center = as_complex_matrix(self.center, square=True, name="center")
        center = center.copy()
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "ports", tuple(self.ports))
        if not self.ports:
            raise ValueError("a scattering system needs at least one port")
        n = center.shape[0]
        sites = [p.site for p in self.ports]
        for p in self.ports:
            if not 0 <= p.site < n:
                raise ValueError(f"port '{p.label}' attaches to site {p.site}, center has {n} sites")
        if len(set(sites)) != len(sites):
            raise ValueError(f"ports must attach to distinct sites, got {sites}")
        if not self.coupling > 0.0:
            raise ValueError(f"lead coupling must be positive, got {self.coupling}")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def n_ports(self) -> int:
        return len(self.ports)

    @property
    def port_sites(self) -> tuple[int, ...]:
        return tuple(p.site for p in self.ports)

    def port_site(self, label: str) -> int:
        for p in self.ports:
            if p.label == label:
                return p.site
        raise ValueError(f"no port labeled '{label}'")

    def daggered(self) -> "ScatteringSystem":
        """The Hermitian-conjugate system: same ports and leads, center -> center†."""
        return ScatteringSystem(dagger(self.center), self.ports, self.coupling)


@dataclass(frozen=True)
class ModeParameters:
    """Lead plane-wave data at wave vector k."""

    k: float
    coupling: float
    energy: float
    group_velocity: float


def make_prototype(kind: str, v: float, gamma: float) -> np.ndarray:
    """Build one of the two dissipatively coupled 2x2 prototype centers.

    Both couple the sites through ``-i*gamma`` and detune them by ``+/-v``.
    ``damped`` additionally shifts both sites by the common loss ``-i*gamma``;
    ``undamped`` has no on-site imaginary shift.
    """
    if kind not in PROTOTYPE_KINDS:
        raise ValueError(f"unknown prototype kind '{kind}' (choose from {PROTOTYPE_KINDS})")
    v = float(v)
    g = float(gamma)
    if kind == DAMPED:
        return np.array([[-1j * g + v, -1j * g], [-1j * g, -1j * g - v]], dtype=np.complex128)
    return np.array([[v, -1j * g], [-1j * g, -v]], dtype=np.complex128)


def prototype_system(kind: str, v: float, gamma: float, coupling: float = 1.0) -> ScatteringSystem:
    """Prototype center with the default two-port layout (left@0, right@1)."""
    return ScatteringSystem(
        make_prototype(kind, v, gamma),
        (Port(0, LEFT), Port(1, RIGHT)),
        coupling,
    )


def dagger(h: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(h, square=True, name="H").conj().T.copy()


def mode_params(k: float, coupling: float) -> ModeParameters:
    """Dispersion data ``E = -2 J cos k``, ``v_g = 2 J sin k`` for ``0 < k < pi``."""
    k = require_in_band(k)
    j = float(coupling)
    if not j > 0.0:
        raise ValueError(f"lead coupling must be positive, got {coupling}")
    return ModeParameters(
        k=k,
        coupling=j,
        energy=-2.0 * j * math.cos(k),
        group_velocity=2.0 * j * math.sin(k),
    )
