"""Scattering matrices of lead-coupled centers.

Each semi-infinite lead is eliminated exactly by the boundary self-energy
``sigma(k) = -J e^{ik}`` acting on its attachment site.  With ``W`` the
N x P indicator of attachment sites, the dressed Green function
``G = (E I - H_c - sigma W W^T)^{-1}`` yields the P x P scattering matrix

    S_raw = -I + 2i J sin(k) W^T G W,

whose entry (p, q) is the outgoing amplitude at port p for a unit input at
port q.  For two ports the layout is ``[[r_L, t_R], [t_L, r_R]]``.

Phase conventions.  ``S_raw`` references the in/out amplitudes through the
continuity value at the attachment site; the ``shifted`` convention applies
the global reference-plane phase ``e^{-2ik}`` and reproduces the closed-form
dimer coefficients below bit for bit.  Intensities and every conservation
quantity are convention independent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ScatteringSingularityError, SingularMatrixError
from .model import ScatteringSystem, mode_params, require_in_band
from .numerics import as_complex_matrix, invert


class Convention(str, Enum):
    """Global reference-plane phase choice for the scattering amplitudes."""

    RAW = "raw"
    SHIFTED = "shifted"


@dataclass(frozen=True)
class ScatteringMatrix:
    """P x P scattering amplitudes at a fixed wave vector and convention."""

    k: float
    entries: np.ndarray
    convention: Convention

    def __post_init__(self):
        entries = as_complex_matrix(self.entries, square=True, name="entries")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "convention", Convention(self.convention))

    @property
    def n_ports(self) -> int:
        return self.entries.shape[0]

    def _two_port(self) -> np.ndarray:
        if self.n_ports != 2:
            raise ValueError("named r/t accessors are defined for two ports only")
        return self.entries

    @property
    def r_left(self) -> complex:
        return complex(self._two_port()[0, 0])

    @property
    def t_left(self) -> complex:
        return complex(self._two_port()[1, 0])

    @property
    def r_right(self) -> complex:
        return complex(self._two_port()[1, 1])

    @property
    def t_right(self) -> complex:
        return complex(self._two_port()[0, 1])


def self_energy(k: float, coupling: float) -> complex:
    """Exact boundary term ``-J e^{ik}`` replacing one semi-infinite lead.

    Its imaginary part ``-J sin k`` is negative everywhere in the open band,
    encoding outgoing-wave decay into the eliminated lead.
    """
    k = require_in_band(k)
    return -float(coupling) * cmath.exp(1j * k)


def port_indicator(system: ScatteringSystem) -> np.ndarray:
    """N x P indicator matrix W with W[site_p, p] = 1."""
    w = np.zeros((system.dim, system.n_ports), dtype=np.complex128)
    for idx, port in enumerate(system.ports):
        w[port.site, idx] = 1.0
    return w


def scattering_matrix(
    system: ScatteringSystem,
    k: float,
    convention: Convention | str = Convention.SHIFTED,
) -> ScatteringMatrix:
    """Scattering matrix of ``system`` at wave vector ``k``.

    Raises :class:`ScatteringSingularityError` when the lead-dressed center
    is singular (a lasing / perfect-absorption momentum).
    """
    convention = Convention(convention)
    mode = mode_params(k, system.coupling)
    w = port_indicator(system)
    sigma = self_energy(mode.k, system.coupling)
    dressed = (
        mode.energy * np.eye(system.dim, dtype=np.complex128)
        - system.center
        - sigma * (w @ w.T)
    )
    try:
        g = invert(dressed)
    except SingularMatrixError as exc:
        raise ScatteringSingularityError(
            f"lead-dressed center is singular at k={mode.k:.6g}"
        ) from exc
    s = -np.eye(system.n_ports, dtype=np.complex128)
    s += (2j * system.coupling * math.sin(mode.k)) * (w.T @ g @ w)
    if convention is Convention.SHIFTED:
        s = cmath.exp(-2j * mode.k) * s
    return ScatteringMatrix(mode.k, s, convention)


def closed_form_damped(k: float, gamma: float, coupling: float = 1.0) -> tuple[complex, complex]:
    """(r, t) of the damped dimer in the shifted convention.

        r = -(iJ + 2 gamma cos k) / (iJ + 2 gamma e^{ik})
        t =  2i gamma sin k       / (iJ + 2 gamma e^{ik})

    Valid for the zero-detuning dimer; ``gamma`` may be negative, which is
    the Hermitian-conjugate (gain) system.
    """
    k = require_in_band(k)
    j = float(coupling)
    g = float(gamma)
    den = 1j * j + 2.0 * g * cmath.exp(1j * k)
    if abs(den) <= 1e-12 * (j + 2.0 * abs(g)):
        raise ScatteringSingularityError(f"closed-form denominator vanishes at k={k:.6g}")
    r = -(1j * j + 2.0 * g * math.cos(k)) / den
    t = 2j * g * math.sin(k) / den
    return r, t


def closed_form_undamped(k: float, gamma: float, coupling: float = 1.0) -> tuple[complex, complex]:
    """(r, t) of the undamped dimer in the shifted convention.

        r = -(J^2 + gamma^2)      / (J^2 + gamma^2 e^{2ik})
        t =  2 J gamma sin k      / (J^2 + gamma^2 e^{2ik})

    Flipping the sign of ``gamma`` keeps r and negates t.
    """
    k = require_in_band(k)
    j = float(coupling)
    g = float(gamma)
    den = j * j + g * g * cmath.exp(2j * k)
    if abs(den) <= 1e-12 * (j * j + g * g):
        raise ScatteringSingularityError(f"closed-form denominator vanishes at k={k:.6g}")
    r = -(j * j + g * g) / den
    t = 2.0 * j * g * math.sin(k) / den
    return r, t
