"""Verification of the universal scattering conservation law.

For any center H with scattering matrix S and its Hermitian conjugate
center H† with matrix S̄ (same k, same convention, same port order),

    S̄† S = I

holds regardless of non-Hermiticity.  Its diagonal entries are the
unit-overlap relations conj(r̄) r + conj(t̄) t = 1 per input port, the
off-diagonal entries are the corresponding zero-overlap relations.  The
flux classifier checks the two-port intensity laws |r|^2 + |t|^2 = 1
(energy conserving) and |r|^2 - |t|^2 = 1 (energy-difference conserving).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConventionMismatchError, KMismatchError, NotTwoPortError
from .numerics import frob
from .smatrix import ScatteringMatrix

DEFAULT_FLUX_TOL = 1e-9


class FluxClass(str, Enum):
    ENERGY = "energy"
    ENERGY_DIFFERENCE = "energy-difference"
    NEITHER = "neither"


@dataclass(frozen=True)
class ConservationReport:
    """Residuals of the conservation law for one (S, S̄) pair.

    ``flux_class``/``flux_residual`` are None for port counts other than 2.
    """

    law_residual: float
    diag_residuals: tuple[complex, ...]
    offdiag_residuals: tuple[complex, ...]
    flux_class: FluxClass | None
    flux_residual: float | None


def flux_deviations(s: ScatteringMatrix) -> tuple[float, float]:
    """Worst-port deviations (sum_dev, diff_dev) of the two intensity laws."""
    if s.n_ports != 2:
        raise NotTwoPortError(f"flux classification needs 2 ports, got {s.n_ports}")
    sum_dev = 0.0
    diff_dev = 0.0
    for q in (0, 1):
        r2 = abs(s.entries[q, q]) ** 2
        t2 = abs(s.entries[1 - q, q]) ** 2
        sum_dev = max(sum_dev, abs(r2 + t2 - 1.0))
        diff_dev = max(diff_dev, abs(r2 - t2 - 1.0))
    return sum_dev, diff_dev


def classify_flux(s: ScatteringMatrix, tol: float = DEFAULT_FLUX_TOL) -> tuple[FluxClass, float]:
    """Classify the two-port flux law and report the smaller deviation."""
    sum_dev, diff_dev = flux_deviations(s)
    if sum_dev < tol:
        cls = FluxClass.ENERGY
    elif diff_dev < tol:
        cls = FluxClass.ENERGY_DIFFERENCE
    else:
        cls = FluxClass.NEITHER
    return cls, min(sum_dev, diff_dev)


def verify_conservation_law(
    s: ScatteringMatrix,
    s_bar: ScatteringMatrix,
    tol: float = DEFAULT_FLUX_TOL,
) -> ConservationReport:
    """Residuals of S̄† S = I for matrices of a center and its conjugate.

    Both matrices must share the wave vector, the convention, and the port
    order; violations raise :class:`KMismatchError` or
    :class:`ConventionMismatchError`.
    """
    if s.convention != s_bar.convention:
        raise ConventionMismatchError(
            f"conventions differ: {s.convention.value} vs {s_bar.convention.value}"
        )
    if s.k != s_bar.k:
        raise KMismatchError(f"wave vectors differ: {s.k} vs {s_bar.k}")
    if s.entries.shape != s_bar.entries.shape:
        raise ValueError(
            f"port counts differ: {s.entries.shape} vs {s_bar.entries.shape}"
        )
    p = s.n_ports
    product = s_bar.entries.conj().T @ s.entries - np.eye(p, dtype=np.complex128)
    diag = tuple(complex(product[i, i]) for i in range(p))
    offdiag = tuple(
        complex(product[i, j]) for i in range(p) for j in range(p) if i != j
    )
    if p == 2:
        flux_class, flux_residual = classify_flux(s, tol)
    else:
        flux_class, flux_residual = None, None
    return ConservationReport(
        law_residual=frob(product),
        diag_residuals=diag,
        offdiag_residuals=offdiag,
        flux_class=flux_class,
        flux_residual=flux_residual,
    )
