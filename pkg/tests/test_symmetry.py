import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhscatter import (
    DimensionTooLargeError,
    FluxClass,
    MetricOperator,
    NotTwoPortError,
    PhaseClass,
    Port,
    PortConditionError,
    ScatteringSystem,
    classify_flux,
    is_anti_pt,
    make_prototype,
    metric_space,
    phase_of,
    port_signature,
    predict_conjugate_smatrix,
    prototype_system,
    scattering_matrix,
)
from helpers import random_center, random_k

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

GAMMA = 1.0 / 3.0


def _in_span(target: np.ndarray, basis: list[MetricOperator]) -> bool:
    """Least-squares membership of ``target`` in the real span of the basis."""
    if not basis:
        return False
    columns = np.stack(
        [np.concatenate([op.matrix.real.ravel(), op.matrix.imag.ravel()]) for op in basis],
        axis=1,
    )
    rhs = np.concatenate([target.real.ravel(), target.imag.ravel()])
    coef, *_ = np.linalg.lstsq(columns, rhs, rcond=None)
    return np.linalg.norm(columns @ coef - rhs) < 1e-9


# ---------------------------------------------------------------------------
# metric space


def test_undamped_metric_space_spans_sigma_y_and_sigma_z():
    basis = metric_space(make_prototype("undamped", 0.0, 0.7))
    assert len(basis) == 2
    assert _in_span(SIGMA_Z, basis)
    assert _in_span(SIGMA_Y, basis)
    invertibles = [op for op in basis if op.invertible]
    assert invertibles, "expected an invertible metric"
    assert all(op.residual < 1e-10 for op in basis)


def test_undamped_basis_contains_port_conditioned_sigma_z():
    basis = metric_space(make_prototype("undamped", 0.0, 0.7))
    signatures = []
    for op in basis:
        try:
            signatures.append((port_signature(op, 0, 1), op.invertible))
        except PortConditionError:
            signatures.append(None)
    assert ((1, -1), True) in signatures


def test_damped_metric_space_is_singular_line():
    basis = metric_space(make_prototype("damped", 0.0, 0.7))
    assert len(basis) == 1
    op = basis[0]
    assert not op.invertible
    # solutions are the multiples of (identity - swap)
    expected = np.array([[1.0, -1.0], [-1.0, 1.0]]) / 1.0
    assert np.abs(op.matrix - expected).max() < 1e-10


def test_hermitian_center_metric_space_contains_identity():
    rng = np.random.default_rng(12)
    a = random_center(rng, 3)
    h = a + a.conj().T
    basis = metric_space(h)
    assert _in_span(np.eye(3, dtype=complex), basis)
    assert all(op.residual < 1e-9 for op in basis)


def test_metric_space_dimension_invariant_under_site_relabeling():
    # relabeling sites permutes the linear system's rows/columns; the
    # solution-space dimension must not change
    rng = np.random.default_rng(40)
    for n in (2, 3, 4):
        h = random_center(rng, n)
        perm = rng.permutation(n)
        p = np.eye(n)[perm]
        assert len(metric_space(h)) == len(metric_space(p @ h @ p.T))


def test_metric_space_rejects_large_dimension():
    with pytest.raises(DimensionTooLargeError):
        metric_space(np.eye(9))


def test_every_basis_element_solves_the_metric_condition():
    rng = np.random.default_rng(77)
    for _ in range(5):
        b = random_center(rng, 3)
        q0 = np.diag([1.0, -1.0, 1.0])
        h = b + q0 @ b.conj().T @ q0  # pseudo-Hermitian by construction
        for op in metric_space(h):
            residual = np.linalg.norm(op.matrix @ h.conj().T - h @ op.matrix, "fro")
            assert residual < 1e-10
            assert op.residual < 1e-10


# ---------------------------------------------------------------------------
# port signature


def test_port_signature_sigma_z():
    assert port_signature(SIGMA_Z, 0, 1) == (1, -1)


def test_port_signature_identity():
    assert port_signature(np.eye(2, dtype=complex), 0, 1) == (1, 1)


def test_port_signature_sigma_y_fails_with_index():
    with pytest.raises(PortConditionError) as excinfo:
        port_signature(SIGMA_Y, 0, 1)
    assert excinfo.value.index is not None


def test_port_signature_validates_sites():
    with pytest.raises(ValueError):
        port_signature(SIGMA_Z, 0, 0)
    with pytest.raises(ValueError):
        port_signature(SIGMA_Z, 0, 5)


def test_port_signature_on_larger_metric():
    q = np.diag([1.0, -1.0, 2.5]).astype(complex)
    assert port_signature(q, 0, 1) == (1, -1)
    with pytest.raises(PortConditionError):
        port_signature(q, 0, 2)


# ---------------------------------------------------------------------------
# anti-PT and phases


def test_prototypes_are_anti_pt_under_sigma_x():
    for kind in ("damped", "undamped"):
        for v, gamma in ((0.0, 0.4), (0.7, 0.23), (1.5, 1.5)):
            assert is_anti_pt(make_prototype(kind, v, gamma), SIGMA_X)


def test_identity_is_not_anti_pt():
    assert not is_anti_pt(np.eye(2, dtype=complex), SIGMA_X)


def test_damped_zero_detuning_is_anti_hermitian():
    h = make_prototype("damped", 0.0, 0.9)
    assert np.abs(h.conj().T + h).max() < 1e-15


def test_phase_classification():
    assert phase_of(0.0, GAMMA) is PhaseClass.EXACT
    assert phase_of(0.2, 0.2) is PhaseClass.EXCEPTIONAL_POINT
    assert phase_of(0.4, 0.2) is PhaseClass.BROKEN
    with pytest.raises(ValueError):
        phase_of(-0.1, 0.2)


# ---------------------------------------------------------------------------
# conjugate-matrix prediction


def test_prediction_matches_direct_computation_for_undamped():
    system = prototype_system("undamped", 0.0, GAMMA)
    for k in (0.5, math.pi / 2.0, 2.3):
        s = scattering_matrix(system, k)
        predicted = predict_conjugate_smatrix(s, 1, -1)
        direct = scattering_matrix(system.daggered(), k)
        assert np.abs(predicted.entries - direct.entries).max() < 1e-10


def test_prediction_value_at_band_center():
    s = scattering_matrix(prototype_system("undamped", 0.0, GAMMA), math.pi / 2.0)
    predicted = predict_conjugate_smatrix(s, 1, -1)
    assert abs(predicted.t_left - (-0.75)) < 1e-12
    assert abs(predicted.r_left - s.r_left) < 1e-15


def test_trivial_signature_is_identity_map():
    s = scattering_matrix(prototype_system("damped", 0.0, GAMMA), 1.0)
    predicted = predict_conjugate_smatrix(s, 1, 1)
    np.testing.assert_array_equal(predicted.entries, s.entries)


def test_prediction_validates_inputs():
    s = scattering_matrix(prototype_system("damped", 0.0, GAMMA), 1.0)
    with pytest.raises(ValueError):
        predict_conjugate_smatrix(s, 2, 1)
    rng = np.random.default_rng(2)
    from helpers import random_system

    s3 = scattering_matrix(random_system(rng, p=3), 1.0)
    with pytest.raises(NotTwoPortError):
        predict_conjugate_smatrix(s3, 1, 1)


# ---------------------------------------------------------------------------
# signature sign product fixes the flux class


@given(seed=st.integers(0, 10_000), n=st.integers(2, 4))
@settings(max_examples=25, deadline=None)
def test_sign_product_rule_on_constructed_centers(seed, n):
    rng = np.random.default_rng(seed)
    diag = np.ones(n)
    diag[1] = -1.0
    q = np.diag(diag).astype(complex)
    b = random_center(rng, n)
    h = b + q @ b.conj().T @ q  # satisfies q H† q^{-1} = H
    assert port_signature(q, 0, 1) == (1, -1)
    system = ScatteringSystem(h, (Port(0, "left"), Port(1, "right")), 1.0)
    k = random_k(rng)
    cls, residual = classify_flux(scattering_matrix(system, k))
    assert cls is FluxClass.ENERGY_DIFFERENCE
    assert residual < 1e-10
    predicted = predict_conjugate_smatrix(scattering_matrix(system, k), 1, -1)
    direct = scattering_matrix(system.daggered(), k)
    assert np.abs(predicted.entries - direct.entries).max() < 1e-10


@given(seed=st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_positive_sign_product_gives_energy_conservation(seed):
    rng = np.random.default_rng(seed)
    b = random_center(rng, 3)
    h = b + b.conj().T  # q = identity
    assert port_signature(np.eye(3, dtype=complex), 0, 1) == (1, 1)
    system = ScatteringSystem(h, (Port(0, "left"), Port(1, "right")), 1.0)
    cls, residual = classify_flux(scattering_matrix(system, random_k(rng)))
    assert cls is FluxClass.ENERGY
    assert residual < 1e-10
