import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_unitary, flat_index, match_phase
from vibronic import fock
from vibronic.doktorov import MolecularParams, doktorov_transform, duschinsky_params
from vibronic.errors import ConstraintError, ValidationError
from vibronic.gaussian import (
    BogoliubovTransform,
    Displacement,
    OpticalCircuit,
    Rotation,
    Squeeze,
    TwoModeSqueeze,
    apply_to_vacuum,
    bloch_messiah,
    circuit_transform,
    compose,
    max_entry_difference,
    primitive_transform,
    reduce_modes,
    reorder_displacement,
    synthesize_circuit,
    thermal_state,
    vacuum_state,
    validate,
)
from vibronic.verify import random_circuit, random_molecule, random_unitary

seeds = st.integers(0, 2**32 - 1)


# --- primitives ---------------------------------------------------------------

def test_rotation_identity_primitive():
    T = primitive_transform(Rotation(np.eye(2)))
    assert np.array_equal(T.X, np.zeros((2, 2)))
    assert np.array_equal(T.Y, np.eye(2))
    assert np.array_equal(T.z, np.zeros(2))


def test_squeeze_ln2_primitive():
    T = primitive_transform(Squeeze([np.log(2)]))
    assert T.X[0, 0] == pytest.approx(0.75, abs=1e-15)
    assert T.Y[0, 0] == pytest.approx(1.25, abs=1e-15)


def test_displacement_real_primitive():
    T = primitive_transform(Displacement([0.3]))
    assert T.X[0, 0] == 0 and T.Y[0, 0] == 1
    assert T.z[0] == pytest.approx(0.3)


def test_displacement_stores_conjugate():
    T = primitive_transform(Displacement([0.3 + 0.4j]))
    assert T.z[0] == pytest.approx(0.3 - 0.4j)


def test_two_mode_squeeze_unit_occupation():
    theta = 2 * np.arctanh(1 / np.sqrt(2))
    T = primitive_transform(TwoModeSqueeze([theta]))
    assert T.mode_count == 2
    assert T.X[0, 1] == pytest.approx(1.0) and T.X[1, 0] == pytest.approx(1.0)
    assert T.X[0, 0] == 0 and T.X[1, 1] == 0
    assert np.allclose(np.diag(T.Y), np.sqrt(2))


def test_non_unitary_rotation_reports_residual():
    with pytest.raises(ValidationError, match="residual"):
        primitive_transform(Rotation([[1.0, 0.1], [0.0, 1.0]]))


def test_zero_modes_rejected():
    with pytest.raises(ValidationError):
        BogoliubovTransform(np.zeros((0, 0)), np.zeros((0, 0)))
    with pytest.raises(ValidationError):
        Squeeze([])


def test_circuit_mode_count_mismatch():
    with pytest.raises(ValidationError):
        OpticalCircuit(2, [Squeeze([0.1])])


def test_complex_squeeze_rejected():
    with pytest.raises(ValidationError):
        Squeeze([0.1 + 0.2j])


# --- compose ----------------------------------------------------------------

def test_squeezes_form_a_group():
    a, b = primitive_transform(Squeeze([0.3, -0.2])), primitive_transform(Squeeze([0.5, 0.1]))
    assert max_entry_difference(compose(a, b), primitive_transform(Squeeze([0.8, -0.1]))) < 1e-14


def test_compose_identity():
    T = circuit_transform(random_circuit(np.random.default_rng(0), 3))
    I = BogoliubovTransform.identity(3)
    assert max_entry_difference(compose(T, I), T) < 1e-14
    assert max_entry_difference(compose(I, T), T) < 1e-14


def test_compose_mode_mismatch():
    with pytest.raises(ValidationError):
        compose(BogoliubovTransform.identity(1), BogoliubovTransform.identity(2))


def test_compose_displacement_then_squeeze_matches_dense_oracle():
    circuit = OpticalCircuit(1, [Displacement([0.4]), Squeeze([0.3])])
    synth = synthesize_circuit(circuit_transform(circuit))
    c, big = 12, 60
    ref = dense_unitary(circuit, big)[: c + 1, : c + 1]
    for n in range(c - 3):
        basis, psi = fock.evolve(synth, (n,), c)
        got = fock.box_amplitudes(basis, psi, c)
        col = ref[:, n]
        assert np.max(np.abs(match_phase(col, got) - col)) < 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_composition_matches_fock_products(seed):
    # truncated products of the original primitives vs the synthesized circuit of their composition
    rng = np.random.default_rng(seed)
    M = 1 + seed % 2
    circuit = random_circuit(rng, M, max_ops=4, scale=0.4)
    synth = synthesize_circuit(circuit_transform(circuit))
    c = 10
    for n in np.ndindex(*(c - 3,) * M):
        if sum(n) > c - 4:
            continue
        b1, p1 = fock.evolve(circuit, n, c)
        b2, p2 = fock.evolve(synth, n, c)
        a1, a2 = fock.box_amplitudes(b1, p1, c), fock.box_amplitudes(b2, p2, c)
        inner = tuple(slice(0, c - 3) for _ in range(M))
        a1, a2 = a1[inner].ravel(), a2[inner].ravel()
        assert np.max(np.abs(match_phase(a1, a2) - a1)) < 1e-8


def test_two_mode_composition_against_dense_oracle():
    rng = np.random.default_rng(11)
    circuit = OpticalCircuit(
        2,
        [Squeeze([0.2, -0.15]), Rotation(random_unitary(rng, 2)), Displacement([0.2 + 0.1j, -0.3]),
         TwoModeSqueeze([0.25])],
    )
    synth = synthesize_circuit(circuit_transform(circuit))
    big, c = 24, 5
    U = dense_unitary(circuit, big)
    for n in [(0, 0), (1, 0), (1, 2)]:
        col = np.array([U[flat_index(m, big), flat_index(n, big)] for m in np.ndindex(c + 1, c + 1)])
        basis, psi = fock.evolve(synth, n, c)
        got = fock.box_amplitudes(basis, psi, c).ravel()
        assert np.max(np.abs(match_phase(col, got) - col)) < 1e-8


# --- validate -----------------------------------------------------------------

def test_validate_squeeze_is_exact():
    r = validate(primitive_transform(Squeeze([0.7])))
    assert r.symplectic < 1e-15 and r.symmetric == 0


def test_validate_invalid_transform():
    r = validate(BogoliubovTransform(np.eye(3), np.eye(3)))
    assert r.symplectic == pytest.approx(np.sqrt(3))


def test_validate_doktorov_three_modes():
    mol = random_molecule(np.random.default_rng(3), 3)
    r = validate(doktorov_transform(duschinsky_params(mol)))
    assert max(r) < 1e-12


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_compositions_satisfy_constraints(seed):
    rng = np.random.default_rng(seed)
    T = circuit_transform(random_circuit(rng, int(rng.integers(1, 5))))
    assert max(validate(T)) < 1e-10


# --- Bloch-Messiah ----------------------------------------------------------------

def test_bloch_messiah_single_squeeze():
    f = bloch_messiah(primitive_transform(Squeeze([0.4])))
    assert f.sigma[0] == pytest.approx(0.4, abs=1e-14)
    assert np.allclose(f.U_L, 1) and np.allclose(f.U_R, 1)


def test_bloch_messiah_rotation_gauge():
    U = random_unitary(np.random.default_rng(2), 3)
    f = bloch_messiah(primitive_transform(Rotation(U)))
    assert np.array_equal(f.sigma, np.zeros(3))
    assert np.allclose(f.U_R, np.eye(3), atol=1e-12)
    assert np.allclose(f.U_L, U, atol=1e-12)


def test_bloch_messiah_doktorov_mixed_frequencies():
    mol = MolecularParams([0.5, 3.0], [2.0, 0.7], [[0.6, 0.8], [-0.8, 0.6]], [0.3, -0.4])
    T = doktorov_transform(duschinsky_params(mol))
    f = bloch_messiah(T)
    assert max_entry_difference(f.reconstruct(), T) < 1e-10
    assert np.all(np.diff(f.sigma) <= 0)
    assert np.all(np.linalg.svd(T.Y, compute_uv=False) >= 1 - 1e-12)


def test_bloch_messiah_rejects_invalid():
    with pytest.raises(ConstraintError):
        bloch_messiah(BogoliubovTransform(np.eye(2), np.eye(2)))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_bloch_messiah_round_trip(seed):
    rng = np.random.default_rng(seed)
    T = circuit_transform(random_circuit(rng, int(rng.integers(1, 5))))
    f = bloch_messiah(T)
    assert max_entry_difference(f.reconstruct(), T) < 1e-9
    assert np.all(f.sigma >= 0) and np.all(np.diff(f.sigma) <= 0)
    assert max_entry_difference(circuit_transform(synthesize_circuit(T)), T) < 1e-9


def test_degenerate_squeezing_round_trip():
    rng = np.random.default_rng(5)
    U = random_unitary(rng, 3)
    V = random_unitary(rng, 3)
    T = circuit_transform(OpticalCircuit(3, [Rotation(V), Squeeze([0.5, 0.5, 0.0]), Rotation(U)]))
    f = bloch_messiah(T)
    assert np.allclose(f.sigma, [0.5, 0.5, 0.0], atol=1e-12)
    assert max_entry_difference(f.reconstruct(), T) < 1e-10


# --- synthesize_circuit -----------------------------------------------------------

def test_synthesize_identity():
    circuit = synthesize_circuit(BogoliubovTransform.identity(2))
    rot_r, sq, rot_l, disp = circuit.ops
    assert np.allclose(rot_r.U, np.eye(2)) and np.allclose(rot_l.U, np.eye(2))
    assert np.array_equal(sq.lam, np.zeros(2)) and np.array_equal(disp.alpha, np.zeros(2))


def test_synthesize_pure_displacement():
    z = np.array([0.3 - 0.2j, 1.1j])
    circuit = synthesize_circuit(BogoliubovTransform(np.zeros((2, 2)), np.eye(2), z))
    assert np.allclose(circuit.ops[-1].alpha, np.conj(z))
    assert np.allclose(circuit_transform(circuit).z, z)


def test_synthesize_random_two_mode():
    T = circuit_transform(random_circuit(np.random.default_rng(7), 2, max_ops=5))
    assert max_entry_difference(circuit_transform(synthesize_circuit(T)), T) < 1e-10


# --- reorder_displacement ---------------------------------------------------------

def test_reorder_identity_linear_part():
    g = np.array([0.2, -0.5])
    assert np.allclose(reorder_displacement(np.zeros((2, 2)), np.eye(2), g), g)
    # D_{g*} |0> = D_{g'} |0> forces g' = g* for complex g
    g = np.array([0.2 + 0.1j, -0.5j])
    assert np.allclose(reorder_displacement(np.zeros((2, 2)), np.eye(2), g), np.conj(g))


def test_reorder_single_mode_squeeze():
    lam, g = 0.6, 0.9
    gp = reorder_displacement([[np.sinh(lam)]], [[np.cosh(lam)]], [g])
    assert gp[0] == pytest.approx(g * np.exp(-lam), abs=1e-14)


def _linear(T):
    return BogoliubovTransform(T.X, T.Y)


@pytest.mark.parametrize("seed", range(5))
def test_reorder_state_equality(seed):
    rng = np.random.default_rng(seed)
    W = _linear(circuit_transform(random_circuit(rng, 2, scale=0.7)))
    gamma = rng.normal(size=2) + 1j * rng.normal(size=2)
    gp = reorder_displacement(W.X, W.Y, gamma)
    # D_{gamma*} W |0>  vs  W D_{gamma'} |0>
    left = compose(W, primitive_transform(Displacement(np.conj(gamma))))
    right = compose(primitive_transform(Displacement(gp)), W)
    s1, s2 = apply_to_vacuum(left), apply_to_vacuum(right)
    assert np.max(np.abs(s1.mean - s2.mean)) < 1e-10
    assert np.max(np.abs(s1.covariance - s2.covariance)) < 1e-10


def test_reorder_fock_fidelity():
    rng = np.random.default_rng(21)
    Wc = OpticalCircuit(2, [Squeeze([0.3, -0.2]), Rotation(random_unitary(rng, 2))])
    W = circuit_transform(Wc)
    gamma = np.array([0.4 - 0.3j, 0.2 + 0.5j])
    gp = reorder_displacement(W.X, W.Y, gamma)
    c = 14
    _, psi1 = fock.evolve(Wc.then(Displacement(np.conj(gamma))), (0, 0), c)
    _, psi2 = fock.evolve(OpticalCircuit(2, [Displacement(gp), *Wc.ops]), (0, 0), c)
    fidelity = abs(np.vdot(psi1, psi2)) ** 2 / (np.vdot(psi1, psi1).real * np.vdot(psi2, psi2).real)
    assert fidelity > 1 - 1e-10


# --- Gaussian states --------------------------------------------------------------

def test_vacuum_moments():
    s = apply_to_vacuum(BogoliubovTransform.identity(2))
    assert np.array_equal(s.mean, np.zeros(2))
    assert np.allclose(s.covariance, np.eye(4) / 2)


def test_displaced_vacuum_moments():
    alpha = np.array([0.5 - 0.2j])
    s = apply_to_vacuum(primitive_transform(Displacement(alpha)))
    assert np.allclose(s.mean, alpha)
    assert np.allclose(s.covariance, np.eye(2) / 2)


def test_squeezed_photon_number_matches_fock():
    lam = 0.8
    s = apply_to_vacuum(primitive_transform(Squeeze([lam])))
    table = fock.state_probabilities(OpticalCircuit(1, [Squeeze([lam])]), (0,), 60)
    fock_mean = float(np.sum(np.arange(61) * table.probabilities()))
    assert s.photon_numbers()[0] == pytest.approx(np.sinh(lam) ** 2, abs=1e-12)
    assert s.photon_numbers()[0] == pytest.approx(fock_mean, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_unitary_states_are_pure(seed):
    rng = np.random.default_rng(seed)
    s = apply_to_vacuum(circuit_transform(random_circuit(rng, int(rng.integers(1, 4)), scale=0.7)))
    assert s.is_physical()
    assert s.is_pure(1e-8)


def test_reduce_keep_all():
    s = apply_to_vacuum(circuit_transform(random_circuit(np.random.default_rng(1), 3)))
    r = reduce_modes(s, [0, 1, 2])
    assert np.array_equal(r.mean, s.mean) and np.array_equal(r.covariance, s.covariance)


def test_reduce_two_mode_squeezed_vacuum():
    theta = 2 * np.arcsinh(1.0)
    r = reduce_modes(apply_to_vacuum(primitive_transform(TwoModeSqueeze([theta]))), [0])
    assert np.allclose(r.covariance, thermal_state([1.0]).covariance, atol=1e-12)
    assert r.photon_numbers()[0] == pytest.approx(1.0)
    assert not r.is_pure() and r.is_physical()


def test_reduce_product_state():
    single = apply_to_vacuum(primitive_transform(Squeeze([0.3])))
    for second in [Squeeze([0.0]), Squeeze([-1.2]), Displacement([0.7j])]:
        ops = [Squeeze([0.3, 0.0])]
        ops.append(Squeeze([0.0, *second.lam]) if isinstance(second, Squeeze) else Displacement([0, *second.alpha]))
        r = reduce_modes(apply_to_vacuum(circuit_transform(OpticalCircuit(2, ops))), [0])
        assert np.allclose(r.covariance, single.covariance, atol=1e-14)
        assert np.allclose(r.mean, single.mean)


def test_reduce_out_of_range():
    with pytest.raises(ValidationError):
        reduce_modes(vacuum_state(2), [2])
    with pytest.raises(ValidationError):
        reduce_modes(vacuum_state(2), [])
