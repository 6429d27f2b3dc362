import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import crandn, random_channel_set, random_phases
from nfirs.effective import IrsPhases, compose_effective, effective_link
from nfirs.irs_mm import (QuadraticForm, build_quadratic_form, largest_eigenvalue,
                          mm_direction, mm_phase_update, optimize_irs)
from nfirs.wmmse import (EffectiveChannels, initial_precoder, mse_matrix, receiver_stats)


def tiny_instance(seed, n_irs=(2, 2), M=(2, 2), N=(2, 2), d=2, p=2.0, sigma2=(1.0, 1.0)):
    """Channels, fixed other phase, precoders, MMSE combiners and weights."""
    rng = np.random.default_rng(seed)
    ch = random_channel_set(rng, M=M, N=N, n_irs=n_irs, scale=0.7)
    phases = IrsPhases(random_phases(rng, n_irs[0]), random_phases(rng, n_irs[1]))
    eff = compose_effective(ch, phases)
    V_l = initial_precoder(eff[("r", "l")], d, p) + 0.3 * crandn(rng, M[0], d)
    V_r = initial_precoder(eff[("l", "r")], d, p) + 0.3 * crandn(rng, M[1], d)
    stats = {n: receiver_stats(eff, V_l, V_r, n, s2) for n, s2 in zip("lr", sigma2)}
    w = rng.uniform(0.5, 2.0, 2)
    F = {n: stats[n].combiner() for n in "lr"}
    W = {n: stats[n].weight(wn) for n, wn in zip("lr", w)}
    return dict(ch=ch, phases=phases, V_l=V_l, V_r=V_r, F=F, W=W, sigma2=sigma2)


def true_objective(inst, irs, phi):
    """Tr(W_l E_l) + Tr(W_r E_r) evaluated from scratch for any complex phi."""
    other = inst["phases"]["ir" if irs == "il" else "il"]
    phi_l, phi_r = (phi, other) if irs == "il" else (other, phi)
    ch = inst["ch"]
    eff = EffectiveChannels(*(effective_link(ch, rx, tx, phi_l, phi_r)
                              for rx, tx in (("l", "r"), ("r", "l"), ("l", "l"), ("r", "r"))))
    total = 0.0
    for node, s2 in zip("lr", inst["sigma2"]):
        E = mse_matrix(eff, inst["V_l"], inst["V_r"], inst["F"][node], node, s2)
        total += np.real(np.trace(inst["W"][node] @ E))
    return total


def form_for(inst, irs, phase=None):
    other = inst["phases"]["ir" if irs == "il" else "il"]
    return build_quadratic_form(inst["ch"], other, inst["V_l"], inst["V_r"], inst["F"]["l"],
                                inst["F"]["r"], inst["W"]["l"], inst["W"]["r"], irs,
                                *inst["sigma2"], phase=phase)


def reconstruct(f, n):
    """Recover (Sigma, s, c) of phi^H Sigma phi + 2 Re(s^T phi) + c from probes."""
    e = np.eye(n, dtype=complex)
    c = f(np.zeros(n, dtype=complex))
    sigma = np.zeros((n, n), dtype=complex)
    s = np.zeros(n, dtype=complex)
    for k in range(n):
        fp, fm = f(e[k]), f(-e[k])
        sigma[k, k] = (fp + fm) / 2 - c
        s[k] = (fp - fm) / 4 - 1j * (f(1j * e[k]) - f(-1j * e[k])) / 4
    for k, j in itertools.permutations(range(n), 2):
        if k < j:
            re = (f(e[k] + e[j]) - f(e[k]) - f(e[j]) + c) / 2
            # phi = e_k + i e_j picks up -2 Im(Sigma_kj)
            im = -(f(e[k] + 1j * e[j]) - f(e[k]) - f(1j * e[j]) + c) / 2
            sigma[k, j] = re + 1j * im
            sigma[j, k] = np.conj(sigma[k, j])
    return sigma, s, c


# form construction ---------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("irs", ["il", "ir"])
def test_reconstruction_oracle(seed, irs):
    inst = tiny_instance(seed)
    sigma, s, c = reconstruct(lambda phi: true_objective(inst, irs, phi), 2)
    form = form_for(inst, irs)
    scale = max(1.0, np.max(np.abs(sigma)))
    assert np.max(np.abs(form.sigma - sigma)) <= 1e-8 * scale
    assert np.max(np.abs(form.s - s)) <= 1e-8 * scale
    assert abs(form.constant - c) <= 1e-8 * max(1.0, abs(c))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["il", "ir"]))
def test_form_matches_objective_everywhere(seed, irs):
    inst = tiny_instance(seed, n_irs=(3, 2), M=(3, 2), N=(2, 3), d=2)
    n = 3 if irs == "il" else 2
    rng = np.random.default_rng(seed + 1)
    form = form_for(inst, irs, phase=random_phases(rng, n))
    for _ in range(10):
        phi = random_phases(rng, n)
        f = true_objective(inst, irs, phi)
        assert form(phi) == pytest.approx(f, rel=1e-9)


def test_expansion_point_does_not_change_the_form(rng):
    inst = tiny_instance(3, n_irs=(4, 4))
    a = form_for(inst, "il")
    b = form_for(inst, "il", phase=random_phases(rng, 4))
    np.testing.assert_allclose(a.sigma, b.sigma, atol=1e-12)
    np.testing.assert_allclose(a.s, b.s, atol=1e-10)
    assert a.constant == pytest.approx(b.constant, rel=1e-10)


def test_error_covariance_shortcut_agrees(rng):
    inst = tiny_instance(4, n_irs=(3, 3), M=(3, 3), N=(3, 3))
    eff = compose_effective(inst["ch"], inst["phases"])
    E = {n: receiver_stats(eff, inst["V_l"], inst["V_r"], n).error_covariance() for n in "lr"}
    kwargs = dict(phase=inst["phases"]["il"])
    plain = form_for(inst, "il", **kwargs)
    short = build_quadratic_form(inst["ch"], inst["phases"]["ir"], inst["V_l"], inst["V_r"],
                                 inst["F"]["l"], inst["F"]["r"], inst["W"]["l"],
                                 inst["W"]["r"], "il", E_l=E["l"], E_r=E["r"], **kwargs)
    assert short.center_value == pytest.approx(plain.center_value, rel=1e-10)
    np.testing.assert_allclose(short.gradient, plain.gradient, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("irs", ["il", "ir"])
def test_decoupled_irs_gives_zero_form(irs):
    inst = tiny_instance(0)
    ch = inst["ch"]
    zeroed = {f"{a}_{b}": np.zeros_like(ch[(a, b)]) for a, b in ch.matrices if irs in (a, b)}
    inst["ch"] = ch.replace(**zeroed)
    form = form_for(inst, irs)
    assert np.max(np.abs(form.sigma)) == 0.0
    assert np.max(np.abs(form.s)) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sigma_is_hermitian_psd(seed):
    inst = tiny_instance(seed, n_irs=(4, 3), M=(3, 2), N=(2, 2))
    sigma = form_for(inst, "il").sigma
    norm = np.linalg.norm(sigma)
    assert np.linalg.norm(sigma - sigma.conj().T) <= 1e-10 * norm
    ev = np.linalg.eigvalsh(sigma)
    assert ev[0] >= -1e-8 * ev[-1]


def test_mismatched_other_phase_rejected():
    inst = tiny_instance(0)
    with pytest.raises(ValueError):
        build_quadratic_form(inst["ch"], np.ones(5), inst["V_l"], inst["V_r"], inst["F"]["l"],
                             inst["F"]["r"], inst["W"]["l"], inst["W"]["r"], "il")


def test_unknown_irs_rejected():
    inst = tiny_instance(0)
    with pytest.raises(KeyError):
        build_quadratic_form(inst["ch"], np.ones(2), inst["V_l"], inst["V_r"], inst["F"]["l"],
                             inst["F"]["r"], inst["W"]["l"], inst["W"]["r"], "ix")


def test_coefficient_round_trip(rng):
    A = crandn(rng, 4, 4)
    s = crandn(rng, 4)
    form = QuadraticForm.from_coefficients(A @ A.conj().T, s, 2.5)
    np.testing.assert_allclose(form.s, s)
    assert form.constant == pytest.approx(2.5)
    phi = random_phases(rng, 4)
    expected = np.real(phi.conj() @ A @ A.conj().T @ phi + 2 * s @ phi) + 2.5
    assert form(phi) == pytest.approx(expected)


# MM step -------------------------------------------------------------------

def random_form(rng, n, rank=None):
    A = crandn(rng, n, rank or n)
    return QuadraticForm.from_coefficients(A @ A.conj().T, crandn(rng, n), rng.normal())


def surrogate(form, phi, phi_n):
    lam = form.lambda_max
    m = lam * np.eye(len(phi)) - form.sigma
    quad = (lam * np.vdot(phi, phi) - 2 * np.real(np.vdot(phi, m @ phi_n))
            + np.real(np.vdot(phi_n, m @ phi_n)))
    return float(np.real(quad) + 2 * np.real(form.s @ phi) + form.constant)


def test_direction_with_scaled_identity(rng):
    s = crandn(rng, 3)
    form = QuadraticForm.from_coefficients(4.0 * np.eye(3), s)
    np.testing.assert_allclose(mm_direction(form, random_phases(rng, 3)), -np.conj(s),
                               atol=1e-12)


def test_direction_zero_form_keeps_phases(rng):
    form = QuadraticForm.from_coefficients(np.zeros((3, 3)), np.zeros(3))
    phi = random_phases(rng, 3)
    q = mm_direction(form, phi)
    np.testing.assert_array_equal(q, 0)
    np.testing.assert_array_equal(mm_phase_update(q, phi), phi)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_surrogate_is_tangent_and_majorizes(seed):
    rng = np.random.default_rng(seed)
    form = random_form(rng, 5)
    phi_n = random_phases(rng, 5)
    assert surrogate(form, phi_n, phi_n) == pytest.approx(form(phi_n), abs=1e-9)
    for _ in range(5):
        phi = random_phases(rng, 5)
        assert surrogate(form, phi, phi_n) >= form(phi) - 1e-9


def test_phase_update_examples():
    np.testing.assert_array_equal(mm_phase_update(np.array([2.0, 0.1, 7.0])), np.ones(3))
    out = mm_phase_update(np.array([-1j]))
    np.testing.assert_allclose(out, np.exp(-1j * np.pi / 2), atol=1e-15)


def test_phase_update_zero_entries_keep_previous():
    prev = np.exp(1j * np.array([0.4, 1.3]))
    out = mm_phase_update(np.array([0.0, 3j]), prev)
    assert out[0] == prev[0]
    assert out[1] == pytest.approx(1j)


def test_mm_descent_and_feasibility():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        n = int(rng.integers(1, 9))
        form = random_form(rng, n, rank=int(rng.integers(1, n + 1)))
        ev = np.linalg.eigvalsh(form.lambda_max * np.eye(n) - form.sigma)
        assert ev[0] >= -1e-9 * max(1.0, form.lambda_max)
        phi = random_phases(rng, n)
        new = mm_phase_update(mm_direction(form, phi), phi)
        assert np.max(np.abs(np.abs(new) - 1.0)) <= 1e-12
        assert form(new) <= form(phi) + 1e-9 * max(1.0, abs(form(phi)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_objective_sequence_nonincreasing(seed):
    rng = np.random.default_rng(seed)
    form = random_form(rng, 6)
    res = optimize_irs(form, random_phases(rng, 6), eps=1e-10, max_iters=200)
    hist = np.array(res.objective)
    assert np.all(np.diff(hist) <= 1e-9 * np.maximum(1.0, np.abs(hist[:-1])))
    assert np.max(np.abs(np.abs(res.phi) - 1.0)) <= 1e-12


# Algorithm-level -----------------------------------------------------------

def test_linear_form_converges_in_one_step(rng):
    s = crandn(rng, 4)
    form = QuadraticForm.from_coefficients(np.zeros((4, 4)), s)
    res = optimize_irs(form, np.ones(4, dtype=complex))
    np.testing.assert_allclose(res.phi, np.exp(1j * np.angle(-np.conj(s))), atol=1e-14)
    assert res.converged
    res2 = optimize_irs(form, res.phi)
    assert res2.iterations == 1


def test_optimal_init_stops_after_one_iteration(rng):
    form = random_form(rng, 5)
    first = optimize_irs(form, np.ones(5, dtype=complex), eps=1e-14, max_iters=5000)
    again = optimize_irs(form, first.phi, eps=1e-4)
    assert again.iterations == 1
    assert again.converged


def test_iteration_cap_reports_nonconvergence(rng):
    form = random_form(rng, 8)
    res = optimize_irs(form, random_phases(rng, 8), eps=0.0, max_iters=3)
    assert res.iterations == 3
    assert not res.converged
    assert form(res.phi) == min(res.objective)


def grid_minimum(form, n, points=16):
    grid = np.exp(2j * np.pi * np.arange(points) / points)
    combos = np.array(list(itertools.product(grid, repeat=n)))
    quad = np.einsum("ki,ij,kj->k", combos.conj(), form.sigma, combos).real
    values = quad + 2 * np.real(combos @ form.s) + form.constant
    return values.min()


@pytest.mark.parametrize("seed", range(5))
def test_mm_matches_brute_force_grid_on_irs_form(seed):
    inst = tiny_instance(seed, n_irs=(4, 2), M=(2, 2), N=(2, 2))
    form = form_for(inst, "il")
    res = optimize_irs(form, inst["phases"]["il"], eps=1e-12, max_iters=5000)
    best = grid_minimum(form, 4)
    assert form(res.phi) <= best + 1e-3 * max(1.0, abs(best))


def test_largest_eigenvalue_large_matrix_is_upper_bound(rng):
    A = crandn(rng, 300, 40)
    sigma = A @ A.conj().T
    dense = np.linalg.eigvalsh(sigma)[-1]
    lam = largest_eigenvalue(sigma)
    assert lam >= dense
    assert lam == pytest.approx(dense, rel=1e-8)


def test_largest_eigenvalue_of_zero():
    assert largest_eigenvalue(np.zeros((4, 4))) == 0.0
