import os
import subprocess

import numpy as np
import pytest

import nsmbs


def test_galpha_parameters_closed_form():
    rho = 0.5
    p = nsmbs.galpha_params(rho)
    am = (2 * rho - 1) / (rho + 1)
    af = rho / (rho + 1)
    assert p["alpha_m"] == pytest.approx(am, abs=1e-15)
    assert p["alpha_f"] == pytest.approx(af, abs=1e-15)
    assert p["gamma"] == pytest.approx(0.5 - am + af, abs=1e-15)
    assert p["beta"] == pytest.approx(0.25 * (1 - am + af) ** 2, abs=1e-15)


@pytest.mark.parametrize("omega", [0.1, 1.0, 10.0])
def test_amplification_matrices(omega):
    A = nsmbs.amplification_galpha(omega, 0.8)
    N = nsmbs.numerical_amplification("galpha", omega, 0.8)
    assert A.shape == (3, 3)
    assert np.max(np.abs(A - N)) <= 1e-12 * max(1.0, omega**2)
    B = nsmbs.amplification_bathe(omega)
    assert np.max(np.abs(B - nsmbs.numerical_amplification("bathe", omega))) <= 1e-12 * max(1.0, omega**2)
    for M in (A, B):
        assert nsmbs.spectral_radius(M) == pytest.approx(np.max(np.abs(np.linalg.eigvals(M))), rel=1e-9)
        assert nsmbs.spectral_radius(M) <= 1.0 + 1e-12


def test_spectral_sweep_shape():
    s = nsmbs.spectral_sweep("bathe", points=50)
    assert len(s["rho"]) == 50
    assert np.all(np.diff(s["dt_over_T"]) > 0)
    assert max(s["rho"]) <= 1.0 + 1e-12


def test_single_contact_force_matches_projection():
    rng = np.random.default_rng(1)
    B = rng.normal(size=(4, 4))
    M = B @ B.T + np.eye(4)
    w = rng.normal(size=(4, 1))
    wt = np.zeros((4, 1))
    G = float((w.T @ np.linalg.solve(M, w))[0, 0])
    for gap_velocity in (-0.7, 0.4):
        u = np.linalg.solve(M, w[:, 0]) * gap_velocity / G
        lam_n, lam_t = nsmbs.solve_contact_forces(M, w, wt, u, np.zeros(1))
        assert lam_n[0] == pytest.approx(max(0.0, -gap_velocity / G), abs=1e-10)
        assert lam_t[0] == 0.0


def test_impulse_restitution():
    M = np.diag([2.0, 3.0])
    wn = np.array([[0.0], [1.0]])
    wt = np.array([[1.0], [0.0]])
    v = np.array([0.4, -1.5])
    lam_n, lam_t, vp = nsmbs.solve_impulses(M, wn, wt, v, np.zeros(1), np.array([0.5]), np.zeros(1))
    assert vp[1] == pytest.approx(0.75, abs=1e-12)
    assert vp[0] == pytest.approx(0.4, abs=1e-12)
    assert lam_n[0] == pytest.approx(3.0 * 2.25, abs=1e-10)


def test_mass_spring_frequencies():
    f = nsmbs.mass_spring_frequencies("a")
    K = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0 + 1e7]])
    ref = np.sqrt(np.sort(np.linalg.eigvalsh(K))) / (2 * np.pi)
    assert np.allclose(f, ref, rtol=1e-9)
    assert f[-1] == pytest.approx(503.3, abs=0.1)
    assert len(nsmbs.mass_spring_frequencies("b")) == 2


def test_simulate_short_run():
    r = nsmbs.simulate("slider_crank_t1", {"t_end": "1e-4"}, ["q", "slider"])
    assert r["completed"]
    assert r["steps"] == 10
    assert r["data"].shape == (11, len(r["names"]))
    assert r["names"][0] == "t"
    again = nsmbs.simulate("slider_crank_t1", {"t_end": "1e-4"}, ["q", "slider"])
    assert np.array_equal(r["data"], again["data"])
    assert r["config_hash"] == again["config_hash"]
    with pytest.raises(RuntimeError):
        nsmbs.simulate("slider_crank_t1", {"no_such_key": "1"})


def test_modes_ascending():
    f = nsmbs.modes("clamped", 4, 6)
    assert len(f) == 6
    assert np.all(np.diff(f) > 0)
    assert f[0] > 0


def test_run_cli_in_process():
    code, out, err = nsmbs.run_cli(["spectral", "--scheme", "galpha", "--points", "10"])
    assert code == 0
    assert len(out.strip().splitlines()) == 11
    assert nsmbs.run_cli([])[0] == 2


@pytest.mark.skipif("NSMBS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_binary():
    p = subprocess.run([os.environ["NSMBS_CLI"], "modes", "--n-elements", "4", "--n-modes", "3"],
                       capture_output=True, text=True)
    assert p.returncode == 0
    assert p.stdout.splitlines()[0] == "mode,omega,f_hz"
