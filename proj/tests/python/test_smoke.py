import numpy as np
import pytest

import deltaf


def test_least_norm_prediction_matches_stacked():
    rng = np.random.default_rng(3)
    a1, b1 = rng.normal(size=(3, 8)), rng.normal(size=3)
    a2, b2 = rng.normal(size=(2, 8)), rng.normal(size=2)
    s1 = deltaf.solve_least_norm(a1, b1)
    stacked = deltaf.solve_stacked(a1, b1, a2, b2)
    assert s1.f_star + deltaf.predict_delta_f(s1, a2, b2) == pytest.approx(stacked.f_star, rel=1e-10)
    assert np.allclose(a1 @ s1.x_star, b1)


def test_least_distance_worked_example():
    s = deltaf.solve_least_distance(np.eye(2), np.eye(2), np.array([1.0, 1.0]),
                                    np.array([[1.0, 0.0]]), np.array([0.0]))
    assert s.f_star == pytest.approx(1.0)
    assert np.allclose(s.x_star, [0.0, 1.0])
    assert deltaf.predict_delta_f_ld(s, np.array([[0.0, 1.0]]), np.array([0.0])) == pytest.approx(1.0)


def test_se3_round_trip():
    xi = np.array([0.3, -1.0, 2.0, 0.2, -0.4, 0.9])
    t = deltaf.se3.exp(xi)
    assert t.shape == (4, 4)
    assert np.allclose(deltaf.se3.log(t), xi, atol=1e-12)
    assert np.allclose(deltaf.se3.left_jacobian(xi) @ deltaf.se3.left_jacobian_inv(xi), np.eye(6), atol=1e-12)


def test_alignment_and_sweep(tmp_path):
    a, b, a_true, b_true = deltaf.simulate_pair(n_poses=5, seed=9)
    assert a.num_poses == 5 and len(b.poses()) == 5
    df = deltaf.predict_alignment_cost(a, b, 2, 4)
    sol = deltaf.solve_alignment(a, b, 2, 4)
    assert df > 0 and sol["f_real"] > 0
    assert abs(df - sol["f_real"]) / sol["f_real"] < 0.5

    grid = deltaf.sweep(a, b, mode="both", jobs=1, timings=False)
    assert len(grid["l"]) == 25
    assert set(grid["status"]) == {"ok"}
    assert np.all(grid["t_solve"] == 0.0)

    path = tmp_path / "a.csv"
    a.save(path)
    assert np.allclose(deltaf.Trajectory.load(path).poses(), a.poses())

    _, _, a0, b0 = deltaf.simulate_pair(n_poses=5, trans_noise=0.0, rot_noise=0.0, seed=9)
    assert deltaf.predict_alignment_cost(a0, b0, 3, 3) < 1e-20


def test_errors_carry_a_code():
    a, b, _, _ = deltaf.simulate_pair(n_poses=4)
    with pytest.raises(deltaf.Error) as info:
        deltaf.predict_alignment_cost(a, b, 9, 1)
    assert info.value.args[0] == "IndexOutOfRange"
    with pytest.raises(deltaf.Error) as info:
        deltaf.solve_least_norm(np.ones((2, 3)), np.ones(2))
    assert info.value.args[0] == "RankDeficient"
