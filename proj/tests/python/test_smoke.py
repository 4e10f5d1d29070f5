import math

import numpy as np
import pytest

import fpc


def test_feature_dim_and_kernel():
    assert fpc.feature_dim(9, 2) == 55
    assert fpc.feature_dim(1, 5) == 6
    x = np.array([0.5, -1.0])
    xp = np.array([2.0, 0.25])
    assert fpc.kernel_eval(x, xp, 3) == pytest.approx((1 + 1.0 - 0.25) ** 3)


def test_prox_matches_brute_force():
    rng = np.random.default_rng(1)
    grid = np.linspace(-20, 20, 400001)
    for _ in range(50):
        a = rng.choice([-1.0, 1.0, rng.uniform(-3, 3)])
        b = rng.uniform(-5, 5)
        gamma = 10 ** rng.uniform(-1, 1)
        obj = lambda z: np.maximum(0.0, 1 - a * z) + 0.5 * gamma * (z - b) ** 2
        z = fpc.hinge_scalar(a, b, gamma)
        assert obj(z) <= obj(grid).min() + 1e-6
    y = np.array([1.0, -1.0, 1.0])
    z = np.array([0.3, 2.0, 5.0])
    out = fpc.hinge_vector(y, z, 2.0)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(fpc.hinge_scalar(-1.0, 2.0, 2.0))


def test_train_evaluate_round_trip(tmp_path):
    X, y, flipped = fpc.generate_toy(1000, "global", 0.1, seed=3)
    assert X.shape == (1000, 2)
    assert len(flipped) == 100
    Xt, yt = fpc.generate_test(1000, seed=4)
    model = fpc.train(X, y, degree=9)
    assert model.sparsity == 55
    assert model.degree == 9
    report = fpc.evaluate(model, Xt, yt)
    assert report["accuracy"] > 96.0
    pred = np.asarray(model.predict(Xt))
    assert set(np.unique(pred)) <= {-1, 1}
    assert np.array_equal(pred, np.where(model.decision_values(Xt) >= 0, 1, -1))

    back = fpc.Model.from_bytes(model.to_bytes())
    assert np.array_equal(back.coefficients, model.coefficients)
    path = str(tmp_path / "m.fpc")
    model.save(path)
    assert np.array_equal(fpc.Model.load(path).decision_values(Xt), model.decision_values(Xt))


def test_trace_and_admm_against_lp():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((40, 4))
    y = np.where(rng.random(40) < 0.5, -1.0, 1.0)
    res = fpc.solve_admm(A, y, tol=1e-12, max_iters=200000)
    dual = fpc.solve_dual_lp(A, y)
    primal = np.maximum(0.0, 1 - y * (A @ res["u"])).mean()
    assert abs(primal - dual["value"]) <= 1e-6
    steps = [r["h_step_sq"] for r in fpc.solve_admm(A, y, tol=1e-300, max_iters=100)["trace"]]
    assert all(b <= a + 1e-12 for a, b in zip(steps, steps[1:]))

    X, yy, _ = fpc.generate_toy(300, "global", 0.1, seed=2)
    model, trace = fpc.train(X, yy, degree=4, return_trace=True)
    assert len(trace) == model.summary["iterations"]


def test_errors_are_typed():
    with pytest.raises(fpc.EmptyDataError):
        fpc.train(np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(fpc.FpcError):
        fpc.Model.from_bytes(b"garbage")
    with pytest.raises(fpc.ModelFormatError):
        fpc.Model.from_bytes(b"garbage")
    assert math.isclose(fpc.bayes_h(0.5), 0.5)
