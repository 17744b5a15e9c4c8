"""End-to-end smoke test of the python bindings.

Run with the directory containing the built extension on PYTHONPATH.
"""

import numpy as np
import _smkl as smkl


def make_problem(seed=0, n=24):
    rng = np.random.default_rng(seed)
    y = np.concatenate([np.ones(n // 2), -np.ones(n // 2)])
    X = 2.0 * y[:, None] + 0.4 * rng.standard_normal((n, 2))
    specs = [smkl.KernelSpec.linear(), smkl.KernelSpec.rbf(0.5),
             smkl.KernelSpec.laplacian(0.3)]
    bank = smkl.build_bank(specs, X)
    return bank, y, X, specs


def test_gssp_projection():
    beta = smkl.gssp_project(np.array([0.5, 0.3, 0.2]), 2)
    assert np.allclose(beta, [0.6, 0.4, 0.0])


def test_dual_solver():
    bank, y, _, _ = make_problem()
    sol = smkl.solve_dual(bank[0], y, 1.0)
    assert sol.kkt_residual <= 1e-6
    assert sol.alpha.min() >= -1e-12
    assert sol.alpha.max() <= 1.0 + 1e-12
    assert abs(np.dot(y, sol.alpha)) <= 1e-8


def test_fit_and_objective():
    bank, y, _, _ = make_problem()
    res = smkl.fit(bank, y, C=10.0, lambda_=0.1, k0=1)
    beta = res.beta
    assert beta.shape == (3,)
    assert abs(beta.sum() - 1.0) <= 1e-10
    assert (beta > 1e-12).sum() <= 1
    assert res.iterations_run >= 1
    assert len(res.objective_trace) == res.iterations_run


def test_relaxation_bounds_and_warm_start():
    bank, y, _, _ = make_problem(n=16)
    lo = smkl.relaxation_lower_bound(bank, y, C=1.0, lambda_=0.5, k0=2,
                                     level="soc-basis")
    hi = smkl.relaxation_lower_bound(bank, y, C=1.0, lambda_=0.5, k0=2,
                                     level="sdp-full")
    assert lo.status == "optimal"
    assert hi.status == "optimal"
    assert lo.lower_bound <= hi.lower_bound + 1e-6
    g = smkl.global_enumerate(bank, y, C=1.0, lambda_=0.5, k0=2)
    assert hi.lower_bound <= g.objective + 1e-6
    warm = smkl.extract_warm_start(hi, 2)
    assert abs(warm.sum() - 1.0) <= 1e-9
    res = smkl.fit(bank, y, C=1.0, lambda_=0.5, k0=2, warm_start=warm)
    assert res.best_objective >= hi.lower_bound - 1e-6


def test_gap_report():
    gap = smkl.certify_gap(16.78, 14.69)
    assert abs(gap.gap_over_lower - 14.23) <= 0.01
    try:
        smkl.certify_gap(5.0, 5.1)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("inverted bounds must raise")


def test_prediction_roundtrip():
    bank, y, X, specs = make_problem()
    res = smkl.fit(bank, y, C=10.0, lambda_=0.1, k0=2)
    cross = smkl.combine_cross(specs, res.beta, X, X)
    f = smkl.decision_values(res.alpha, res.bias, cross, y)
    assert (np.sign(f) == y).all()


def test_input_errors_are_value_errors():
    bank, y, _, _ = make_problem()
    try:
        smkl.fit(bank, y, C=-1.0, lambda_=0.1, k0=1)
    except ValueError:
        pass
    else:
        raise AssertionError("bad config must raise ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
    print("python smoke tests passed")
