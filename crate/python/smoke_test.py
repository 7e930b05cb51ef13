"""Smoke test for the twoiso Python module.

Build and install first:

    cd crates/py && maturin build --release -o dist && pip install dist/twoiso-*.whl
"""

import cmath
import json

import twoiso


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def c2_example():
    e = twoiso.WeightedSpace.euclidean(2)
    v = twoiso.Operator(e, [[0, 1], [1, 0]])
    r = twoiso.theorem_verdict(v, [-2, 0], [0, 1])
    assert r.branch == "(ii)", r
    assert close(r.gamma, 0.0)
    assert r.verdict_theorem and r.verdict_oracle
    assert json.loads(r.to_json())["s_dim"] == 0
    t = v.perturb([-2, 0], [0, 1])
    assert all(abs(c) < 1e-12 for row in t.delta2().matrix for c in row)


def dirichlet():
    shift = twoiso.dirichlet_shift(12)
    assert shift.degree_growth == 1
    assert shift.space.weights[:3] == [1.0, 2.0, 3.0]
    z2 = shift.space.monomial([2])
    value, safe = shift.defect_quadratic(z2)
    assert close(value, 0.0) and safe

    # p = (e^{i pi/3} - 1) z satisfies the criterion and gives a 2-isometry
    a1 = cmath.exp(1j * cmath.pi / 3) - 1
    assert close(twoiso.pper_condition_residual([a1]), 0.0)
    t = twoiso.perturbed_dirichlet(12, [a1])
    assert t.oracle_defect() < 1e-8

    one = shift.space.monomial([0])
    t = twoiso.perturbed_dirichlet(12, [0.5, 0.5])
    value, _ = t.defect_quadratic(one)
    assert close(value, -twoiso.pper_condition_residual([0.5, 0.5]))


def bidisc():
    m = twoiso.bidisc_example_operator(6)
    s = m.space
    assert s.dim == 28
    assert m.apply(s.monomial([1, 0])) == s.monomial([0, 1])
    passed, doc = twoiso.reproduce("bidisc")
    assert passed
    assert json.loads(doc)["reports"][0]["report"]["branch_label"] == "(ii)"


def errors():
    e = twoiso.WeightedSpace.euclidean(2)
    try:
        twoiso.theorem_verdict(twoiso.Operator.identity(e), [1, 0], [0, 0])
    except ValueError as exc:
        assert "not rank one" in str(exc)
    else:
        raise AssertionError("zero v accepted")
    try:
        twoiso.reproduce("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown example accepted")


def weighted_adjoint():
    s = twoiso.WeightedSpace.custom([1.0, 2.0, 0.5])
    a = twoiso.Operator(s, [[1, 2j, 0], [0, 1, 3], [1 - 1j, 0, 2]])
    x, y = [1, 1j, 2], [0.5, -1, 1j]
    lhs = s.inner(a.apply(x), y)
    rhs = s.inner(x, a.adjoint().apply(y))
    assert abs(lhs - rhs) < 1e-12


def main():
    for check in (c2_example, dirichlet, bidisc, errors, weighted_adjoint):
        check()
        print(f"ok {check.__name__}")
    print("examples:", ", ".join(twoiso.EXAMPLES))


if __name__ == "__main__":
    main()
