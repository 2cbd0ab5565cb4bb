import math

import numpy as np
import pytest

from subrisk import (
    DiscardPolicy,
    Model,
    ProbTable,
    SimConfig,
    discard_probability_bound,
    exact_risk,
    full_expansion,
    risk_difference,
    simulate_paths,
    simulate_risk,
    submodel_expansion,
    validate_table,
)
from subrisk.datasets import breast_cancer, uniform_table
from subrisk.errors import AllDiscardedError, TooLargeError, ValidationError
from subrisk.montecarlo import PathRequest

from helpers import POLICY_NAMES, SMALL, small_cases, oracle_exact_risk

@pytest.mark.parametrize("ti,model,policy", list(small_cases()))
@pytest.mark.parametrize("n", [1, 3, 7])
def test_exact_matches_enumeration_oracle(ti, model, policy, n, backend):
    m = SMALL[ti]
    want = None
    try:
        want = oracle_exact_risk(list(m.probs), m.groups, n, model is Model.SUBMODEL, POLICY_NAMES[policy])
    except ZeroDivisionError:
        with pytest.raises(AllDiscardedError):
            exact_risk(m, model, n, policy, backend=backend)
        return
    got = exact_risk(m, model, n, policy, backend=backend)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-14)


def test_exact_two_cell_values():
    m = validate_table([0.5, 0.5])
    assert exact_risk(m, "full", 2) == pytest.approx(0.5 * math.log(2), abs=1e-12)
    assert exact_risk(m, "full", 1) == pytest.approx(math.log(2), abs=1e-12)


def test_exact_too_large():
    with pytest.raises(TooLargeError):
        exact_risk(uniform_table(), "full", 100)


def test_submodel_with_singletons_is_zero(backend):
    m = ProbTable.from_groups([[0.2], [0.3], [0.5]])
    est = simulate_risk(m, "submodel", 5, SimConfig(2000, backend=backend))
    assert est.mean == 0.0
    assert exact_risk(m, "submodel", 5, backend=backend) == 0.0


def test_submodel_rejects_no_discarding():
    with pytest.raises(ValidationError):
        simulate_risk(SMALL[3], "submodel", 5, SimConfig(100, discard_policy="none"))


class TestDiscardBound:
    def test_uniform(self):
        got = discard_probability_bound(uniform_table(), 100, DiscardPolicy.SUBMODEL_GROUPS)
        assert got == pytest.approx(2 * 0.5**100, rel=1e-12)
        assert got == pytest.approx(1.58e-30, rel=5e-3)

    def test_breast_cancer(self):
        m = breast_cancer()
        got = discard_probability_bound(m, 200, "submodel-groups")
        independent = sum((1 - float(c)) ** 200 for c in m.group_sums)
        assert got == pytest.approx(independent, rel=1e-10)
        assert got == pytest.approx(0.0143, rel=0.02)

    def test_none_policy(self):
        assert discard_probability_bound(SMALL[3], 3, "none") == 0.0


class TestDeterminism:
    def test_workers_bit_identical(self):
        m = breast_cancer()
        ests = [simulate_risk(m, "submodel", 30, SimConfig(5000, seed=7, workers=w)) for w in (1, 2, 8)]
        assert ests[0] == ests[1] == ests[2]

    def test_seed_changes_result(self):
        m = SMALL[3]
        a = simulate_risk(m, "full", 10, SimConfig(2000, seed=1))
        b = simulate_risk(m, "full", 10, SimConfig(2000, seed=2))
        assert a.mean != b.mean

    def test_backends_agree(self):
        m = breast_cancer()
        for model in Model:
            a = simulate_risk(m, model, 40, SimConfig(3000, seed=3, backend="numba"))
            b = simulate_risk(m, model, 40, SimConfig(3000, seed=3, backend="numpy"))
            assert (a.kept, a.discarded) == (b.kept, b.discarded)
            assert a.mean == pytest.approx(b.mean, rel=1e-13)

    def test_path_backends_agree(self):
        m = SMALL[4]
        reqs = [PathRequest("full", 1, 30), PathRequest("submodel", 2, 30)]
        a = simulate_paths(m, reqs, SimConfig(600, seed=5, backend="numba"))
        b = simulate_paths(m, reqs, SimConfig(600, seed=5, backend="numpy"))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.kept, y.kept)
            np.testing.assert_allclose(x.mean, y.mean, rtol=1e-12)


class TestDiscarding:
    def test_all_discarded(self):
        m = SMALL[4]
        cfg = SimConfig(50, discard_policy="all-cells", max_draw_factor=5)
        with pytest.raises(AllDiscardedError):
            simulate_risk(m, "full", 1, cfg)
        with pytest.raises(AllDiscardedError):
            exact_risk(m, "full", 1, "all-cells")

    def test_accounting(self):
        m = ProbTable.from_groups([[0.05, 0.05], [0.9]])
        n = 5
        p_discard = 0.9**n + 0.1**n
        est = simulate_risk(m, "submodel", n, SimConfig(20_000, seed=11))
        assert est.kept == 20_000
        expected = est.kept * p_discard / (1 - p_discard)
        assert abs(est.discarded - expected) < 4 * math.sqrt(expected / (1 - p_discard))

    def test_simulation_matches_exact_under_discarding(self):
        m = ProbTable.from_groups([[0.05, 0.05], [0.9]])
        est = simulate_risk(m, "submodel", 5, SimConfig(50_000, seed=12))
        want = oracle_exact_risk(list(m.probs), m.groups, 5, True, "groups")
        assert abs(est.mean - want) < 4 * est.std_error


class TestPaths:
    def test_agree_with_simulate_risk(self):
        m = breast_cancer()
        (path,) = simulate_paths(m, [PathRequest("full", 40, 60)], SimConfig(20_000, seed=4))
        direct = simulate_risk(m, "full", 50, SimConfig(20_000, seed=9))
        se = math.hypot(path.std_error[10], direct.std_error)
        assert abs(path.at(50) - direct.mean) < 4 * se

    def test_agree_with_exact(self):
        m = SMALL[2]
        full, sub = simulate_paths(m, [PathRequest("full", 1, 8), PathRequest("submodel", 1, 8)], SimConfig(40_000, seed=2))
        for n in range(1, 9):
            assert abs(full.at(n) - exact_risk(m, "full", n)) < 4 * full.std_error[n - 1] + 1e-12
        # two groups cannot both be observed at n = 1
        assert sub.kept[0] == 0
        for n in range(2, 9):
            assert abs(sub.at(n) - exact_risk(m, "submodel", n)) < 4 * sub.std_error[n - 1] + 1e-12

    def test_bad_range(self):
        with pytest.raises(ValidationError):
            simulate_paths(SMALL[3], [PathRequest("full", 5, 2)])


class TestLargeSample:
    def test_first_order_difference_exact(self):
        # singleton groups: submodel risk is zero, so the difference is the full risk
        m = ProbTable.from_groups([[0.5], [0.5]])
        n = 10_000
        assert n * exact_risk(m, "full", n) == pytest.approx(risk_difference(m).a, rel=0.05)

    def test_first_order_difference_simulated(self):
        m = SMALL[3]
        n = 10_000
        cfg = SimConfig(20_000, seed=21, discard_policy="submodel-groups")
        # identical configs draw identical samples, so the difference has common random numbers
        ed = simulate_risk(m, "full", n, cfg).mean - simulate_risk(m, "submodel", n, cfg).mean
        assert n * ed == pytest.approx(risk_difference(m).a, rel=0.05)

    @pytest.mark.parametrize("model", ["full", "submodel"])
    def test_second_order_error_bounded(self, model):
        m = ProbTable.from_groups([[0.2, 0.3], [0.5]])
        e = full_expansion(m) if model == "full" else submodel_expansion(m)
        scaled = {n: n * n * abs(exact_risk(m, model, n) - e(n)) for n in (20, 40, 80, 160, 320)}
        # the error is o(1/n**2), so the scaled error shrinks
        assert scaled[320] < scaled[20]
        assert max(scaled.values()) < 1.0
