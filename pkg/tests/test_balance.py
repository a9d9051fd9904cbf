import numpy as np
import pytest

from tandem_polling import (
    InvalidParams,
    NetworkParams,
    Phase,
    SubsystemSpace,
    balance_residuals,
    residual_against_balance_equations,
    solve_subsystem,
)

S1, S2, U1, U2 = Phase.S1, Phase.S2, Phase.U1, Phase.U2


@pytest.fixture
def p():
    return NetworkParams(0.8, 1.1, 3.0, 2.2, 2.6, 3.7, 4.5, 5.5, 4, 3)


def solved(params, strategy, product):
    sol = solve_subsystem(params, strategy, product)
    return sol.dist.probabilities, SubsystemSpace(params, product)


class TestResiduals:
    @pytest.mark.parametrize("strategy", ["SP", "OP"])
    @pytest.mark.parametrize("product", [1, 2])
    def test_solved_distribution_balances(self, p, strategy, product):
        pi, _ = solved(p, strategy, product)
        assert residual_against_balance_equations(p, strategy, product, pi) <= 1e-10

    def test_perturbation_detected(self, p):
        pi, _ = solved(p, "SP", 1)
        bumped = pi.copy()
        bumped[17] += 0.01
        assert residual_against_balance_equations(p, "SP", 1, bumped) > 1e-4

    def test_every_state_checked(self, p):
        pi, space = solved(p, "OP", 2)
        for k in (0, space.size // 2, space.size - 1):
            bumped = pi.copy()
            bumped[k] += 0.01
            assert np.abs(balance_residuals(p, "OP", 2, bumped)).max() > 1e-4

    def test_dimension_mismatch(self, p):
        with pytest.raises(InvalidParams):
            residual_against_balance_equations(p, "SP", 1, np.ones(5) / 5)


class TestPublishedEquationForms:
    """A handful of the interior equations written out literally."""

    def setup_method(self):
        self.p = NetworkParams(0.8, 1.1, 3.0, 2.2, 2.6, 3.7, 4.5, 5.5, 4, 3)

    def _pi(self, strategy):
        pi, space = solved(self.p, strategy, 1)
        return lambda a, b, ph, c: pi[space.index_of((a, b, ph, c))]

    def test_sp_interior_service_state(self):
        p, pi = self.p, self._pi("SP")
        a, b, c = 2, 1, 1
        lhs = (p.lambda1 + p.lambda2 + p.mu11 + p.mu12) * pi(a, b, U1, c)
        rhs = (
            p.mus1 * pi(a, b, S1, c)
            + p.lambda1 * pi(a - 1, b, U1, c)
            + p.lambda2 * pi(a, b - 1, U1, c)
            + p.mu11 * pi(a + 1, b, U1, c - 1)
            + p.mu12 * pi(a, b, U1, c + 1)
        )
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_sp_empty_tracked_queue(self):
        p, pi = self.p, self._pi("SP")
        lhs = (p.lambda1 + p.lambda2 + p.mu11) * pi(1, 0, U1, 0)
        rhs = p.mus1 * pi(1, 0, S1, 0) + p.mu12 * pi(1, 0, U1, 1)
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_op_first_service_state(self):
        p, pi = self.p, self._pi("OP")
        c = 2
        lhs = (p.lambda1 + p.lambda2 + p.mu11) * pi(1, 0, U1, c)
        rhs = p.mus1 * pi(1, 0, S1, c) + p.mu11 * pi(2, 0, U1, c - 1)
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_op_interior_service_state(self):
        p, pi = self.p, self._pi("OP")
        a, b, c = 3, 2, 1
        lhs = (p.lambda1 + p.lambda2 + p.mu11) * pi(a, b, U1, c)
        rhs = (
            p.mus1 * pi(a, b, S1, c)
            + p.lambda1 * pi(a - 1, b, U1, c)
            + p.lambda2 * pi(a, b - 1, U1, c)
            + p.mu11 * pi(a + 1, b, U1, c - 1)
        )
        assert lhs == pytest.approx(rhs, abs=1e-13)

    @pytest.mark.parametrize("strategy", ["SP", "OP"])
    def test_idle_setup_state(self, strategy):
        # left side read as pi(0, 0, S1, l12) for every l12
        p, pi = self.p, self._pi(strategy)
        for c in range(p.n1 + 1):
            lhs = (p.lambda1 + p.lambda2 + p.mus1) * pi(0, 0, S1, c)
            rhs = p.mus2 * pi(0, 0, S2, c) + p.mu21 * pi(0, 1, U2, c)
            assert lhs == pytest.approx(rhs, abs=1e-13)
