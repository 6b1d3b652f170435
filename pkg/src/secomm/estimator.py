"""Estimator-style front end so the solver composes with scikit-learn
tooling (get_params/set_params, clone, pipelines over scenario batches)."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .scenario import Allocation, Scenario
from .solver import SolverConfig, check_feasible, resource_allocation


def validate_scenario(scenario) -> Scenario:
    """Input-validation helper: type and invariant checks with readable errors."""
    if not isinstance(scenario, Scenario):
        raise TypeError(f"expected a Scenario, got {type(scenario).__name__}")
    p_min = scenario.p_min()
    if float(np.sum(p_min)) > scenario.p_total * (1 + 1e-9):
        raise ValueError("sum of per-user minimum powers exceeds the power budget")
    for i, prof in enumerate(scenario.users):
        if prof.cost.p_min < prof.link.min_power_threshold:
            raise ValueError(
                f"user {i}: p_min {prof.cost.p_min:.6g} W is below the secrecy threshold "
                f"{prof.link.min_power_threshold:.6g} W"
            )
    return scenario


class SecureResourceAllocator(BaseEstimator):
    """Joint power/bandwidth/size allocator with an estimator interface.

    Hyperparameters mirror the solver configuration; ``fit`` runs the full
    optimization on one scenario and exposes the result through fitted
    attributes (``allocation_``, ``metrics_``, ``trace_``, ``converged_``).

    Parameters
    ----------
    eps0 : float
        Outer convergence tolerance on the decision vector.
    k_max, j_max : int
        Outer and inner iteration caps.
    bisect_tol : float
        Relative tolerance of every bisection.
    bisect_max_iter : int
        Iteration cap of every bisection.
    """

    def __init__(self, eps0: float = 1e-4, k_max: int = 20, j_max: int = 30,
                 bisect_tol: float = 1e-10, bisect_max_iter: int = 200):
        self.eps0 = eps0
        self.k_max = k_max
        self.j_max = j_max
        self.bisect_tol = bisect_tol
        self.bisect_max_iter = bisect_max_iter

    def _config(self) -> SolverConfig:
        return SolverConfig(eps0=self.eps0, k_max=self.k_max, j_max=self.j_max,
                            i_max=self.k_max, bisect_tol=self.bisect_tol,
                            bisect_max_iter=self.bisect_max_iter)

    def fit(self, scenario: Scenario, y=None, init: Allocation | None = None):
        """Solve the scenario; y is ignored (present for API compatibility)."""
        scenario = validate_scenario(scenario)
        result = resource_allocation(scenario, self._config(), init=init)
        self.scenario_ = scenario
        self.allocation_ = result.allocation
        self.metrics_ = result.metrics
        self.trace_ = result.trace
        self.converged_ = result.converged
        self.n_iter_ = result.n_outer
        self.objective_ = result.metrics.objective
        return self

    def _check_fitted(self):
        if not hasattr(self, "allocation_"):
            raise NotFittedError("this allocator is not fitted yet; call fit(scenario) first")

    def predict(self, scenario: Scenario | None = None) -> Allocation:
        """Return the fitted allocation (re-solving when a new scenario is given)."""
        if scenario is not None:
            return type(self)(**self.get_params()).fit(scenario).allocation_
        self._check_fitted()
        return self.allocation_

    def score(self, scenario: Scenario | None = None, y=None) -> float:
        """Negated objective (higher is better, per estimator convention)."""
        if scenario is not None and (not hasattr(self, "scenario_") or scenario is not self.scenario_):
            return -type(self)(**self.get_params()).fit(scenario).objective_
        self._check_fitted()
        return -self.objective_

    def feasibility_report(self):
        self._check_fitted()
        return check_feasible(self.allocation_, self.scenario_)
