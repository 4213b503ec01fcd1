"""Scikit-learn style wrappers around the allocation algorithms.

``fit(X)`` takes an :class:`Instance` or an ``n x m`` valuation array (with
the constraints given to the constructor) and stores the allocation::

    >>> import numpy as np
    >>> from fairalloc.matroid import UniformMatroid
    >>> est = CappedRoundRobin(constraints=UniformMatroid(range(3), 2))
    >>> est.fit_predict(np.array([[3, 2, 1], [3, 2, 1]])).tolist()
    [0, 1, 0]
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .algorithms import solve
from .fairness import fairness_report
from .validation import check_instance, check_order


class BaseAllocator(BaseEstimator):
    """Common fit/predict logic; subclasses set ``_algorithm``."""

    _algorithm = None

    def __init__(self, constraints=None, order=None, verify=False):
        self.constraints = constraints
        self.order = order
        self.verify = verify

    def _solve(self, inst):
        return solve(inst, self._algorithm, order=check_order(self.order, inst.n), verify=self.verify)

    def fit(self, X, y=None):
        inst = check_instance(X, self.constraints)
        sol = self._solve(inst)
        self.instance_ = inst
        self.allocation_ = sol.allocation
        self.algorithm_ = sol.algorithm
        self.guarantee_ = sol.guarantee
        self.trace_ = sol.trace
        self.labels_ = np.array(sol.allocation.owners(inst.m))
        self.n_agents_, self.n_items_ = inst.n, inst.m
        return self

    def predict(self, X=None):
        """Owner of each item in the fitted allocation."""
        check_is_fitted(self, "labels_")
        return self.labels_

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def transform(self, X=None):
        """``n x m`` 0/1 assignment matrix of the fitted allocation."""
        check_is_fitted(self, "labels_")
        out = np.zeros((self.n_agents_, self.n_items_), dtype=int)
        for g, i in enumerate(self.labels_):
            if i >= 0:
                out[i, g] = 1
        return out

    def report(self, pareto=False):
        check_is_fitted(self, "allocation_")
        return fairness_report(self.allocation_, self.instance_, pareto=pareto)


class AutoAllocator(BaseAllocator):
    """Dispatches to the strongest algorithm applicable to the instance."""


class CappedRoundRobin(BaseAllocator):
    _algorithm = "crr"


class BackAndForthCRR(BaseAllocator):
    _algorithm = "back_and_forth_crr"


class PerCategoryCRR(BaseAllocator):
    _algorithm = "per_category_crr"


class PerCategoryRR(BaseAllocator):
    _algorithm = "per_category_rr"


class IteratedPriorityMatching(BaseAllocator):
    _algorithm = "iterated_priority_matching"


class IteratedSwaps(BaseAllocator):
    _algorithm = "iterated_swaps"


class CutAndChoose(BaseAllocator):
    _algorithm = "cut_and_choose_two_agents"


class RRSquared(BaseAllocator):
    _algorithm = "rr_squared"

    def __init__(self, constraints=None, first=0, verify=False):
        self.constraints = constraints
        self.first = first
        self.verify = verify

    def _solve(self, inst):
        other = 1 - self.first
        return solve(inst, self._algorithm, order=[self.first, other], verify=self.verify)
