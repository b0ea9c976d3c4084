"""scikit-learn compatible wrappers over the functional modules.

These are thin adapters so the encoder, energy landscapes and relaxation can
sit inside a ``Pipeline`` or be tuned with ``get_params``/``set_params``. The
functional API remains the primary interface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import gf2
from .boltzmann import BoltzmannParams, bm_energy, bm_log_partition, syndrome_energy
from .circulant import ExponentMatrix
from .codes import RaCode, ra_build, ra_encode
from .equilibrium import ChargeSystem, Circle, relax
from .exceptions import DomainError


def _binary_rows(X, n_features=None):
    X = check_array(X, dtype=np.int64)
    if X.size and not np.isin(X, (0, 1)).all():
        raise DomainError("inputs must be binary")
    if n_features is not None and X.shape[1] != n_features:
        raise DomainError(f"expected {n_features} columns, got {X.shape[1]}")
    return X


class RAEncoder(TransformerMixin, BaseEstimator):
    """Encode message rows with a repeat-accumulate code.

    Parameters
    ----------
    exponent : ExponentMatrix
        Shifts of the information part; the accumulator part is implied.
    """

    def __init__(self, exponent: ExponentMatrix | None = None):
        self.exponent = exponent

    def fit(self, X=None, y=None):
        if not isinstance(self.exponent, ExponentMatrix):
            raise DomainError("exponent must be an ExponentMatrix")
        self.code_ = RaCode(self.exponent)
        self.H_ = ra_build(self.code_)
        self.n_features_in_ = self.code_.message_length
        return self

    def transform(self, X):
        check_is_fitted(self, "code_")
        X = _binary_rows(X, self.n_features_in_)
        return np.array([ra_encode(self.code_, row) for row in X], dtype=np.uint8).reshape(len(X), -1)


class SyndromeEnergy(TransformerMixin, BaseEstimator):
    """Map binary words to their count of unsatisfied checks."""

    def __init__(self, H=None):
        self.H = H

    def fit(self, X=None, y=None):
        self.H_ = gf2.as_binary(self.H)
        self.n_features_in_ = self.H_.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "H_")
        X = _binary_rows(X, self.n_features_in_)
        return np.asarray(syndrome_energy(self.H_, X)).reshape(-1, 1)


class BoltzmannDensity(BaseEstimator):
    """Exact Gibbs density of a fixed Boltzmann machine.

    ``fit`` does no learning; it validates the parameters and caches ``log Z``.
    """

    def __init__(self, biases=None, weights=None, max_units: int = 24):
        self.biases = biases
        self.weights = weights
        self.max_units = max_units

    def fit(self, X=None, y=None):
        self.params_ = BoltzmannParams(self.biases, self.weights)
        self.log_partition_ = bm_log_partition(self.params_, self.max_units)
        self.n_features_in_ = self.params_.N
        return self

    def score_samples(self, X):
        """Log-probability of each configuration row."""
        check_is_fitted(self, "params_")
        X = _binary_rows(X, self.n_features_in_)
        return -bm_energy(self.params_, X) - self.log_partition_

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))


class CircleRelaxer(TransformerMixin, BaseEstimator):
    """Relax rows of charge positions on a circle toward equilibrium.

    Each input row holds the positions of ``n`` equal charges; the output row
    holds the relaxed (sorted, reduced) positions.
    """

    def __init__(self, circumference: float = 1.0, charge: float = 1.0, step: float = 0.1,
                 max_iters: int = 10_000, tol: float = 1e-9):
        self.circumference = circumference
        self.charge = charge
        self.step = step
        self.max_iters = max_iters
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DomainError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        out = np.empty_like(X)
        self.converged_ = []
        for k, row in enumerate(X):
            sys = ChargeSystem(Circle(self.circumference), np.full(len(row), self.charge), row)
            res = relax(sys, step=self.step, max_iters=self.max_iters, tol=self.tol)
            out[k] = np.sort(res.system.positions)
            self.converged_.append(res.converged)
        return out


