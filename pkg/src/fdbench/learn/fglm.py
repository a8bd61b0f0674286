"""Penalized functional logistic regression on B-spline basis features."""
import numpy as np

from fdbench.extract.bspline import BsignalExtractor
from fdbench.learn.base import Learner

P_CLIP = 1e-15


class FGLMConvergenceError(RuntimeError):
    """IRLS stopped without meeting the deviance tolerance."""

    def __init__(self, message, iterations, deviances):
        super().__init__(message)
        self.iterations = iterations
        self.deviances = list(deviances)


def _sigmoid(eta):
    return 0.5 * (1.0 + np.tanh(0.5 * eta))


def penalized_deviance(beta, Z, y, lam):
    """``-2 loglik + lam * |beta[1:]|^2`` for the logistic model on ``Z``."""
    p = np.clip(_sigmoid(Z @ beta), P_CLIP, 1 - P_CLIP)
    ll = np.sum(y * np.log(p) + (1 - y) * np.log1p(-p))
    return -2.0 * ll + lam * np.sum(beta[1:] ** 2)


def fit_logistic_irls(Z, y, lam, tol=1e-8, max_iter=100):
    """Ridge logistic regression by Newton steps with step halving.

    ``Z`` carries the intercept in column 0, which is not penalized.
    Returns ``(beta, n_iter, deviances)``.
    """
    n, m = Z.shape
    pen = np.full(m, lam)
    pen[0] = 0.0
    beta = np.zeros(m)
    dev = penalized_deviance(beta, Z, y, lam)
    history = [dev]
    for it in range(1, max_iter + 1):
        p = _sigmoid(Z @ beta)
        w = np.maximum(p * (1 - p), 1e-12)
        grad = Z.T @ (p - y) + pen * beta
        hess = (Z.T * w) @ Z + np.diag(pen)
        step = np.linalg.solve(hess + 1e-12 * np.eye(m), grad)
        t = 1.0
        for _ in range(30):
            cand = beta - t * step
            new_dev = penalized_deviance(cand, Z, y, lam)
            if new_dev <= dev:
                break
            t *= 0.5
        else:
            cand, new_dev = beta, dev
        beta = cand
        history.append(new_dev)
        if abs(dev - new_dev) < tol * (abs(new_dev) + 0.1):
            return beta, it, history
        dev = new_dev
    raise FGLMConvergenceError(
        f"IRLS did not converge in {max_iter} iterations (last deviance {dev:.6g})", max_iter, history)


class FGLMClassifier(Learner):
    """Logistic regression on bsignal basis features of the input curves.

    Each curve is reduced to ``knots + 3`` basis inner products (or used as
    is when ``knots`` is None), then a ridge-penalized logistic model is fit
    by IRLS. More than two classes are handled one-vs-all.
    """

    method = "fglm"

    def __init__(self, knots=10, df=None, lam=1e-3, tol=1e-8, max_iter=100):
        if not lam > 0:
            raise ValueError("ridge lambda must be positive")
        super().__init__(knots=None if knots is None else int(knots), df=df, lam=float(lam),
                         tol=float(tol), max_iter=int(max_iter))

    def _features(self, X):
        Z = X if self.basis_ is None else self.basis_.transform(X).values
        return np.column_stack([np.ones(len(Z)), Z])

    def fit(self, X, y):
        X = self._check_X(X)
        y = np.asarray(y, dtype=np.intp)
        p = self.params
        self.n_features_ = X.shape[1]
        self.basis_ = None
        if p["knots"] is not None:
            self.basis_ = BsignalExtractor(knots=p["knots"], df=p["df"]).fit(X)
        Z = self._features(X)
        classes = np.unique(y)
        if len(classes) < 2:
            raise ValueError("fglm needs at least two classes")
        targets = [classes[1]] if len(classes) == 2 else list(classes)
        coefs, self.n_iter_ = [], []
        for c in targets:
            beta, n_iter, _ = fit_logistic_irls(Z, (y == c).astype(np.float64), p["lam"], p["tol"], p["max_iter"])
            coefs.append(beta)
            self.n_iter_.append(n_iter)
        self.coef_ = np.vstack(coefs)
        self.classes_ = classes
        return self

    def predict_proba(self, X):
        """Per-class probabilities; one-vs-all scores are not renormalized."""
        self._check_fitted()
        Z = self._features(self._check_X(X))
        P = np.clip(_sigmoid(Z @ self.coef_.T), P_CLIP, 1 - P_CLIP)
        if len(self.classes_) == 2:
            return np.column_stack([1 - P[:, 0], P[:, 0]])
        return P

    def predict(self, X):
        P = self.predict_proba(X)
        if len(self.classes_) == 2:
            return self.classes_[(P[:, 1] >= 0.5).astype(np.intp)]
        return self.classes_[np.argmax(P, axis=1)]

    def get_state(self):
        return {"coef": self.coef_, "classes": self.classes_, "n_features": self.n_features_}

    def set_state(self, state):
        self.coef_ = state["coef"]
        self.classes_ = state["classes"]
        self.n_features_ = state["n_features"]
        self.basis_ = None
        if self.params["knots"] is not None:
            # the basis depends only on (knots, df, length), so refit on a placeholder
            self.basis_ = BsignalExtractor(knots=self.params["knots"], df=self.params["df"]).fit(
                np.zeros((2, self.n_features_)))
