"""Canonical correlation analysis linking node wiring patterns to attributes.

Columns of both matrices are standardized to zero mean and unit variance
before fitting (constant columns are dropped and reported); the canonical
weights come from the covariance-based formulation with a small ridge on
both within-set blocks for rank safety.  The association matrix
W1 @ diag(rho) @ pinv(W2) is the multidimensional regression predicting
attributes from roles; permutation shuffling of the role rows provides
significance levels for the per-attribute prediction quality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .enrichment import benjamini_hochberg

logger = logging.getLogger(__name__)

DEFAULT_RIDGE = 1e-8


@dataclass(frozen=True)
class RoleDataset:
    roles: np.ndarray  # n x t
    attributes: np.ndarray  # n x f, same row order
    role_names: list[str] = field(default_factory=list)
    attribute_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        roles = np.asarray(self.roles, dtype=np.float64)
        attrs = np.asarray(self.attributes, dtype=np.float64)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "attributes", attrs)
        if roles.ndim != 2 or attrs.ndim != 2:
            raise ValueError("roles and attributes must be 2-D matrices")
        if roles.shape[0] != attrs.shape[0]:
            raise ValueError("roles and attributes must have equal row counts")
        if np.isnan(roles).any() or np.isnan(attrs).any():
            raise ValueError("missing values must be dropped before fitting")
        if not self.role_names:
            object.__setattr__(self, "role_names", [f"o{i}" for i in range(roles.shape[1])])
        if not self.attribute_names:
            object.__setattr__(
                self, "attribute_names", [f"a{i}" for i in range(attrs.shape[1])]
            )


@dataclass
class CcaModel:
    rho: np.ndarray  # r canonical correlations, descending
    weights_roles: np.ndarray  # t x r (zero rows at dropped columns)
    weights_attrs: np.ndarray  # f x r
    loadings_roles: np.ndarray  # t x r
    loadings_attrs: np.ndarray  # f x r
    association: np.ndarray  # t x f
    role_mean: np.ndarray
    role_std: np.ndarray  # 1.0 at dropped columns
    attr_mean: np.ndarray
    attr_std: np.ndarray
    kept_roles: np.ndarray  # bool masks of non-constant columns
    kept_attrs: np.ndarray
    role_names: list[str] = field(default_factory=list)
    attribute_names: list[str] = field(default_factory=list)

    @property
    def n_variates(self) -> int:
        return len(self.rho)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho.tolist(),
            "weights_roles": self.weights_roles.tolist(),
            "weights_attrs": self.weights_attrs.tolist(),
            "loadings_roles": self.loadings_roles.tolist(),
            "loadings_attrs": self.loadings_attrs.tolist(),
            "association": self.association.tolist(),
            "role_mean": self.role_mean.tolist(),
            "role_std": self.role_std.tolist(),
            "attr_mean": self.attr_mean.tolist(),
            "attr_std": self.attr_std.tolist(),
            "kept_roles": self.kept_roles.astype(int).tolist(),
            "kept_attrs": self.kept_attrs.astype(int).tolist(),
            "role_names": self.role_names,
            "attribute_names": self.attribute_names,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CcaModel":
        return cls(
            rho=np.asarray(d["rho"], dtype=np.float64),
            weights_roles=np.asarray(d["weights_roles"], dtype=np.float64),
            weights_attrs=np.asarray(d["weights_attrs"], dtype=np.float64),
            loadings_roles=np.asarray(d["loadings_roles"], dtype=np.float64),
            loadings_attrs=np.asarray(d["loadings_attrs"], dtype=np.float64),
            association=np.asarray(d["association"], dtype=np.float64),
            role_mean=np.asarray(d["role_mean"], dtype=np.float64),
            role_std=np.asarray(d["role_std"], dtype=np.float64),
            attr_mean=np.asarray(d["attr_mean"], dtype=np.float64),
            attr_std=np.asarray(d["attr_std"], dtype=np.float64),
            kept_roles=np.asarray(d["kept_roles"], dtype=bool),
            kept_attrs=np.asarray(d["kept_attrs"], dtype=bool),
            role_names=list(d.get("role_names", [])),
            attribute_names=list(d.get("attribute_names", [])),
        )


def _standardize(x: np.ndarray):
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    kept = std > 1e-12 * np.maximum(1.0, np.abs(mean))
    safe = np.where(kept, std, 1.0)
    return (x - mean) / safe, mean, safe, kept


def _inv_sqrt(c: np.ndarray) -> np.ndarray:
    vals, vecs = linalg.eigh(c)
    vals = np.maximum(vals, 1e-14)
    return (vecs / np.sqrt(vals)) @ vecs.T


def fit_cca(data: RoleDataset, ridge: float = DEFAULT_RIDGE) -> CcaModel:
    """Fit min(t, f) canonical variates between roles and attributes."""
    n = data.roles.shape[0]
    if n < 3:
        raise ValueError("CCA needs at least 3 rows")
    xs, x_mean, x_std, keep_x = _standardize(data.roles)
    ys, y_mean, y_std, keep_y = _standardize(data.attributes)
    if not keep_x.any() or not keep_y.any():
        raise ValueError("all columns constant on at least one side")
    dropped = (~keep_x).sum() + (~keep_y).sum()
    if dropped:
        logger.info("dropped %d constant column(s) before CCA", dropped)
    xk = xs[:, keep_x]
    yk = ys[:, keep_y]
    t, f = xk.shape[1], yk.shape[1]

    cxx = xk.T @ xk / (n - 1) + ridge * np.eye(t)
    cyy = yk.T @ yk / (n - 1) + ridge * np.eye(f)
    cxy = xk.T @ yk / (n - 1)
    ix = _inv_sqrt(cxx)
    iy = _inv_sqrt(cyy)
    u, s, vt = np.linalg.svd(ix @ cxy @ iy, full_matrices=False)
    r = min(t, f)
    rho = np.clip(s[:r], 0.0, 1.0)
    w1k = ix @ u[:, :r]
    w2k = iy @ vt[:r].T

    scores_x = xk @ w1k
    scores_y = yk @ w2k

    def loads(std_cols: np.ndarray, scores: np.ndarray) -> np.ndarray:
        sc = scores - scores.mean(axis=0)
        sc_norm = np.linalg.norm(sc, axis=0)
        cols = std_cols - std_cols.mean(axis=0)
        col_norm = np.linalg.norm(cols, axis=0)
        denom = np.outer(col_norm, sc_norm)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (cols.T @ sc) / denom
        out[~np.isfinite(out)] = 0.0
        return np.clip(out, -1.0, 1.0)

    t_full, f_full = data.roles.shape[1], data.attributes.shape[1]
    w1 = np.zeros((t_full, r))
    w1[keep_x] = w1k
    w2 = np.zeros((f_full, r))
    w2[keep_y] = w2k
    l1 = np.zeros((t_full, r))
    l1[keep_x] = loads(xk, scores_x)
    l2 = np.zeros((f_full, r))
    l2[keep_y] = loads(yk, scores_y)

    model = CcaModel(
        rho=rho,
        weights_roles=w1,
        weights_attrs=w2,
        loadings_roles=l1,
        loadings_attrs=l2,
        association=np.zeros((t_full, f_full)),
        role_mean=x_mean,
        role_std=x_std,
        attr_mean=y_mean,
        attr_std=y_std,
        kept_roles=keep_x,
        kept_attrs=keep_y,
        role_names=list(data.role_names),
        attribute_names=list(data.attribute_names),
    )
    model.association = association_matrix(model)
    return model


def association_matrix(model: CcaModel) -> np.ndarray:
    """A = W1 @ diag(rho) @ pinv(W2), on standardized kept columns.

    The pseudoinverse uses an SVD cutoff of max(t, f) * eps relative to the
    largest singular value.  Rows/columns of dropped constant variables
    are zero.
    """
    w1k = model.weights_roles[model.kept_roles]
    w2k = model.weights_attrs[model.kept_attrs]
    rcond = max(w1k.shape[0], w2k.shape[0]) * np.finfo(np.float64).eps
    a_k = w1k @ np.diag(model.rho) @ np.linalg.pinv(w2k, rcond=rcond)
    a = np.zeros((model.weights_roles.shape[0], model.weights_attrs.shape[0]))
    a[np.ix_(model.kept_roles, model.kept_attrs)] = a_k
    return a


def standardize_roles(model: CcaModel, roles: np.ndarray) -> np.ndarray:
    roles = np.asarray(roles, dtype=np.float64)
    if roles.shape[1] != model.role_mean.shape[0]:
        raise ValueError(
            f"role matrix has {roles.shape[1]} columns, model was fit with {model.role_mean.shape[0]}"
        )
    return (roles - model.role_mean) / model.role_std


def predict(model: CcaModel, roles: np.ndarray) -> np.ndarray:
    """Predict attributes from roles through the association matrix."""
    zs = standardize_roles(model, roles) @ model.association
    pred = zs * model.attr_std + model.attr_mean
    # dropped attribute columns predict their training mean
    pred[:, ~model.kept_attrs] = model.attr_mean[~model.kept_attrs]
    return pred


def prediction_correlations(
    model: CcaModel, roles: np.ndarray, attributes: np.ndarray
) -> np.ndarray:
    """Pearson correlation between predicted and observed values, per attribute."""
    pred = predict(model, roles)
    obs = np.asarray(attributes, dtype=np.float64)
    out = np.zeros(obs.shape[1])
    for j in range(obs.shape[1]):
        p = pred[:, j] - pred[:, j].mean()
        o = obs[:, j] - obs[:, j].mean()
        denom = np.linalg.norm(p) * np.linalg.norm(o)
        out[j] = float(p @ o / denom) if denom > 0 else 0.0
    return out


@dataclass
class PermutationResult:
    observed: np.ndarray  # per-attribute prediction correlation
    p_values: np.ndarray
    significant: np.ndarray  # BH-corrected decisions at q
    trials: int
    q: float

    def to_dict(self) -> dict:
        return {
            "observed": self.observed.tolist(),
            "p_values": self.p_values.tolist(),
            "significant": self.significant.astype(bool).tolist(),
            "trials": self.trials,
            "q": self.q,
        }


def permutation_significance(
    data: RoleDataset, trials: int = 1000, seed: int = 0, q: float = 0.05
) -> PermutationResult:
    """Row-shuffle null for per-attribute prediction correlations.

    p = (1 + #{null >= observed}) / (1 + trials), BH-corrected at level q.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    model = fit_cca(data)
    observed = prediction_correlations(model, data.roles, data.attributes)
    exceed = np.zeros(data.attributes.shape[1], dtype=np.int64)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        perm = rng.permutation(data.roles.shape[0])
        shuffled = RoleDataset(
            roles=data.roles[perm],
            attributes=data.attributes,
            role_names=data.role_names,
            attribute_names=data.attribute_names,
        )
        null_model = fit_cca(shuffled)
        null_r = prediction_correlations(null_model, shuffled.roles, shuffled.attributes)
        exceed += null_r >= observed
    pvals = (1.0 + exceed) / (1.0 + trials)
    return PermutationResult(
        observed=observed,
        p_values=pvals,
        significant=benjamini_hochberg(pvals, q),
        trials=trials,
        q=q,
    )


def brokerage_scores(
    model: CcaModel,
    roles: np.ndarray,
    role_sets,
    variate: int = 0,
    use_loadings: bool = False,
) -> dict[str, np.ndarray]:
    """Weighted sums of standardized orbit degrees over named orbit groups.

    Weights come from the requested canonical variate of the fitted model
    (first variate by default); `use_loadings` swaps in the loadings as the
    coefficient vector.  Requires the model to be fit on the 129 orbit
    degree columns.
    """
    coeff = model.loadings_roles if use_loadings else model.weights_roles
    if variate >= coeff.shape[1]:
        raise ValueError(f"model has only {coeff.shape[1]} variates")
    zs = standardize_roles(model, roles)
    w = coeff[:, variate]

    def score(orbits) -> np.ndarray:
        idx = np.fromiter(sorted(orbits), dtype=np.int64)
        return zs[:, idx] @ w[idx]

    return {
        "brokerage": score(role_sets.broker),
        "peripheral": score(role_sets.peripheral),
        "brokerage_import": score(role_sets.broker_import),
        "brokerage_export": score(role_sets.broker_export),
    }
