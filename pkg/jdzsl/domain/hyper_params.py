#!/usr/bin/env python3
"""
HyperParams - every scalar the training and prediction steps use
"""
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Optional

from .errors import DataValidationError
from .sparse_opt import FistaOptions

EMBEDDINGS = ("tsne", "identity")

# config key -> field name, for keys that are not valid identifiers
_CONFIG_ALIASES = {"lambda": "lambda_"}


@dataclass(frozen=True)
class HyperParams:
    lambda_: float = 0.1
    gamma: float = 0.1
    rho: float = 1.0
    r: int = 64
    outer_iters: int = 30
    fista_max_iter: int = 500
    fista_tol: float = 1e-7
    aaw_max_iter: int = 100
    aaw_step: Optional[float] = None
    knn_k: int = 10
    lp_alpha: float = 0.99
    tsne_perplexity: Optional[float] = None
    tsne_iters: int = 1000
    seed: int = 0
    dz_sweeps: int = 5
    dz_steps: int = 10
    embedding: str = "tsne"

    def __post_init__(self):
        self._check(self.lambda_ >= 0, "lambda must be >= 0")
        self._check(self.gamma >= 0, "gamma must be >= 0")
        self._check(self.rho > 0, "rho must be > 0")
        self._check(self.r >= 1, "r must be >= 1")
        self._check(self.outer_iters >= 0, "outer_iters must be >= 0")
        self._check(self.fista_max_iter >= 1, "fista_max_iter must be >= 1")
        self._check(self.fista_tol >= 0, "fista_tol must be >= 0")
        self._check(self.aaw_max_iter >= 0, "aaw_max_iter must be >= 0")
        self._check(self.aaw_step is None or self.aaw_step > 0, "aaw_step must be > 0")
        self._check(self.knn_k >= 1, "knn_k must be >= 1")
        self._check(0.0 < self.lp_alpha < 1.0, "lp_alpha must lie in (0, 1)")
        self._check(self.tsne_perplexity is None or self.tsne_perplexity > 0,
                    "tsne_perplexity must be > 0")
        self._check(self.tsne_iters >= 0, "tsne_iters must be >= 0")
        self._check(self.dz_sweeps >= 1, "dz_sweeps must be >= 1")
        self._check(self.dz_steps >= 1, "dz_steps must be >= 1")
        self._check(self.embedding in EMBEDDINGS, f"embedding must be one of {EMBEDDINGS}")

    def _check(self, condition: bool, message: str) -> None:
        if not condition:
            raise DataValidationError(f"{message} (got {self})")

    @property
    def l1_weight(self) -> float:
        """The lambda/r factor shared by every LASSO subproblem"""
        return self.lambda_ / self.r

    @property
    def fista_options(self) -> FistaOptions:
        return FistaOptions(max_iter=self.fista_max_iter, tol=self.fista_tol)

    def with_overrides(self, **changes: Any) -> "HyperParams":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        inverse = {v: k for k, v in _CONFIG_ALIASES.items()}
        return {inverse.get(f.name, f.name): getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "HyperParams":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in values.items():
            name = _CONFIG_ALIASES.get(key, key)
            if name not in known:
                raise DataValidationError(f"Unknown hyper-parameter: {key}")
            kwargs[name] = value
        return cls(**kwargs)

    @classmethod
    def from_config(cls, config_loader) -> "HyperParams":
        """
        Args:
            config_loader: ConfigLoader holding a "model" section
        """
        section = config_loader.get("model", {}) or {}
        return cls.from_dict(section)
