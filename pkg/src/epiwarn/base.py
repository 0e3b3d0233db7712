"""Minimal estimator base class: sklearn-compatible get_params/set_params.

Keeps the model classes composable with scikit-learn tooling (grid search,
cloning, pipelines) without importing sklearn itself.
"""

from __future__ import annotations

import inspect
from typing import Any

from .exceptions import NotFitted


class BaseEstimator:
    """Parameter introspection via the ``__init__`` signature.

    Subclasses must store every constructor argument on ``self`` under the
    same name and must not mutate them during ``fit``; learned state uses a
    trailing underscore (``coef_``, ``model_``).
    """

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in self._param_names():
            value = getattr(self, name)
            out[name] = value
            if deep and hasattr(value, "get_params"):
                for sub, sub_value in value.get_params(deep=True).items():
                    out[f"{name}__{sub}"] = sub_value
        return out

    def set_params(self, **params: Any) -> "BaseEstimator":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"unknown parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def _check_fitted(self, attr: str) -> None:
        if getattr(self, attr, None) is None:
            raise NotFitted(f"{type(self).__name__} is not fitted; call fit() first")

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.get_params(deep=False).items())
        return f"{type(self).__name__}({params})"
