"""Method registry keyed by stable method tags."""

from __future__ import annotations

from typing import Optional, Union

from stuq.core.enums import MethodTag
from stuq.core.errors import ConfigError

from .base import UQMethod
from .bootstrap import BootstrapMethod
from .mc_dropout import MCDropoutMethod
from .mis import MISMethod
from .point import PointMethod
from .quantile import QuantileMethod
from .sgnht import SGNHTMethod
from .spline_quantile import SplineQuantileMethod


class MethodRegistry:
    """Registry for managing available methods."""

    def __init__(self):
        self._methods: dict[MethodTag, UQMethod] = {}

    def register(self, method: UQMethod) -> None:
        self._methods[method.tag] = method

    def unregister(self, tag: Union[str, MethodTag]) -> None:
        self._methods.pop(MethodTag(tag), None)

    def get(self, tag: Union[str, MethodTag]) -> Optional[UQMethod]:
        try:
            return self._methods.get(MethodTag(tag))
        except ValueError:
            return None

    def require(self, tag: Union[str, MethodTag]) -> UQMethod:
        method = self.get(tag)
        if method is None:
            raise ConfigError(f"Unknown method: {tag}")
        return method

    def list_methods(self) -> list[UQMethod]:
        return list(self._methods.values())

    def __contains__(self, tag) -> bool:
        return self.get(tag) is not None

    def __len__(self) -> int:
        return len(self._methods)


def build_default_registry() -> MethodRegistry:
    registry = MethodRegistry()
    for method in (
        PointMethod(),
        BootstrapMethod(),
        QuantileMethod(),
        SplineQuantileMethod(),
        MISMethod(),
        MCDropoutMethod(),
        SGNHTMethod(),
    ):
        registry.register(method)
    return registry


METHODS = build_default_registry()
