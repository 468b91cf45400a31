"""Primitive registry."""

from __future__ import annotations

from typing import Optional

from stuq.core.errors import UnsupportedPrimitiveError

from .base import Primitive


class PrimitiveRegistry:
    """Registry for the primitives a tape may record."""

    def __init__(self):
        self._primitives: dict[str, Primitive] = {}

    def register(self, primitive: Primitive) -> None:
        """Register a primitive."""
        self._primitives[primitive.name] = primitive

    def unregister(self, name: str) -> None:
        """Unregister a primitive."""
        self._primitives.pop(name, None)

    def get(self, name: str) -> Optional[Primitive]:
        """Get a primitive by name."""
        return self._primitives.get(name)

    def require(self, name: str) -> Primitive:
        """Get a primitive by name or fail naming it."""
        primitive = self._primitives.get(name)
        if primitive is None:
            raise UnsupportedPrimitiveError(name)
        return primitive

    def names(self) -> list[str]:
        """Names of all registered primitives."""
        return sorted(self._primitives)

    def __contains__(self, name: str) -> bool:
        return name in self._primitives

    def __len__(self) -> int:
        return len(self._primitives)
