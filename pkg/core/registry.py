from typing import Any, Callable, Dict, List, Mapping

from .errors import ConfigError
from .interfaces import BaseProfile

ProfileFactory = Callable[[Mapping[str, Any]], BaseProfile]


class ProfileRegistry:
    def __init__(self):
        self._factories: Dict[str, ProfileFactory] = {}

    def register(self, kind: str, factory: ProfileFactory) -> None:
        self._factories[kind] = factory

    def kinds(self) -> List[str]:
        return sorted(self._factories)

    def resolve(self, kind: str, params: Mapping[str, Any]) -> BaseProfile:
        if kind not in self._factories:
            raise ConfigError(f"Unknown profile kind: {kind}", kind=kind)
        return self._factories[kind](params)

    def from_dict(self, data: Mapping[str, Any]) -> BaseProfile:
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ConfigError("Profile spec must be an object with a 'kind' field")
        return self.resolve(str(data["kind"]).lower(), data)
