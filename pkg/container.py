# container.py

from typing import Any, Dict, Type


class DependencyResolutionError(Exception):
    """Raised when a service type has no registration"""
    pass


class Container:
    """
    Process-wide service registry.

    The configuration layer registers AppConfig, the logging service and the
    calibration cache register themselves, and each CLI job starts from a
    reset registry. Lookups never fall back to a default.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            instance = super().__new__(cls)
            instance._services = {}
            cls._instance = instance
        return cls._instance

    def register(self, service_type: Type, implementation: Any) -> None:
        """Bind ``implementation`` to ``service_type``, replacing an earlier binding"""
        self._services[service_type] = implementation

    def resolve(self, service_type: Type) -> Any:
        """
        Raises:
            DependencyResolutionError: If nothing is bound to the type; the
                message lists what is bound
        """
        try:
            return self._services[service_type]
        except KeyError:
            bound = ', '.join(sorted(t.__name__ for t in self._services)) or 'nothing'
            raise DependencyResolutionError(
                f"No implementation registered for {service_type.__name__} (registered: {bound})") from None

    def is_registered(self, service_type: Type) -> bool:
        return service_type in self._services

    def registrations(self) -> Dict[str, str]:
        """Service type name to implementation class name, for diagnostics"""
        return {t.__name__: type(impl).__name__ for t, impl in self._services.items()}

    def reset(self) -> None:
        self._services.clear()


container = Container()
