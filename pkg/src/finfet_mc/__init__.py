"""Link-level model of a molecular communication channel with a FinFET receiver."""

__version__ = "0.1.0"

from .params import Bundle, defaults, load_config, validate  # noqa: E402

__all__ = ["Bundle", "defaults", "load_config", "validate", "__version__"]
