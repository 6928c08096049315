from .educational import ConstantStub, EduScorer, LookupTable, RemoteService, s_edu
from .mixer import mixer
from .readability import ReadabilityConfig, default_readability_config, s_read

__all__ = [
    "ConstantStub",
    "EduScorer",
    "LookupTable",
    "ReadabilityConfig",
    "RemoteService",
    "default_readability_config",
    "mixer",
    "s_edu",
    "s_read",
]
