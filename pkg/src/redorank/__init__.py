"""Re-ranking of search results for children in classroom settings.

Resources are scored for readability, educational alignment and
objectionability, then reordered by a boosted listwise ranker trained on a
cost-sensitive gain measure.
"""

__version__ = "0.1.0"

from .adarank import RankModel, TrainConfig, load_model, rerank, save_model, train
from .errors import ConfigError, DataError, RedorankError, ServiceError
from .metrics import Measure, cs_dcg_at_k, dcg_at_k, mrr, ncs_dcg_at_k, ndcg_at_k
from .model import FEATURE_SCHEMA, FeatureTable, JudgedList, LtrRow, Resource

__all__ = [
    "FEATURE_SCHEMA",
    "ConfigError",
    "DataError",
    "FeatureTable",
    "JudgedList",
    "LtrRow",
    "Measure",
    "RankModel",
    "RedorankError",
    "Resource",
    "ServiceError",
    "TrainConfig",
    "__version__",
    "cs_dcg_at_k",
    "dcg_at_k",
    "load_model",
    "mrr",
    "ncs_dcg_at_k",
    "ndcg_at_k",
    "rerank",
    "save_model",
    "train",
]
