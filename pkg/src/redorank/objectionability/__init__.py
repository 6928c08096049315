from .features import (
    CATEGORIES,
    FEATURE_NAMES,
    ObjFeatures,
    TermLists,
    default_term_lists,
    extract_obj_features,
    features_from_terms,
    misspelling_coverage,
    misspelling_prevalence,
    term_coverage,
    term_prevalence,
)
from .forest import Forest, ForestParams, Tree, load_forest, s_bad, save_forest, train_forest

__all__ = [
    "CATEGORIES",
    "FEATURE_NAMES",
    "Forest",
    "ForestParams",
    "ObjFeatures",
    "TermLists",
    "Tree",
    "default_term_lists",
    "extract_obj_features",
    "features_from_terms",
    "load_forest",
    "misspelling_coverage",
    "misspelling_prevalence",
    "s_bad",
    "save_forest",
    "term_coverage",
    "term_prevalence",
    "train_forest",
]
