from .features import FEATURE_NAMES, FeatureMatrix, row_statistics, statistical_features
from .forest import DecisionTree, Forest, ForestParams, forest_predict, train_forest
from .io import dumps_model, load_model, loads_model, save_model
from .pipeline import (
    BatchPlan,
    ProfilerModel,
    ProfilerParams,
    batch_features,
    ltlm_features,
    ltlm_train,
    make_batches,
    predict_features,
    predict_profiles,
    train_profiler,
)
from .selection import eliminate_features, elimination_scores, ks_statistic

__all__ = [
    "FEATURE_NAMES", "FeatureMatrix", "row_statistics", "statistical_features",
    "DecisionTree", "Forest", "ForestParams", "forest_predict", "train_forest",
    "dumps_model", "load_model", "loads_model", "save_model",
    "BatchPlan", "ProfilerModel", "ProfilerParams", "batch_features", "ltlm_features",
    "ltlm_train", "make_batches", "predict_features", "predict_profiles", "train_profiler",
    "eliminate_features", "elimination_scores", "ks_statistic",
]
