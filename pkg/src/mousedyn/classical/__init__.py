"""From-scratch classical binary classifiers: KNN, random forest, RBF SVM."""

from .knn import KnnModel, knn_fit, knn_predict, knn_score
from .forest import ForestConfig, ForestModel, rf_fit, rf_predict_proba
from .svm import SvmModel, svm_decision, svm_fit, svm_score

__all__ = [
    "KnnModel", "knn_fit", "knn_predict", "knn_score",
    "ForestConfig", "ForestModel", "rf_fit", "rf_predict_proba",
    "SvmModel", "svm_decision", "svm_fit", "svm_score",
]
