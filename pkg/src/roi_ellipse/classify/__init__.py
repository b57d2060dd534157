"""Binary keypoint classifiers: RBF-kernel SVM plus k-means / fuzzy c-means."""

from .svm import SvmModel, decision_function, rbf_kernel, svm_predict, svm_train
from .clustering import ClusterModel, clusters_to_labels, fcm_fit, fcm_memberships, kmeans_fit

CLASSIFIER_KINDS = ("svm", "kmeans", "fcm")

__all__ = [
    "CLASSIFIER_KINDS",
    "ClusterModel",
    "SvmModel",
    "clusters_to_labels",
    "decision_function",
    "fcm_fit",
    "fcm_memberships",
    "kmeans_fit",
    "rbf_kernel",
    "svm_predict",
    "svm_train",
]
