"""One-class nearest-neighbour classifiers, IQR-based parameter tuning and
random-subspace / random-projection ensembles."""

from .classifier import OcnnModel, OcnnParams, OcnnScore, classify, classify_batch, jknn, nn1k, nn11, nnj1, score
from .core import RandomStream, apply_minmax, euclidean_distance, fit_minmax, knn_query
from .datasets import LabeledDataset, generate_synthetic, load_dataset, parse_csv, parse_keel
from .ensemble import EnsembleConfig, EnsembleModel, predict_majority, train_ensemble
from .evaluation import ExperimentSpec, run_experiment
from .metrics import ConfusionCounts, gmean
from .noise_filter import IqrConfig, NoiseSplit, iqr_reject
from .tuning import JkGrid, TunedParams, fit_tuned_model, make_inner_plan, optimise_jk, optimise_theta

__version__ = "0.1.0"
