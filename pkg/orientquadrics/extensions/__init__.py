"""
orientquadrics.extensions
-------------------------

Optional functionality: the JSON markup of datasets and estimates, Graphviz diagrams of factor graphs
and matplotlib plots of experiment results.
"""

from .markup import dataset_from_markup, dataset_to_markup, load_dataset, save_dataset
from .diagrams import FactorGraphDiagram
from .plotting import plot_sigma_sweep
