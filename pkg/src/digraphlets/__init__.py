"""Directed graphlet census, network statistics, and node-role analysis."""

__version__ = "0.1.0"

from .catalog import GraphletCatalog, classify, get_catalog, role_orbit_sets
from .counting import census, count_frequencies, count_signatures
from .distances import dgcd, dgcm, dgdda, dgdvs, drgf, spectral_distance
from .graph import (
    DirectedGraph,
    PerturbationSpec,
    Reaction,
    TradeRecord,
    build_enzyme_network,
    build_trade_network,
    load_edge_list,
    perturb,
    save_edge_list,
)
from .models import GeneratorSpec, generate, generate_suite
from .roles import CcaModel, RoleDataset, fit_cca, predict

__all__ = [
    "__version__",
    "CcaModel",
    "DirectedGraph",
    "GeneratorSpec",
    "GraphletCatalog",
    "PerturbationSpec",
    "Reaction",
    "RoleDataset",
    "TradeRecord",
    "build_enzyme_network",
    "build_trade_network",
    "census",
    "classify",
    "count_frequencies",
    "count_signatures",
    "dgcd",
    "dgcm",
    "dgdda",
    "dgdvs",
    "drgf",
    "fit_cca",
    "generate",
    "generate_suite",
    "get_catalog",
    "load_edge_list",
    "perturb",
    "predict",
    "role_orbit_sets",
    "save_edge_list",
    "spectral_distance",
]
