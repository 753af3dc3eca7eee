"""Approximate personalized PageRank by forward push plus random walks."""

from ._kernels import BACKEND
from .exact import (
    ExactPpr,
    audit_relative_error,
    ndcg_at_k,
    power_iteration,
    ppr_matrix,
    precision_at_k,
    true_topk,
)
from .graph import Graph, GraphFormatError, QueryParams, load_edge_list, out_neighbors, write_edge_list
from .index import (
    IndexFormatError,
    IndexMismatchError,
    WalkIndex,
    WalkIndexError,
    build_index,
    load_index,
    omega_max,
    query_with_index,
    save_index,
)
from .mc import mc_whole_graph
from .push import PushState, forward_push, forward_push_budgeted, forward_push_from_distribution
from .query import (
    PprEstimate,
    choose_r_max,
    global_pagerank,
    ppr_from_distribution,
    whole_graph_balanced,
    whole_graph_basic,
    whole_graph_zero_hop,
)
from .topk import BoundState, TopKResult, mc_topk, topk_bound_refine, topk_fast, update_bounds
from .walks import WalkRng, random_walk, random_walk_skip_zero_hop

__version__ = "0.1.0"
