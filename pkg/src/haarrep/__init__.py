"""Haar graphs, Cayley digraphs and m-Cayley digraphs of finite groups, with an exact
automorphism engine, representation censuses and brute-force lemma checks."""

__version__ = "0.1.0"

from .autgroup import (aut_order, aut_plus_haar, automorphism_group, is_drr, is_grr,
                       is_haar_optimal_abelian, is_hgr, is_msr)
from .bounds import BoundReport, eval_bounds, find_n_eps
from .census import CensusReport, FamilySpec, exhaustive_census, monte_carlo_census, sample_family
from .graphs import (ColoredDigraph, SetMatrix, cayley_digraph, coset_blocks, haar_graph,
                     iota_permutation, m_cayley_digraph, odd_quotient, right_regular_action,
                     standard_double_cover)
from .groups import GroupTable, c_value, classify_group, make_group
from .oracles import OracleResult, run_all, run_oracle
from .perm import PermGroup

__all__ = [
    "BoundReport", "CensusReport", "ColoredDigraph", "FamilySpec", "GroupTable", "OracleResult",
    "PermGroup", "SetMatrix", "aut_order", "aut_plus_haar", "automorphism_group", "c_value",
    "cayley_digraph", "classify_group", "coset_blocks", "eval_bounds", "exhaustive_census",
    "find_n_eps", "haar_graph", "iota_permutation", "is_drr", "is_grr", "is_haar_optimal_abelian",
    "is_hgr", "is_msr", "m_cayley_digraph", "make_group", "monte_carlo_census", "odd_quotient",
    "right_regular_action", "run_all", "run_oracle", "sample_family", "standard_double_cover",
]
