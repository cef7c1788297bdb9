"""Simulation laboratory for an energy-efficient synchronous BFT SMR protocol.

The package bundles a deterministic discrete-event simulator for the protocol,
a k-cast hypergraph network model with physical transmission accounting,
adversary strategies, runtime safety/liveness oracles, and an analytical
energy-cost engine with comparisons against Sync HotStuff and a trusted-node
baseline.
"""

__version__ = "0.1.0"

from .chain import Block, BlockStore, GENESIS
from .energy import (
    CostExpr,
    CostTable,
    ParamVector,
    ProtocolCostModel,
    analytic_models,
    build_vector,
    eval_expr,
    f_e_bound,
    feasible_region,
    ledger_to_energy,
    nu_f_bound,
)
from .hypergraph import Hypergraph, certify_f_connectivity, generate_topology, necessary_condition
from .scenario import Scenario
from .simulation import Simulation, run_scenario

__all__ = [
    "Block",
    "BlockStore",
    "CostExpr",
    "CostTable",
    "GENESIS",
    "Hypergraph",
    "ParamVector",
    "ProtocolCostModel",
    "Scenario",
    "Simulation",
    "analytic_models",
    "build_vector",
    "certify_f_connectivity",
    "eval_expr",
    "f_e_bound",
    "feasible_region",
    "generate_topology",
    "ledger_to_energy",
    "necessary_condition",
    "nu_f_bound",
    "run_scenario",
]
