"""Concurrent hyperproperties of safe Petri nets via testing."""

from .compose import INDEX, PRIME, RelabelScheme, compose, compose_many, relabel
from .errors import (
    BoundRequired,
    ChpError,
    ContactError,
    ContractError,
    FiringError,
    NetError,
    ParseError,
    RelabelError,
    ResourceError,
)
from .net import TAU, Net, Transition, enabled, fire, is_contact_free, is_dead, make_net, reach, reachability_graph
from .pomset import Pomset, linearizations, pomset_iso, project
from .runs import CausalRun, causal_net_of, is_maximal, maximal_runs, pomset_of, validate_causal, validate_embedding
from .testing import Test, Verdict, check_hyper, check_trace_test, may_pass, must_pass, run_outcome
