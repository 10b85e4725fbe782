from gossip_age.schemas.params import GameParams, CostModel
from gossip_age.schemas.topology import LinePeriodic, FullyConnected, GeneralGraph, SubscriptionProfile, Topology
from gossip_age.schemas.results import AuditEntry, BetaKind, BetaStar, EquilibriumMode, EquilibriumResult, StabilityReport, UserVerdict, Verdict
from gossip_age.schemas.simulation import NodeEstimate, SimConfig, SimMode, SimResult
