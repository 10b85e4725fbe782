"""
Closed-form ages at the server and at subscribers, and the AC threshold.

Every other module anchors its tables on these three values.
"""
from gossip_age.schemas.params import GameParams


def server_age(params: GameParams) -> float:
    """x_R = p_e / beta."""
    return params.p_e / params.beta


def subscriber_age(params: GameParams) -> float:
    """x_S = x_R + p_e: subscribers receive the server copy every slot."""
    return server_age(params) + params.p_e


def ac_threshold(params: GameParams) -> float:
    """L * x_S; a non-subscriber is compatible iff its age is strictly below this."""
    return params.L * subscriber_age(params)
