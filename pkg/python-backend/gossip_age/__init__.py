"""Version age, subscription equilibria and Stackelberg sampling rates for timely gossip networks."""

__version__ = "0.1.0"
