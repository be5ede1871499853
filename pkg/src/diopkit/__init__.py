"""Dioperads by generators and relations: free bases, quotients, duals and Koszul complexes."""

__version__ = "0.1.0"

# bumped whenever a sign or ordering convention changes; part of every cache key
CONVENTION_VERSION = 1
