"""Python bindings for the radars search core."""

import csv
import io
import json

from ._radars import RadarsError, aops, reward, space_size
from . import _radars

__all__ = [
    "RadarsError",
    "aops",
    "brute_force",
    "estimate_memory",
    "pareto",
    "reward",
    "search",
    "space_size",
]


def estimate_memory(space_path, eta=2.0, theta=2.0, batch=32.0, bytes_per_value=4.0, p=6):
    """Modeled SuperNet memory of a search space as a dict."""
    return json.loads(_radars.estimate_memory_json(space_path, eta, theta, batch, bytes_per_value, p))


def brute_force(space_path, surrogate_seed=0, interaction=0.0, alpha=0.5, beta=0.0, gamma=1e9, limit=1000000):
    """Every architecture ranked by reward, best first."""
    text = _radars.brute_force_csv(space_path, surrogate_seed, interaction, alpha, beta, gamma, limit)
    return list(csv.DictReader(io.StringIO(text)))


def pareto(pool_paths):
    return list(csv.DictReader(io.StringIO(_radars.pareto_csv(list(pool_paths)))))


def search(config_path, out_dir=None, seed=None, pipelined=False):
    """Runs a full search and returns the summary of the best architecture."""
    return json.loads(_radars.search_json(config_path, out_dir, seed, pipelined))
