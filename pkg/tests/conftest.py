import random
from pathlib import Path

import pytest

from hinquery.bundle import load_bundle, load_query
from hinquery.generate import GenConfig, generate, sample_star_query

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def running_example():
    """The vulnerability/technology bundle used across the docs and tests."""
    return load_bundle(DATA / "secnet" / "nodes.tsv",
                       DATA / "secnet" / "edges.tsv",
                       DATA / "secnet" / "schema.json")


@pytest.fixture(scope="session")
def running_query():
    return load_query(DATA / "secnet" / "query_star.json")


@pytest.fixture(scope="session")
def small_world():
    """A mid-size random instance shared by tests that just need a graph."""
    return generate(GenConfig(n=400, avg_degree=6.0, seed=11))


def star_instance(seed, n=300, avg_degree=6.0, n_spec=2, kind="hierarchical"):
    """Random graph plus a star query sampled on it.

    Kept as a plain function (not a fixture) so tests can sweep seeds.
    """
    graph, schema = generate(GenConfig(n=n, avg_degree=avg_degree, seed=seed))
    rng = random.Random(seed * 7919 + 13)
    query = sample_star_query(graph, schema, rng, n_spec=n_spec, kind=kind)
    return graph, schema, query
