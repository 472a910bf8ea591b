"""Deterministic multilevel hypergraph partitioning."""

from ._detpart import (
    Hypergraph,
    ParseError,
    connectivity_metric,
    max_block_weight,
    parse_hmetis,
    parse_metis,
    partition,
    partition_hash,
    read_hypergraph,
)

__all__ = [
    "Hypergraph",
    "ParseError",
    "connectivity_metric",
    "max_block_weight",
    "parse_hmetis",
    "parse_metis",
    "partition",
    "partition_hash",
    "read_hypergraph",
]
