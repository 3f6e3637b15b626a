"""Fragment addressing for finite information artifacts.

Parse fragment expressions, validate anchors against indexers, and resolve
them to exact bit spans of bytes, text, PPM images, WAV audio and CSV tables.
"""

from .artifact import (
    BitSpanSet,
    Fragment,
    InformationArtifact,
    as_artifact,
    canonical_bits,
    extract,
    load_artifact,
)
from .catalog import default_registry
from .grammar import FragmentExpression, parse_expression, print_expression
from .hk import HKModel, load_model, save_model
from .indexers import Anchor, DomainSpec, IndexerSpec, Registry, apply, validate_anchor
from .resolver import ResolvedFragment, list_indexers, resolve

__all__ = [
    "Anchor", "BitSpanSet", "DomainSpec", "Fragment", "FragmentExpression", "HKModel",
    "IndexerSpec", "InformationArtifact", "Registry", "ResolvedFragment", "apply",
    "as_artifact", "canonical_bits", "default_registry", "extract", "list_indexers",
    "load_artifact", "load_model", "parse_expression", "print_expression", "resolve",
    "save_model", "validate_anchor",
]
