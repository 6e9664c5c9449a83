"""Ontology-aligned engineering data engine.

Model data is mapped into an RDF repository, enriched by RDFS-Plus
materialization, queried with a SPARQL subset and exposed to external
tools through model interface specifications served over HTTP.
"""

from .cvss import CvssVector, base_score, roll_up
from .engine import Engine
from .errors import DefiiError, NotFoundError, ParseError, ValidationError
from .store import MAPPED, SOURCE, Repository
from .terms import IRI, BNode, Literal, Triple

__version__ = "0.1.0"

__all__ = [
    "BNode", "CvssVector", "DefiiError", "Engine", "IRI", "Literal", "MAPPED", "NotFoundError",
    "ParseError", "Repository", "SOURCE", "Triple", "ValidationError", "base_score", "roll_up",
]
