"""Legal fact extraction and aggregate statistics over court judgment corpora."""

from .corpus_store import CorpusStore, Document, MetadataRecord, Status
from .extraction import (
    ArticleRef,
    DocFacts,
    Grammar,
    Jurisdiction,
    PldCitation,
    ScmrCitation,
    analyze_document,
)
from .normalization import CaseType, JudgeRoster, LookupTable

__version__ = "0.1.0"

__all__ = [
    "ArticleRef", "CaseType", "CorpusStore", "DocFacts", "Document", "Grammar",
    "JudgeRoster", "Jurisdiction", "LookupTable", "MetadataRecord", "PldCitation",
    "ScmrCitation", "Status", "analyze_document",
]
