"""Multi-language static analysis over enriched concrete syntax trees."""

from .errors import (AmbiguousCallError, AnalysisError, DuplicateFunctionError,
                     EcstError, LanguageDetectionError, ParseError, StoreError,
                     TreeError, XmlLoadError)
from .frontends import (LanguageId, ParsedFile, detect_language, parse,
                        parse_file, tokenize)
from .tree import (ConditionPolarity, EcstNode, SourceSpan, UniversalKind,
                   count_kind, find_all, format_skeleton, make_universal,
                   skeleton, token)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousCallError", "AnalysisError", "ConditionPolarity",
    "DuplicateFunctionError", "EcstError", "EcstNode", "LanguageDetectionError",
    "LanguageId", "ParseError", "ParsedFile", "SourceSpan", "StoreError",
    "TreeError", "UniversalKind", "XmlLoadError", "count_kind",
    "detect_language", "find_all", "format_skeleton", "make_universal",
    "parse", "parse_file", "skeleton", "token", "tokenize", "__version__",
]
