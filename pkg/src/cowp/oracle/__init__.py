"""Natural-language side: prompts, verdicts, backends, action phrasing, symbolization."""

from .backends import (
    AlwaysYesBackend,
    AuthError,
    Backend,
    MockBackend,
    Oracle,
    OracleError,
    RemoteBackend,
    ReplayBackend,
    ReplayMiss,
    TransportError,
    query,
)
from .config import OracleConfig
from .exchange import ExchangeLog, OracleExchange, read_jsonl, write_jsonl
from .kb import MockKnowledgeBase
from .nl import MissingPattern, Phrasebook, action_to_nl, humanize
from .symbolize import Lexicon, Symbolized, UnmappableSituation, situation_to_predicate, symbolize_with_oracle
from .templates import (
    EmptyField,
    PromptKind,
    TemplateError,
    TooFewObjects,
    render_affordance_prompt,
    render_feasibility_prompt,
    render_selection_prompt,
)
from .verdict import NO, UNPARSEABLE, YES, Verdict, VerdictKind, parse_verdict

__all__ = [
    "AlwaysYesBackend",
    "AuthError",
    "Backend",
    "EmptyField",
    "ExchangeLog",
    "Lexicon",
    "MissingPattern",
    "MockBackend",
    "MockKnowledgeBase",
    "NO",
    "Oracle",
    "OracleConfig",
    "OracleError",
    "OracleExchange",
    "Phrasebook",
    "PromptKind",
    "RemoteBackend",
    "ReplayBackend",
    "ReplayMiss",
    "Symbolized",
    "TemplateError",
    "TooFewObjects",
    "TransportError",
    "UNPARSEABLE",
    "UnmappableSituation",
    "Verdict",
    "VerdictKind",
    "YES",
    "action_to_nl",
    "humanize",
    "parse_verdict",
    "query",
    "read_jsonl",
    "render_affordance_prompt",
    "render_feasibility_prompt",
    "render_selection_prompt",
    "situation_to_predicate",
    "symbolize_with_oracle",
    "write_jsonl",
]
