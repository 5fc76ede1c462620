"""Open-world task planning: a PDDL planner whose plans are checked and repaired with commonsense from an oracle."""

from .engine import EngineConfig, EpisodeResult, Outcome, run_episode
from .planner import Plan, PlanStatus, plan, validate_plan

__version__ = "0.1.0"

__all__ = ["EngineConfig", "EpisodeResult", "Outcome", "Plan", "PlanStatus", "plan", "run_episode", "validate_plan"]
