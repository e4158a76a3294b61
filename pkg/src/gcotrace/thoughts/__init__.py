from .generators import GENERATORS, TraceError, generate_trace
from .spaces import (
    ActionThought,
    Basis,
    Direction,
    Mode,
    ProgramError,
    StateThought,
    Target,
    ThoughtProgram,
    construct_program,
    default_program,
    select_thoughts,
)
from .templates import TEMPLATES, LineTemplate, grammar_markdown, task_templates
from .trace import ThoughtLine, ThoughtTrace, render_trace
from .verify import ReplayReport, verify_trace

__all__ = [
    "GENERATORS",
    "TEMPLATES",
    "ActionThought",
    "Basis",
    "Direction",
    "LineTemplate",
    "Mode",
    "ProgramError",
    "ReplayReport",
    "StateThought",
    "Target",
    "ThoughtLine",
    "ThoughtProgram",
    "ThoughtTrace",
    "TraceError",
    "construct_program",
    "default_program",
    "generate_trace",
    "grammar_markdown",
    "render_trace",
    "select_thoughts",
    "task_templates",
    "verify_trace",
]
