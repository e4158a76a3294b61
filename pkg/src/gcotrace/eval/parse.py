"""Pull an answer out of free text.

The answer sentence each task's traces end with is searched first (its last
occurrence wins, so a model restating intermediate results does not
confuse it).  Failing that, the last well-formed integer list(s) in the text
are used.
"""
from __future__ import annotations

import re

from ..graph import TaskKind
from ..solvers.base import Solution
from ..thoughts.templates import final_template

_LIST = r"\[\s*(?:\d+\s*(?:,\s*\d+\s*)*)?\]"
_LIST_RE = re.compile(_LIST)


def _lead_pattern(kind: TaskKind) -> re.Pattern[str]:
    lead = final_template(kind).fmt.split("{", 1)[0].strip().rstrip(":")
    words = r"\s+".join(re.escape(w) for w in lead.split())
    body = rf"({_LIST})\s*,\s*({_LIST})" if kind is TaskKind.MCS else rf"({_LIST})"
    return re.compile(rf"{words}\s*:?\s*{body}", re.IGNORECASE)


_LEADS = {kind: _lead_pattern(kind) for kind in TaskKind}


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in re.findall(r"\d+", text))


def parse_answer(kind: TaskKind, text: str) -> Solution | None:
    matches = list(_LEADS[kind].finditer(text))
    if matches:
        m = matches[-1]
        if kind is TaskKind.MCS:
            return Solution(kind, _ints(m.group(1)), _ints(m.group(2)))
        return Solution(kind, _ints(m.group(1)))
    lists = _LIST_RE.findall(text)
    if kind is TaskKind.MCS:
        if len(lists) < 2:
            return None
        return Solution(kind, _ints(lists[-2]), _ints(lists[-1]))
    if not lists:
        return None
    return Solution(kind, _ints(lists[-1]))
