"""Pairwise comparison prompt templates and the seven built-in task prompts."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..core import Item
from ..errors import ConfigError, ValidationError

ITEM1 = "{item1}"
ITEM2 = "{item2}"
ASPECT1 = "{aspect1}"
ASPECT2 = "{aspect2}"

_PLACEHOLDER_RE = re.compile(r"\{(?:item1|item2|aspect1|aspect2)\}")


@dataclass(frozen=True)
class PromptTemplate:
    """A comparison prompt with {item1}/{item2} slots and optional aspect slots."""

    name: str
    text: str

    def __post_init__(self):
        for slot in (ITEM1, ITEM2):
            n = self.text.count(slot)
            if n != 1:
                raise ValidationError(f"template {self.name!r}: {slot} must appear exactly once, found {n}")
        n1, n2 = self.text.count(ASPECT1), self.text.count(ASPECT2)
        if (n1, n2) not in ((0, 0), (1, 1)):
            raise ValidationError(
                f"template {self.name!r}: aspect slots must both appear exactly once or not at all"
            )

    @property
    def aspect_based(self) -> bool:
        return ASPECT1 in self.text


def render_prompt(template: PromptTemplate, a: Item | str, b: Item | str) -> str:
    """Substitute both passages (and their aspects) into the template verbatim.

    Substitution is a single non-rescanning pass, so passage text containing a
    literal placeholder string is carried through untouched.
    """
    if isinstance(a, str):
        a = Item(a)
    if isinstance(b, str):
        b = Item(b)
    if template.aspect_based:
        if a.aspect is None or b.aspect is None:
            raise ValidationError(
                f"template {template.name!r} needs an aspect for both passages"
            )
    values = {
        ITEM1: a.text,
        ITEM2: b.text,
        ASPECT1: a.aspect or "",
        ASPECT2: b.aspect or "",
    }
    return _PLACEHOLDER_RE.sub(lambda m: values[m.group(0)], template.text)


_TWITTER_TEXT = """Given two Passages, compare their sentiments with labels from ['negative', 'neutral', 'positive'].

Passage A: {item1}

Passage B: {item2}

Which Passage is more positive in terms of its sentiment?

Output Passage A or Passage B:"""

_FIVE_WAY_TEXT = """Given two Passages, compare their sentiments with labels from ['very negative', 'negative', 'neutral', 'positive', 'very positive'].

Passage A: {item1}

Passage B: {item2}

Which Passage is more positive in terms of its sentiment?

Output Passage A or Passage B:"""

_LAP14_TEXT = """Given two Passages, compare their sentiments towards their respective aspects with labels from ['negative', 'neutral', 'positive'].

Passage A: {item1} (sentiment towards {aspect1}),

Passage B: {item2} (sentiment towards {aspect2})

Which Passage is more positive in terms of its sentiment towards its aspect?

Output Passage A or Passage B:"""

_HATE_TEXT = """Given two Passages, compare their sentiments with labels from ['non-hate', 'hate'].

Passage A: {item1}

Passage B: {item2}

Which Passage is more hateful in terms of its sentiment?

Output Passage A or Passage B:"""

_OFFENSIVE_TEXT = """Given two Passages, compare their sentiments with labels from ['non-offensive', 'offensive'].

Passage A: {item1}

Passage B: {item2}

Which Passage is more offensive in terms of its sentiment?

Output Passage A or Passage B:"""

_IRONY_TEXT = """Given two Passages, compare their irony with labels from ['non_irony', 'irony'].

Passage A: {item1}

Passage B: {item2}

Which Passage is more ironic in terms of its sentiment?

Output Passage A or Passage B:"""

BUILTIN_TEMPLATES: dict[str, PromptTemplate] = {
    t.name: t
    for t in (
        PromptTemplate("twitter", _TWITTER_TEXT),
        PromptTemplate("sst5", _FIVE_WAY_TEXT),
        PromptTemplate("yelp5", _FIVE_WAY_TEXT),
        PromptTemplate("lap14", _LAP14_TEXT),
        PromptTemplate("hate", _HATE_TEXT),
        PromptTemplate("offensive", _OFFENSIVE_TEXT),
        PromptTemplate("irony", _IRONY_TEXT),
    )
}


def get_template(name_or_path: str) -> PromptTemplate:
    """Resolve a built-in template by name, or load one from a UTF-8 file."""
    if name_or_path in BUILTIN_TEMPLATES:
        return BUILTIN_TEMPLATES[name_or_path]
    path = Path(name_or_path)
    if path.is_file():
        return PromptTemplate(path.stem, path.read_text(encoding="utf-8"))
    raise ConfigError(
        f"unknown template {name_or_path!r}; built-ins: {', '.join(sorted(BUILTIN_TEMPLATES))}"
    )
