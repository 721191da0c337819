"""Prompt assembly and response parsing for the extraction protocol.

A prompt is the rendered instruction with demonstrations inlined, a blank
line, then the query line.  Model outputs are comma-separated term lists
or the literal "No term".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from termex.corpus import SentenceRecord

__all__ = [
    "DEFAULT_INSTRUCTION_TEMPLATE",
    "DOMAIN_PLACEHOLDER",
    "DEMONSTRATIONS_PLACEHOLDER",
    "NO_TERM",
    "PromptBundle",
    "MissingPlaceholder",
    "render_instruction",
    "render_demonstration",
    "build_prompt",
    "parse_response",
]

logger = logging.getLogger(__name__)

DOMAIN_PLACEHOLDER = "[DOMAIN_NAME]"
DEMONSTRATIONS_PLACEHOLDER = "[DEMONSTRATIONS]"
NO_TERM = "No term"

DEFAULT_INSTRUCTION_TEMPLATE = """\
From the given sentence, extract terms and named entities relevant to the [DOMAIN_NAME] domain. If no relevant terms or named entities are found, return "No term".

# Guidelines:
1. Extract only the terms and named entities present in the sentence.
2. Focus solely on English terms.
3. Provide only the extracted terms and named entities or "No term", without additional commentary.
4. Use commas to separate each term and named entity.
5. Maintain the original case (e.g., lowercase, capitalized) of each term.

[DEMONSTRATIONS]"""


class MissingPlaceholder(ValueError):
    pass


@dataclass(frozen=True)
class PromptBundle:
    """Rendered prompt plus the demonstration ids it embeds."""

    query_id: str
    text: str
    demo_ids: tuple[str, ...]
    domain: str


def render_instruction(template: str, domain: str) -> str:
    """Substitute the domain literally; the demonstrations slot stays put."""
    if DOMAIN_PLACEHOLDER not in template:
        raise MissingPlaceholder(f"template lacks {DOMAIN_PLACEHOLDER}")
    if template.count(DEMONSTRATIONS_PLACEHOLDER) != 1:
        raise MissingPlaceholder(
            f"template must contain {DEMONSTRATIONS_PLACEHOLDER} exactly once"
        )
    return template.replace(DOMAIN_PLACEHOLDER, domain)


def _query_line(record: SentenceRecord) -> str:
    return f"Given sentence from the {record.domain} domain: {record.text}"


def render_demonstration(demo: SentenceRecord) -> str:
    """Two lines: the demo sentence with its own domain, then its terms.

    Terms containing commas cannot survive the comma-separated output
    protocol, so they are omitted here with a warning.
    """
    renderable = [t for t in demo.terms if "," not in t]
    if len(renderable) != len(demo.terms):
        logger.warning(
            "demo %s: omitted %d term(s) containing commas",
            demo.id, len(demo.terms) - len(renderable),
        )
    terms = ", ".join(renderable) if renderable else NO_TERM
    return f"{_query_line(demo)}\nTerms: {terms}"


def build_prompt(
    instruction: str,
    demos: Sequence[SentenceRecord],
    query: SentenceRecord,
) -> PromptBundle:
    """Inline demonstrations into the instruction and append the query line.

    ``demos`` are rendered in the order given; callers decide ordering.
    """
    block = "\n\n".join(render_demonstration(d) for d in demos)
    body = instruction.replace(DEMONSTRATIONS_PLACEHOLDER, block, 1)
    text = f"{body}\n\n{_query_line(query)}"
    return PromptBundle(
        query_id=query.id,
        text=text,
        demo_ids=tuple(d.id for d in demos),
        domain=query.domain,
    )


def parse_response(raw: str) -> set[str]:
    """Turn model output into a term set; parsing is total.

    "No term" (case-insensitive) means the empty set.  Otherwise the first
    non-empty line is split on commas, pieces are trimmed, empties dropped,
    duplicates removed; original case is preserved.
    """
    if not raw.strip():
        logger.warning("empty model response treated as no terms")
        return set()
    if raw.strip().casefold() == NO_TERM.casefold():
        return set()
    first_line = next(line for line in raw.splitlines() if line.strip())
    if first_line.strip().casefold() == NO_TERM.casefold():
        return set()
    pieces = [piece.strip() for piece in first_line.split(",")]
    return set(dict.fromkeys(p for p in pieces if p))
