from __future__ import annotations

from ..errors import UnknownRelationError
from ..kb import FAMILY_RELATIONS

_BIO_TEMPLATES = {
    "birthyear": "What is the birth year of {s}?",
    "birthplace": "What is the birthplace of {s}?",
    "job": "What is the job of {s}?",
}


def render_qa(fact) -> tuple:
    """Question and answer for a name triple ``(subject, relation, object)``."""
    s, r, o = fact
    if r in FAMILY_RELATIONS:
        return f"Who is {o} to {s}?", r.capitalize()
    if r in _BIO_TEMPLATES:
        return _BIO_TEMPLATES[r].format(s=s), str(o)
    raise UnknownRelationError(f"no question template for relation {r!r}")
