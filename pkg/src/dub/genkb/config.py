from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from ..errors import ValidationError

# Sampling weight per relation when drawing the KB from the ground truth;
# close kin is favoured.
DEFAULT_RELATION_WEIGHTS = {
    "child": 4.0,
    "father": 3.0,
    "mother": 3.0,
    "husband": 1.5,
    "wife": 1.5,
    "brother": 1.0,
    "sister": 1.0,
    "aunt": 0.5,
    "uncle": 0.5,
    "nephew": 0.5,
    "niece": 0.5,
}


@dataclass
class GenConfig:
    seed: int = 0
    person_target: int = 100
    relation_fact_target: int = 400
    bio_fact_target: int = 300
    max_generations: int = 4
    root_generation: int = 2

    parent_prob: float = 0.7
    spouse_prob: float = 0.8
    children_prob: float = 0.9
    # success probability of the geometric law truncated to 1..max_children
    children_geom_p: float = 0.4
    max_children: int = 4
    last_name_switch_prob: float = 0.1
    same_birthplace_prob: float = 0.85

    year_min: int = 1890
    year_max: int = 2000
    root_year_mean: float = 1900.0
    generation_gap: float = 25.0
    root_year_sd: float = 5.0
    # husband's year minus wife's year
    couple_offset_mean: float = 2.0
    couple_offset_sd: float = 3.0
    couple_offset_min: int = -10
    couple_offset_max: int = 10
    # child's year minus mother's year
    child_offset_mean: float = 25.0
    child_offset_sd: float = 4.0
    child_offset_min: int = 18
    child_offset_max: int = 40
    # jobs are drawn for the decade in which a person turns this age
    job_age: int = 25

    # every relation with positive weight keeps at least this many facts
    relation_floor: int = 5
    max_retries: int = 500
    relation_weights: dict = field(default_factory=lambda: dict(DEFAULT_RELATION_WEIGHTS))

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("parent_prob", "spouse_prob", "children_prob", "children_geom_p",
                     "last_name_switch_prob", "same_birthplace_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")
        for name in ("person_target", "relation_fact_target", "bio_fact_target", "max_generations",
                     "max_children", "max_retries"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if not 1 <= self.root_generation <= self.max_generations:
            raise ValidationError("root_generation must lie within 1..max_generations")
        if self.year_min >= self.year_max:
            raise ValidationError("year_min must be below year_max")
        if self.child_offset_min < 1 or self.child_offset_min > self.child_offset_max:
            raise ValidationError("child offsets must satisfy 1 <= min <= max")
        if self.relation_floor < 0:
            raise ValidationError("relation_floor must be non-negative")
        if any(w < 0 for w in self.relation_weights.values()):
            raise ValidationError("relation weights must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GenConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)
