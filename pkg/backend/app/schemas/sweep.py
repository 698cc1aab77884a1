from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator
import yaml

from app.core.errors import ParseError
from app.models.permutation import MapInstance
from app.schemas.mapcount import BoundReport, GeneratingTableRow
from app.schemas.verification import CheckReport


# Schema for one instance named in a sweep file
class InstanceSpec(BaseModel):
    theta: str = Field(..., description="Cycle notation")
    gamma: str = Field("constant")
    n: Optional[int] = Field(None, ge=1)
    nu: Optional[str] = Field(None, description="1-based theta-invariant onto labeling")
    override_caps: bool = False

    def to_instance(self) -> MapInstance:
        return MapInstance.parse(self.theta, self.gamma, self.n)


# Schema for a declarative sweep file
class SweepConfig(BaseModel):
    """
    A sweep file is YAML read with safe_load: flat keys, lists and an
    optional ``instances`` list of mappings. Relative output paths resolve against the
    directory holding the file.
    """

    shapes: List[List[int]] = Field(default_factory=list, description="Cycle-length shapes n_1..n_k")
    max_order: int = Field(4, ge=1, description="Largest multiplicity per cycle length")
    degree_cap: Optional[int] = Field(None, ge=1)
    workers: Optional[int] = Field(None, ge=1)
    check_bounds: bool = Field(True, description="Compare each table entry with the counting bound")
    instances: List[InstanceSpec] = Field(default_factory=list)
    json_output: Optional[Path] = None
    csv_output: Optional[Path] = None

    @model_validator(mode='after')
    def check_shapes(self):
        """Every shape is a nonempty list of positive lengths"""
        for shape in self.shapes:
            if not shape or any(m < 1 for m in shape):
                raise ValueError(f'invalid shape {shape}')
        return self

    @classmethod
    def load(cls, path: Path) -> "SweepConfig":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line, column = (mark.line + 1, mark.column + 1) if mark is not None else (1, 1)
            raise ParseError(f"bad sweep file {path}: {getattr(e, 'problem', None) or e}", text, line, column) from e
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ParseError(f"bad sweep file {path}: expected a mapping at the top level", text)
        try:
            config = cls(**data)
        except ValidationError as e:
            raise ParseError(f"bad sweep file {path}: {e.errors()[0]['msg']}", text) from e
        base = path.parent
        if config.json_output is not None and not config.json_output.is_absolute():
            config.json_output = base / config.json_output
        if config.csv_output is not None and not config.csv_output.is_absolute():
            config.csv_output = base / config.csv_output
        return config


class SweepReport(BaseModel):
    rows: List[GeneratingTableRow] = Field(default_factory=list)
    bounds: List[BoundReport] = Field(default_factory=list)
    checks: List[CheckReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            all(r.bound_holds for r in self.rows)
            and all(b.holds for b in self.bounds)
            and all(c.passed for c in self.checks)
        )
