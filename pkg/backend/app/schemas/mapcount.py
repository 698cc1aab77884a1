from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Optional, List, Dict


# Schema for a map-count request
class MapCountRequest(BaseModel):
    theta: str = Field(..., description="Permutation in 1-based cycle notation, e.g. '(1 2 3 4)'")
    gamma: str = Field("constant", description="'constant' or a 1-based comma separated coloring")
    n: Optional[int] = Field(None, ge=1, description="Degree; required when fixed points are omitted")

    @field_validator('theta')
    @classmethod
    def validate_theta(cls, v):
        """Cycle notation cannot be blank"""
        if not v.strip():
            raise ValueError('theta cannot be empty')
        return v.strip()


# Schema for count_map0 results
class MapCountReport(BaseModel):
    theta: str
    gamma: str
    n: int
    total: int = Field(..., ge=0, description="|Map(theta, gamma)|")
    planar: int = Field(..., ge=0, description="|Map_0(theta, gamma)|")
    genus_histogram: Dict[int, int] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_histogram(self):
        """Planar and total counts must agree with the histogram"""
        if self.planar != self.genus_histogram.get(0, 0):
            raise ValueError('planar count differs from genus 0 bucket')
        if self.total != sum(self.genus_histogram.values()):
            raise ValueError('total differs from histogram sum')
        return self


# Schema for the counting bound of a monochrome instance
class BoundReport(BaseModel):
    name: str
    theta: str
    lhs: str
    rhs: str
    holds: bool


# Schema for a generating-table request
class GeneratingTableRequest(BaseModel):
    shape: List[int] = Field(..., min_length=1, description="Cycle lengths n_1..n_k")
    max_orders: List[int] = Field(..., min_length=1, description="Largest multiplicity nu_i per cycle length")
    degree_cap: Optional[int] = Field(None, ge=1)

    @model_validator(mode='after')
    def check_lengths(self):
        """shape and max_orders run in parallel"""
        if len(self.shape) != len(self.max_orders):
            raise ValueError('shape and max_orders must have the same length')
        if any(n < 1 for n in self.shape) or any(v < 1 for v in self.max_orders):
            raise ValueError('cycle lengths and orders must be positive')
        return self


# One coefficient of the generating function
class GeneratingTableRow(BaseModel):
    shape: List[int]
    orders: List[int]
    degree: int
    planar: int
    coefficient: str = Field(..., description="|Map_0| / prod(nu_i!) as an exact rational")
    majorant: str = Field(..., description="Coefficient of the majorizing series")
    bound_holds: bool
