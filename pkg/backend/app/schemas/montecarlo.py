from pydantic import BaseModel, Field, field_validator
from typing import Optional, List


# Schema for a Monte-Carlo convergence run
class MonteCarloRequest(BaseModel):
    theta: str = Field(..., description="Cycle notation")
    gamma: str = Field("constant")
    n: Optional[int] = Field(None, ge=1)
    grid: Optional[List[int]] = Field(None, description="Matrix sizes N; default from settings")
    samples: Optional[int] = Field(None, gt=0, description="GUE draws per N")
    seed: Optional[int] = Field(None, ge=0)

    @field_validator('grid')
    @classmethod
    def validate_grid(cls, v):
        """Matrix sizes are positive"""
        if v is not None and (not v or any(N < 1 for N in v)):
            raise ValueError('grid must be a nonempty list of positive sizes')
        return v


class ConvergencePoint(BaseModel):
    N: int
    samples: int
    seed: int
    estimate: float
    standard_error: float


class ConvergenceReport(BaseModel):
    theta: str
    gamma: str
    seed: int
    target: int = Field(..., description="Planar count from the brute-force oracle")
    points: List[ConvergencePoint]
    within_tolerance: bool = Field(..., description="Largest N lies within 5 standard errors of the target")
    improves_with_N: bool = Field(
        ..., description="Error at the largest N does not exceed the error at the smallest N by more than 5 standard errors"
    )
