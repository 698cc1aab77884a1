from pydantic import BaseModel, Field
from typing import Optional, List, Dict, Any


# Result of one identity check
class CheckReport(BaseModel):
    name: str
    passed: bool
    lhs: str
    rhs: str
    details: Dict[str, Any] = Field(default_factory=dict)


# Per-tree contribution to the right side of the main identity
class TreeContribution(BaseModel):
    tree: str
    splicings: int
    value: str


class MainTheoremReport(BaseModel):
    theta: str
    gamma: str
    nu: str
    lhs_count: int
    rhs_value: str
    equal: bool
    per_tree_breakdown: List[TreeContribution] = Field(default_factory=list)


# Request body for every identity check
class VerifyRequest(BaseModel):
    theta: Optional[str] = Field(None, description="Cycle notation")
    gamma: str = Field("constant", description="'constant' or a 1-based coloring")
    nu: Optional[str] = Field(None, description="1-based theta-invariant onto labeling; default numbers cycles")
    n: Optional[int] = Field(None, ge=1, description="Degree of theta or dimension of the Gaussian vector")
    k: Optional[int] = Field(None, ge=1)
    functions: Optional[List[str]] = Field(None, description="Polynomials f_1..f_k in the plain-text grammar")
    polynomial: Optional[str] = Field(None, description="Polynomial over Sym_k in q[i,j] coordinates")
    tree: Optional[str] = Field(None, description="Spanning tree as '1-2,2-3'; default all trees")
    N: Optional[int] = Field(None, ge=1, description="Matrix size for the finite-N checks")
    override_caps: bool = False
    # sweeps
    sweep_n: Optional[List[int]] = Field(None, description="Sweep every cycle type of these even degrees")
    colorings: int = Field(0, ge=0, description="Random colorings per cycle type in a sweep")
    seed: Optional[int] = Field(None, ge=0)
    n_max: Optional[int] = Field(None, ge=1)
    k_max: Optional[int] = Field(None, ge=1)
    degree_max: Optional[int] = Field(None, ge=0)
    grid: bool = Field(False, description="Run the exhaustive monomial grid")


class VerificationSummary(BaseModel):
    check: str
    passed: bool
    reports: List[CheckReport]

    @classmethod
    def from_reports(cls, check: str, reports: List[CheckReport]) -> "VerificationSummary":
        return cls(check=check, passed=all(r.passed for r in reports), reports=reports)
