"""
Pass/fail records for the claims a gallery routine checks.
"""
from dataclasses import dataclass, field

import loguru

from fuzzdyn.dynamics.spaces import jsonable

logger = loguru.logger


@dataclass(frozen=True)
class Claim:
    id: str
    passed: bool
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"pass": self.passed, **jsonable(self.evidence)}


@dataclass
class ClaimReport:
    """
    Claims in the order they were checked, plus the traces behind them for
    companion CSV files.
    """
    name: str
    claims: list = field(default_factory=list)
    traces: dict = field(default_factory=dict, repr=False)

    def add(self, claim_id: str, passed: bool, /, **evidence) -> Claim:
        claim = Claim(claim_id, bool(passed), evidence)
        self.claims.append(claim)
        if claim.passed:
            logger.info(f"{self.name}: claim {claim_id} holds")
        else:
            logger.error(f"{self.name}: claim {claim_id} FAILED {jsonable(evidence)}")
        return claim

    def __getitem__(self, claim_id: str) -> Claim:
        for claim in self.claims:
            if claim.id == claim_id:
                return claim
        raise KeyError(claim_id)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def failed(self) -> list:
        return [c.id for c in self.claims if not c.passed]

    def to_dict(self) -> dict:
        return {"report": self.name, "passed": self.passed,
                "claims": {c.id: c.to_dict() for c in self.claims}}
