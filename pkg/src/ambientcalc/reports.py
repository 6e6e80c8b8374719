"""Certificates and JSON report serialization.

A certificate records one verified claim with an honest trust level:
``exact-pass`` only when every step was exact symbolic arithmetic,
``probabilistic-pass`` when sampling or numeric rank entered anywhere,
``fail`` always carries a concrete witness.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List

from .expr import ZeroCertificate, ZeroResult

EXACT_PASS = "exact-pass"
PROB_PASS = "probabilistic-pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
OUT_OF_SCOPE = "out-of-scope"


@dataclass
class Certificate:
    claim: str
    status: str
    mode: str = "exact"
    witness: str = ""
    seconds: float = 0.0

    def ok(self) -> bool:
        return self.status in (EXACT_PASS, PROB_PASS)

    def as_dict(self) -> Dict[str, Any]:
        d = {"claim": self.claim, "status": self.status, "mode": self.mode}
        if self.witness:
            d["witness"] = self.witness
        d["seconds"] = round(self.seconds, 3)
        return d


def from_zero(claim: str, cert: ZeroCertificate, want_zero: bool = True,
              seconds: float = 0.0) -> Certificate:
    """Certificate from a zero test (or a nonzero-witness test)."""
    if want_zero:
        if cert.result is ZeroResult.ZERO:
            status = EXACT_PASS if cert.exact else PROB_PASS
            return Certificate(claim, status, "exact" if cert.exact else "sampled",
                               seconds=seconds)
        if cert.result is ZeroResult.NONZERO:
            return Certificate(claim, FAIL, "exact", witness=cert.detail,
                               seconds=seconds)
        return Certificate(claim, INCONCLUSIVE, "sampled", witness=cert.detail,
                           seconds=seconds)
    # claim is "this is nonzero"
    if cert.result is ZeroResult.NONZERO:
        return Certificate(claim, EXACT_PASS if cert.exact else PROB_PASS,
                           "exact" if cert.exact else "sampled",
                           witness=cert.detail, seconds=seconds)
    if cert.result is ZeroResult.ZERO:
        return Certificate(claim, FAIL, "exact" if cert.exact else "sampled",
                           witness="vanishes identically", seconds=seconds)
    return Certificate(claim, INCONCLUSIVE, "sampled", witness=cert.detail,
                       seconds=seconds)


class timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0
        return False


@dataclass
class Report:
    """Deterministic JSON report; one per job."""

    job: Dict[str, Any]
    certificates: List[Certificate] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    schema: int = 1

    def add(self, cert: Certificate):
        self.certificates.append(cert)

    def ok(self) -> bool:
        return all(c.ok() for c in self.certificates)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "schema": self.schema,
            "job": self.job,
            "certificates": [c.as_dict() for c in self.certificates],
            "data": self.data,
            "ok": self.ok(),
        }

    def dumps(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
            fh.write("\n")
