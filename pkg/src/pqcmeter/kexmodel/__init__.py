"""Parameter validation and handshake model for the hybrid SSH key exchange."""

from __future__ import annotations

from dataclasses import dataclass

from .handshake import (
    CLASSICAL_KEX,
    HYBRID_KEX,
    STEP_ORDER,
    AlgorithmPolicy,
    HandshakeTranscript,
    NegotiationFailure,
    Step,
    hybrid_combine,
    negotiate,
    simulate_handshake,
)
from .numtheory import euler_criterion, is_probable_prime, trinomial_irreducible


@dataclass(frozen=True)
class SntrupParams:
    p: int = 761
    q: int = 4591
    w: int = 286


@dataclass(frozen=True)
class CurveParams:
    modulus: int = 2 ** 255 - 19
    A: int = 486662


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    subject: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def validate_sntrup_params(params: SntrupParams = SntrupParams(), irreducibility: bool = True) -> ValidationReport:
    """Check p and q prime, 0 < w < p, and irreducibility of x^p - x - 1 over GF(q).

    The irreducibility check takes a few seconds at the real parameters; it is
    skipped (reported as not run) when either modulus fails primality.
    """
    p_ok = is_probable_prime(params.p)
    q_ok = is_probable_prime(params.q)
    checks = [
        Check("p_prime", p_ok, f"p = {params.p}"),
        Check("q_prime", q_ok, f"q = {params.q}"),
        Check("weight_range", 0 < params.w < params.p, f"0 < w = {params.w} < p"),
    ]
    if irreducibility and p_ok and q_ok:
        irr = trinomial_irreducible(params.p, params.q)
        checks.append(Check("irreducible", irr, f"x^{params.p} - x - 1 over GF({params.q}), Frobenius test"))
    elif irreducibility:
        checks.append(Check("irreducible", False, "not run: p and q must both be prime"))
    return ValidationReport("sntrup", tuple(checks))


def validate_curve_params(params: CurveParams = CurveParams()) -> ValidationReport:
    """Check the field modulus is prime and A^2 - 4 is a non-residue modulo it."""
    mod_ok = is_probable_prime(params.modulus)
    checks = [Check("modulus_prime", mod_ok, "Miller-Rabin (64 witnesses) + strong Lucas")]
    disc = (params.A * params.A - 4) % params.modulus
    if not mod_ok or params.modulus == 2:
        checks.append(Check("a2_minus_4_nonsquare", False, "not run: modulus must be an odd prime"))
    elif disc == 0:
        checks.append(Check("a2_minus_4_nonsquare", False, "A^2 - 4 = 0 (degenerate square)"))
    else:
        e = euler_criterion(disc, params.modulus)
        checks.append(Check("a2_minus_4_nonsquare", e == params.modulus - 1,
                            "Euler criterion = p-1 (non-residue)" if e == params.modulus - 1
                            else "Euler criterion = 1 (square)"))
    return ValidationReport("curve25519", tuple(checks))


__all__ = [
    "AlgorithmPolicy", "CLASSICAL_KEX", "Check", "CurveParams", "HYBRID_KEX", "HandshakeTranscript",
    "NegotiationFailure", "STEP_ORDER", "SntrupParams", "Step", "ValidationReport", "hybrid_combine",
    "negotiate", "simulate_handshake", "validate_curve_params", "validate_sntrup_params",
]
