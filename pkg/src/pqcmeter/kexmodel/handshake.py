"""Desk-scale model of the sntrup761x25519-sha512 hybrid key exchange.

Neither primitive is real. A hash-based toy KEM stands in for sntrup761 and
modular exponentiation stands in for x25519; what the model keeps is the
structure: two independent shared secrets, concatenated KEM-first and hashed
with SHA-512 into the session key.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

HYBRID_KEX = "sntrup761x25519-sha512@openssh.com"
CLASSICAL_KEX = "curve25519-sha256"
KEX_ALIASES = {"pqc": HYBRID_KEX, "hybrid": HYBRID_KEX, "classical": CLASSICAL_KEX}

# toy finite-field DH group standing in for Curve25519
DH_MODULUS = 2 ** 255 - 19
DH_GENERATOR = 2


class Step(enum.Enum):
    EphemeralKeyGeneration = "Ephemeral Key Generation"
    PublicKeyExchange = "Public Key Exchange"
    SharedSecretCalculation = "Shared Secret Calculation"
    CombiningAndHashing = "Combining and Hashing"
    FinalKey = "Final Key"


STEP_ORDER = tuple(Step)


class NegotiationFailure(Exception):
    def __init__(self, client: "AlgorithmPolicy", server: "AlgorithmPolicy"):
        self.client, self.server = client, server
        super().__init__(f"no common key exchange: client offers {list(client.kex)}, "
                         f"server offers {list(server.kex)}")


@dataclass(frozen=True)
class AlgorithmPolicy:
    kex: tuple[str, ...]

    def __post_init__(self):
        if not self.kex:
            raise ValueError("policy must list at least one key exchange")
        if len(set(self.kex)) != len(self.kex):
            raise ValueError("policy lists a key exchange twice")

    @classmethod
    def parse(cls, spec: str) -> "AlgorithmPolicy":
        """Comma list of identifiers; ``pqc`` and ``classical`` are shorthands."""
        names = [KEX_ALIASES.get(s.strip(), s.strip()) for s in spec.split(",") if s.strip()]
        return cls(tuple(names))

    def without(self, identifier: str) -> "AlgorithmPolicy":
        return AlgorithmPolicy(tuple(k for k in self.kex if k != identifier))


def negotiate(client: AlgorithmPolicy, server: AlgorithmPolicy) -> str | None:
    """SSH rule: the first client preference the server also supports."""
    offered = set(server.kex)
    for name in client.kex:
        if name in offered:
            return name
    return None


def hybrid_combine(secret_kem: bytes, secret_ecdh: bytes) -> bytes:
    if not secret_kem or not secret_ecdh:
        raise ValueError("both shared secrets must be non-empty")
    return hashlib.sha512(secret_kem + secret_ecdh).digest()


def _h(*parts: bytes) -> bytes:
    h = hashlib.sha512()
    for p in parts:
        h.update(len(p).to_bytes(4, "big"))
        h.update(p)
    return h.digest()


def _seed_bytes(seed: int | bytes | str) -> bytes:
    if isinstance(seed, bytes):
        return seed
    if isinstance(seed, str):
        return seed.encode()
    return seed.to_bytes((seed.bit_length() + 8) // 8, "big", signed=True)


# toy KEM: encapsulation masks a random value with a hash of the public key


def kem_keygen(seed: bytes) -> tuple[bytes, bytes]:
    sk = _h(b"kem-sk", seed)[:32]
    return sk, _h(b"kem-pk", sk)[:32]


def kem_encapsulate(pk: bytes, seed: bytes) -> tuple[bytes, bytes]:
    r = _h(b"kem-r", seed)[:32]
    mask = _h(b"kem-mask", pk)[:32]
    ct = bytes(a ^ b for a, b in zip(r, mask))
    return ct, _h(b"kem-ss", r, ct)[:32]


def kem_decapsulate(sk: bytes, ct: bytes) -> bytes:
    pk = _h(b"kem-pk", sk)[:32]
    mask = _h(b"kem-mask", pk)[:32]
    r = bytes(a ^ b for a, b in zip(ct, mask))
    return _h(b"kem-ss", r, ct)[:32]


def dh_keygen(seed: bytes) -> tuple[int, int]:
    priv = int.from_bytes(_h(b"dh-priv", seed)[:32], "big") % (DH_MODULUS - 2) + 1
    return priv, pow(DH_GENERATOR, priv, DH_MODULUS)


def dh_shared(priv: int, peer_pub: int) -> bytes:
    return pow(peer_pub, priv, DH_MODULUS).to_bytes(32, "big")


@dataclass
class HandshakeTranscript:
    negotiated_kex: str
    steps: list[tuple[Step, dict]] = field(default_factory=list)
    client_key: bytes = b""
    server_key: bytes = b""

    @property
    def final_key(self) -> bytes:
        return self.client_key

    @property
    def agreed(self) -> bool:
        return self.client_key == self.server_key and len(self.client_key) == 64

    def record(self, step: Step, **detail):
        self.steps.append((step, detail))

    def to_dict(self) -> dict:
        return {
            "negotiated_kex": self.negotiated_kex,
            "steps": [{"step": s.value, **d} for s, d in self.steps],
            "final_key": self.final_key.hex(),
            "agreed": self.agreed,
        }


def simulate_handshake(client: AlgorithmPolicy, server: AlgorithmPolicy,
                       toy_kem_seed: int | bytes | str, toy_ecdh_seed: int | bytes | str) -> HandshakeTranscript:
    """Run the five-step exchange for whatever key exchange the policies agree on.

    A hybrid negotiation hashes both secrets together; anything else hashes
    the single DH secret. Raises :class:`NegotiationFailure` when the
    policies share nothing.
    """
    chosen = negotiate(client, server)
    if chosen is None:
        raise NegotiationFailure(client, server)
    hybrid = chosen == HYBRID_KEX or chosen.startswith("sntrup761x25519")
    kem_seed, dh_seed = _seed_bytes(toy_kem_seed), _seed_bytes(toy_ecdh_seed)
    t = HandshakeTranscript(chosen)

    c_dh_priv, c_dh_pub = dh_keygen(dh_seed + b"/client")
    s_dh_priv, s_dh_pub = dh_keygen(dh_seed + b"/server")
    if hybrid:
        # the client owns the KEM key pair; the server encapsulates to it
        kem_sk, kem_pk = kem_keygen(kem_seed + b"/client")
    t.record(Step.EphemeralKeyGeneration, kem=hybrid, ecdh=True)

    if hybrid:
        ct, s_kem_secret = kem_encapsulate(kem_pk, kem_seed + b"/server")
        t.record(Step.PublicKeyExchange, client_to_server=["kem_public_key", "ecdh_public_key"],
                 server_to_client=["kem_ciphertext", "ecdh_public_key"])
    else:
        t.record(Step.PublicKeyExchange, client_to_server=["ecdh_public_key"],
                 server_to_client=["ecdh_public_key"])

    c_ecdh = dh_shared(c_dh_priv, s_dh_pub)
    s_ecdh = dh_shared(s_dh_priv, c_dh_pub)
    if hybrid:
        c_kem_secret = kem_decapsulate(kem_sk, ct)
        t.record(Step.SharedSecretCalculation, secrets=["kem", "ecdh"])
        t.record(Step.CombiningAndHashing, hash="SHA-512", order="kem || ecdh")
        t.client_key = hybrid_combine(c_kem_secret, c_ecdh)
        t.server_key = hybrid_combine(s_kem_secret, s_ecdh)
    else:
        t.record(Step.SharedSecretCalculation, secrets=["ecdh"])
        t.record(Step.CombiningAndHashing, hash="SHA-512", order="ecdh")
        t.client_key = hashlib.sha512(c_ecdh).digest()
        t.server_key = hashlib.sha512(s_ecdh).digest()
    t.record(Step.FinalKey, bits=len(t.client_key) * 8, agreed=t.client_key == t.server_key)
    return t
