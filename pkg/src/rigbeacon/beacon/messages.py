"""On-ledger records of both beacon variants.

Each record has a canonical encoding (what gets signed and hashed) and a
JSON form (what gets written to transcript files). The receive slot is
ledger metadata: it is stamped on delivery and is neither signed nor part
of the digest.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, ClassVar

from ..encoding import Field, encode, hash_fields
from ..group import DleqProof, GroupParams, KeyPair, Signature, sign, verify_signature
from ..pvss import DealerBundle, DecryptedShare


def _sig_json(sig: Signature) -> list[int]:
    return [sig.e, sig.z]


def _sig_from(v: list[int]) -> Signature:
    return Signature(int(v[0]), int(v[1]))


class Record:
    """Mixin: signing, digests and JSON round trips for ledger records."""

    kind: ClassVar[str]
    sender: int
    signature: Signature
    slot: int | None

    def payload_fields(self) -> tuple[Field, ...]:
        raise NotImplementedError

    def payload(self) -> bytes:
        return encode(self.kind, *self.payload_fields())

    def encode(self) -> bytes:
        return self.payload() + encode(self.signature.e, self.signature.z)

    def digest(self) -> bytes:
        return hash_fields(self.encode())

    def verify(self, group: GroupParams, public: int) -> bool:
        return verify_signature(group, public, self.payload(), self.signature)

    def signed(self, group: GroupParams, kp: KeyPair):
        return replace(self, signature=sign(group, kp, self.payload()))

    def at(self, slot: int):
        return replace(self, slot=slot)

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


_UNSIGNED = Signature(0, 0)


@dataclass(frozen=True)
class CommitMessage(Record):
    kind: ClassVar[str] = "commit"

    session_id: bytes
    sender: int
    commitment: bytes
    participation_proof: Signature
    vdf_modulus: int
    vdf_difficulty: int
    vdf_input: int
    signature: Signature = _UNSIGNED
    slot: int | None = None

    def payload_fields(self) -> tuple[Field, ...]:
        return (
            self.session_id,
            self.sender,
            self.commitment,
            self.participation_proof.e,
            self.participation_proof.z,
            self.vdf_modulus,
            self.vdf_difficulty,
            self.vdf_input,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "session_id": self.session_id.hex(),
            "sender": self.sender,
            "commitment": self.commitment.hex(),
            "participation_proof": _sig_json(self.participation_proof),
            "vdf_modulus": self.vdf_modulus,
            "vdf_difficulty": self.vdf_difficulty,
            "vdf_input": self.vdf_input,
            "signature": _sig_json(self.signature),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any], slot: int | None = None) -> "CommitMessage":
        return cls(
            bytes.fromhex(d["session_id"]),
            int(d["sender"]),
            bytes.fromhex(d["commitment"]),
            _sig_from(d["participation_proof"]),
            int(d["vdf_modulus"]),
            int(d["vdf_difficulty"]),
            int(d["vdf_input"]),
            _sig_from(d["signature"]),
            slot,
        )


@dataclass(frozen=True)
class RevealMessage(Record):
    kind: ClassVar[str] = "reveal"

    session_id: bytes
    sender: int
    value: int
    nonce: bytes
    signature: Signature = _UNSIGNED
    slot: int | None = None

    def payload_fields(self) -> tuple[Field, ...]:
        return (self.session_id, self.sender, self.value, self.nonce)

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "session_id": self.session_id.hex(),
            "sender": self.sender,
            "value": self.value,
            "nonce": self.nonce.hex(),
            "signature": _sig_json(self.signature),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any], slot: int | None = None) -> "RevealMessage":
        return cls(
            bytes.fromhex(d["session_id"]),
            int(d["sender"]),
            int(d["value"]),
            bytes.fromhex(d["nonce"]),
            _sig_from(d["signature"]),
            slot,
        )


@dataclass(frozen=True)
class PrepareMessage(Record):
    kind: ClassVar[str] = "prepare"

    session_id: bytes
    sender: int
    eligibility_proof: Signature
    signature: Signature = _UNSIGNED
    slot: int | None = None

    def payload_fields(self) -> tuple[Field, ...]:
        return (self.session_id, self.sender, self.eligibility_proof.e, self.eligibility_proof.z)

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "session_id": self.session_id.hex(),
            "sender": self.sender,
            "eligibility_proof": _sig_json(self.eligibility_proof),
            "signature": _sig_json(self.signature),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any], slot: int | None = None) -> "PrepareMessage":
        return cls(
            bytes.fromhex(d["session_id"]),
            int(d["sender"]),
            _sig_from(d["eligibility_proof"]),
            _sig_from(d["signature"]),
            slot,
        )


def bundle_to_json(b: DealerBundle) -> dict[str, Any]:
    return {
        "session_id": b.session_id.hex(),
        "dealer": b.dealer,
        "m": b.m,
        "U": b.U,
        "commitments": list(b.commitments),
        "shares": list(b.shares),
        "proofs": [[p.e, p.z] for p in b.proofs],
    }


def bundle_from_json(d: dict[str, Any]) -> DealerBundle:
    return DealerBundle(
        bytes.fromhex(d["session_id"]),
        int(d["dealer"]),
        int(d["m"]),
        int(d["U"]),
        tuple(int(c) for c in d["commitments"]),
        tuple(int(y) for y in d["shares"]),
        tuple(DleqProof(int(e), int(z)) for e, z in d["proofs"]),
    )


@dataclass(frozen=True)
class BundleMessage(Record):
    kind: ClassVar[str] = "bundle"

    session_id: bytes
    sender: int
    bundle: DealerBundle
    signature: Signature = _UNSIGNED
    slot: int | None = None

    def payload_fields(self) -> tuple[Field, ...]:
        return (self.session_id, self.sender, list(self.bundle.fields()))

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "session_id": self.session_id.hex(),
            "sender": self.sender,
            "bundle": bundle_to_json(self.bundle),
            "signature": _sig_json(self.signature),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any], slot: int | None = None) -> "BundleMessage":
        return cls(
            bytes.fromhex(d["session_id"]),
            int(d["sender"]),
            bundle_from_json(d["bundle"]),
            _sig_from(d["signature"]),
            slot,
        )


@dataclass(frozen=True)
class ReconstructMessage(Record):
    """One participant's decrypted shares for every dealer, in one record."""

    kind: ClassVar[str] = "reconstruct"

    session_id: bytes
    sender: int
    shares: tuple[DecryptedShare, ...]
    signature: Signature = _UNSIGNED
    slot: int | None = None

    def payload_fields(self) -> tuple[Field, ...]:
        return (self.session_id, self.sender, [list(s.fields()) for s in self.shares])

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "session_id": self.session_id.hex(),
            "sender": self.sender,
            "shares": [[s.dealer, s.index, s.S, s.proof.e, s.proof.z] for s in self.shares],
            "signature": _sig_json(self.signature),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any], slot: int | None = None) -> "ReconstructMessage":
        shares = tuple(
            DecryptedShare(int(k), int(i), int(S), DleqProof(int(e), int(z)))
            for k, i, S, e, z in d["shares"]
        )
        return cls(
            bytes.fromhex(d["session_id"]), int(d["sender"]), shares, _sig_from(d["signature"]), slot
        )


RECORD_TYPES: dict[str, type] = {
    cls.kind: cls
    for cls in (CommitMessage, RevealMessage, PrepareMessage, BundleMessage, ReconstructMessage)
}


def record_from_json(d: dict[str, Any], slot: int | None = None) -> Record:
    try:
        cls = RECORD_TYPES[d["type"]]
    except KeyError:
        raise ValueError(f"unknown record type {d.get('type')!r}") from None
    return cls.from_json(d, slot)
