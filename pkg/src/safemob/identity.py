"""User accounts, MAC pseudonymization and profile encryption.

Raw MAC addresses never reach disk: they are replaced at the door by a
salted one-way digest, and profile fields are stored encrypted.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import re
import secrets
import threading
import time
from dataclasses import dataclass, asdict
from datetime import date
from pathlib import Path
from typing import Optional

from cryptography.fernet import Fernet, InvalidToken

MIN_SALT_BYTES = 16
MIN_PASSWORD_LEN = 8
SESSION_TTL_S = 24 * 3600
PBKDF2_ITERATIONS = 100_000

_MAC_RE = re.compile(r"^([0-9a-f]{2})([:-])([0-9a-f]{2})\2([0-9a-f]{2})\2([0-9a-f]{2})\2([0-9a-f]{2})\2([0-9a-f]{2})$")


class IdentityError(ValueError):
    """Malformed input to registration or pseudonymization."""


class AuthError(Exception):
    """Opaque authentication rejection (same for unknown email and bad password)."""


def canonical_mac(raw: str) -> str:
    """Normalize a MAC to lowercase colon-separated form, or raise."""
    m = _MAC_RE.match(raw.strip().lower())
    if not m:
        raise IdentityError(f"malformed MAC address {raw!r}")
    octets = [g for g in m.groups() if g != ":" and g != "-"]
    return ":".join(octets)


def pseudonymize_mac(mac: str, salt: bytes) -> str:
    """Keyed one-way digest of the canonical MAC; stable for a given salt."""
    if len(salt) < MIN_SALT_BYTES:
        raise IdentityError(f"salt must be at least {MIN_SALT_BYTES} bytes, got {len(salt)}")
    canon = canonical_mac(mac)
    return hmac.new(salt, canon.encode("ascii"), hashlib.sha256).hexdigest()


@dataclass
class UserProfile:
    name: str
    surname: str
    fathers_name: str
    date_of_birth: date
    profession: str
    family_status: str
    contact_number: str
    address: str
    driving_license: bool
    car_owner: bool

    def __post_init__(self) -> None:
        if not self.name or not self.surname:
            raise IdentityError("name and surname must be non-empty")
        if self.date_of_birth >= date.today():
            raise IdentityError("date of birth must be in the past")

    def to_json(self) -> str:
        d = asdict(self)
        d["date_of_birth"] = self.date_of_birth.isoformat()
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "UserProfile":
        d = json.loads(text)
        d["date_of_birth"] = date.fromisoformat(d["date_of_birth"])
        return cls(**d)


def _fernet(key_material: bytes) -> Fernet:
    digest = hashlib.sha256(key_material).digest()
    return Fernet(base64.urlsafe_b64encode(digest))


def encrypt_profile(profile: UserProfile, key_material: bytes) -> str:
    return _fernet(key_material).encrypt(profile.to_json().encode("utf-8")).decode("ascii")


def decrypt_profile(token: str, key_material: bytes) -> UserProfile:
    try:
        plain = _fernet(key_material).decrypt(token.encode("ascii"))
    except InvalidToken:
        raise IdentityError("profile ciphertext does not verify") from None
    return UserProfile.from_json(plain.decode("utf-8"))


@dataclass
class Account:
    user_id: str
    email: str
    password_salt: str  # hex
    password_digest: str  # hex
    profile_ciphertext: str
    pseudonyms: list[str]


class AccountStore:
    """File-backed account registry; writes serialized, reads lock-free."""

    def __init__(self, path: str | Path, mac_salt: bytes, key_material: bytes):
        if len(mac_salt) < MIN_SALT_BYTES:
            raise IdentityError(f"deployment salt must be at least {MIN_SALT_BYTES} bytes")
        self.path = Path(path)
        self.mac_salt = mac_salt
        self.key_material = key_material
        self._lock = threading.Lock()
        self._accounts: dict[str, Account] = {}
        self._by_email: dict[str, str] = {}
        self._sessions: dict[str, tuple[str, float]] = {}  # token -> (user_id, expiry)
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        doc = json.loads(self.path.read_text(encoding="utf-8"))
        for entry in doc.get("accounts", []):
            acct = Account(**entry)
            self._accounts[acct.user_id] = acct
            self._by_email[acct.email] = acct.user_id

    def _save(self) -> None:
        doc = {
            "version": 1,
            "accounts": [asdict(a) for a in self._accounts.values()],
        }
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
        os.replace(tmp, self.path)

    def register_user(self, profile: UserProfile, macs: list[str], email: str, password: str) -> str:
        if not macs:
            raise IdentityError("at least one MAC required")
        if "@" not in email:
            raise IdentityError(f"invalid email {email!r}")
        if len(password) < MIN_PASSWORD_LEN:
            raise IdentityError(f"password must be at least {MIN_PASSWORD_LEN} characters")
        pseudonyms = [pseudonymize_mac(m, self.mac_salt) for m in macs]
        with self._lock:
            if email in self._by_email:
                raise IdentityError(f"email {email!r} already registered")
            user_id = secrets.token_hex(8)
            pw_salt = secrets.token_bytes(16)
            digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), pw_salt, PBKDF2_ITERATIONS)
            acct = Account(
                user_id=user_id,
                email=email,
                password_salt=pw_salt.hex(),
                password_digest=digest.hex(),
                profile_ciphertext=encrypt_profile(profile, self.key_material),
                pseudonyms=pseudonyms,
            )
            self._accounts[user_id] = acct
            self._by_email[email] = user_id
            self._save()
        return user_id

    def authenticate(self, email: str, password: str, now: Optional[float] = None) -> str:
        """Return a session token, or raise the same opaque AuthError on any failure."""
        now = time.time() if now is None else now
        user_id = self._by_email.get(email)
        if user_id is None:
            # burn the same digest work so unknown emails are not distinguishable by timing
            hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), b"\x00" * 16, PBKDF2_ITERATIONS)
            raise AuthError("invalid credentials")
        acct = self._accounts[user_id]
        digest = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(acct.password_salt), PBKDF2_ITERATIONS
        )
        if not hmac.compare_digest(digest.hex(), acct.password_digest):
            raise AuthError("invalid credentials")
        token = secrets.token_urlsafe(24)
        with self._lock:
            self._sessions[token] = (user_id, now + SESSION_TTL_S)
        return token

    def resolve_token(self, token: str, now: Optional[float] = None) -> Optional[str]:
        now = time.time() if now is None else now
        entry = self._sessions.get(token)
        if entry is None:
            return None
        user_id, expiry = entry
        if now > expiry:
            with self._lock:
                self._sessions.pop(token, None)
            return None
        return user_id

    def account(self, user_id: str) -> Account:
        return self._accounts[user_id]

    def profile(self, user_id: str) -> UserProfile:
        return decrypt_profile(self._accounts[user_id].profile_ciphertext, self.key_material)

    def pseudonyms(self, user_id: str) -> list[str]:
        return list(self._accounts[user_id].pseudonyms)
