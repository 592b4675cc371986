"""Secret key, scheme configuration and their validation.

The key file is a flat UTF-8 JSON object whose fields are exactly those of
:class:`SecretKey`.  Integers are JSON integers; the three gains are decimal
strings with 17 significant digits so they survive the round trip exactly.
Unknown or missing fields are rejected.
"""
from __future__ import annotations

import json
import secrets
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .codec import EmbedConstants
from .lasso_admm import SolverConfig
from .measurement import SEED_BITS

INT_FIELDS = ("seed", "r", "b", "m", "l", "p1", "p2", "p3", "p4", "c")
REAL_FIELDS = ("alpha", "beta", "gamma")
MAX_SIDE = 2**16
MAX_MEASUREMENTS = 2**24


class ConfigError(ValueError):
    """One or more configuration invariants failed; ``violations`` lists each."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))


class KeyFileError(ValueError):
    pass


@dataclass(frozen=True)
class SecretKey:
    seed: int
    r: int = 1024
    b: int = 8
    m: int = 512
    l: int = 8  # noqa: E741 - secret block side
    p1: int = 32
    p2: int = 32
    p3: int = 1600
    p4: int = 32
    alpha: float = 0.01
    beta: float = 0.1
    gamma: float = 1.0
    c: int = 6

    @property
    def constants(self) -> EmbedConstants:
        return EmbedConstants(self.alpha, self.beta, self.gamma, self.c, self.p1, self.p4)


@dataclass(frozen=True)
class StegoConfig:
    """A validated key plus solver settings; build with :func:`validate`."""

    key: SecretKey
    solver: SolverConfig = field(default_factory=SolverConfig)

    @property
    def constants(self) -> EmbedConstants:
        return self.key.constants

    @property
    def sub_side(self) -> int:
        return self.key.r // 2

    @property
    def n_cover_blocks(self) -> int:
        return (self.sub_side // self.key.b) ** 2

    @property
    def n_secret_blocks(self) -> int:
        return (self.key.m // self.key.l) ** 2


def key_violations(key: SecretKey) -> list[str]:
    out = []
    for name in INT_FIELDS:
        value = getattr(key, name)
        if isinstance(value, bool) or not isinstance(value, int):
            out.append(f"{name} must be an integer, got {value!r}")
    for name in REAL_FIELDS:
        value = getattr(key, name)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != value:
            out.append(f"{name} must be a real number, got {value!r}")
    if out:
        return out

    r, b, m, l = key.r, key.b, key.m, key.l
    if not 0 <= key.seed < 2**SEED_BITS:
        out.append(f"seed must lie in [0, 2**{SEED_BITS}), got {key.seed}")
    for name in ("r", "b", "m", "l", "p1", "p2", "p3", "p4"):
        if getattr(key, name) < 1:
            out.append(f"{name} must be >= 1, got {getattr(key, name)}")
    for name in ("r", "m"):
        if getattr(key, name) > MAX_SIDE:
            out.append(f"{name} must be <= {MAX_SIDE}, got {getattr(key, name)}")
    if key.p3 > MAX_MEASUREMENTS:
        out.append(f"p3 must be <= {MAX_MEASUREMENTS}, got {key.p3}")
    if out:
        return out
    if r % 2:
        out.append(f"r must be even for sub-sampling, got {r}")
    elif (r // 2) % b:
        out.append(f"b={b} must divide the sub-image side r/2={r // 2}")
    if m % l:
        out.append(f"l={l} must divide m={m}")
    if (m // l) ** 2 > ((r // 2) // b) ** 2:
        out.append(
            f"secret block count m^2/l^2={(m // l) ** 2} exceeds sub-image block count "
            f"r^2/(4b^2)={((r // 2) // b) ** 2}"
        )
    if key.p1 + key.p2 != b * b:
        out.append(f"p1 + p2 must equal b^2={b * b}, got {key.p1 + key.p2}")
    if key.p1 > key.p2:
        out.append(f"need p1 <= p2, got p1={key.p1}, p2={key.p2}")
    if key.p3 <= key.p2:
        out.append(f"need p3 > p2, got p3={key.p3}, p2={key.p2}")
    if key.p4 > l * l:
        out.append(f"p4={key.p4} exceeds the secret block size l^2={l * l}")
    out.extend(key.constants.violations(key.p1 + key.p3))
    return out


def validate(key: SecretKey, solver: SolverConfig | None = None) -> StegoConfig:
    solver = solver or SolverConfig()
    bad = key_violations(key) + solver.violations()
    if bad:
        raise ConfigError(bad)
    return StegoConfig(key, solver)


def default_key(seed: int | None = None, **overrides) -> SecretKey:
    if seed is None:
        seed = secrets.randbits(SEED_BITS)
    return replace(SecretKey(seed=seed), **overrides)


def key_to_json(key: SecretKey) -> str:
    doc = asdict(key)
    for name in REAL_FIELDS:
        doc[name] = format(float(doc[name]), ".17g")
    return json.dumps(doc, indent=2) + "\n"


def key_from_json(text: str) -> SecretKey:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KeyFileError(f"key file is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from None
    except RecursionError:
        raise KeyFileError("key file nests too deeply") from None
    if not isinstance(doc, dict):
        raise KeyFileError("key file must hold a JSON object")
    expected = {f.name for f in fields(SecretKey)}
    missing = sorted(expected - doc.keys())
    unknown = sorted(doc.keys() - expected)
    problems = [f"missing field {name!r}" for name in missing]
    problems += [f"unknown field {name!r}" for name in unknown]
    values = {}
    for name in INT_FIELDS:
        if name not in doc:
            continue
        v = doc[name]
        if isinstance(v, bool) or not isinstance(v, int):
            problems.append(f"field {name!r}: expected an integer, got {v!r}")
        values[name] = v
    for name in REAL_FIELDS:
        if name not in doc:
            continue
        v = doc[name]
        if not isinstance(v, str):
            problems.append(f"field {name!r}: expected a decimal string, got {v!r}")
            continue
        try:
            values[name] = float(v)
        except ValueError:
            problems.append(f"field {name!r}: not a decimal number: {v!r}")
    if problems:
        raise KeyFileError("; ".join(problems))
    return SecretKey(**values)


def save_key(key: SecretKey, path) -> None:
    Path(path).write_text(key_to_json(key), encoding="utf-8")


def load_key(path) -> SecretKey:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise KeyFileError(f"key file is not UTF-8 (byte {exc.start})") from None
    return key_from_json(text)
