"""Text formats, search configuration, and run manifests.

Formats are line-oriented so million-function corpora stream in constant
memory: one Boolean truth table per line as fixed-width hex, or one
vectorial function per line as 2^m space-separated hex images.
"""

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

from .boolfun import BooleanFunction
from .errors import ParseError
from .rationals import parse_rational
from .vectorial import VectorialFunction
from .invariants import HASH_SPEC

TOOL_NAME = "apnlab"
TOOL_VERSION = "0.1.0"
ENV_PREFIX = "APNLAB_"


# -- Boolean truth-table lines ------------------------------------------

def parse_boolean_line(line, m, lineno=None):
    try:
        return BooleanFunction.from_hex(m, line)
    except ParseError as exc:
        raise ParseError(str(exc), line=lineno) from None


def iter_boolean_lines(handle, m):
    for lineno, raw in enumerate(handle, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, parse_boolean_line(line, m, lineno)


def load_boolean_functions(path, m):
    with open(path, "r", encoding="ascii") as handle:
        return [f for _, f in iter_boolean_lines(handle, m)]


def format_boolean(f):
    return f.to_hex()


# -- vectorial function lines ---------------------------------------------

def parse_vectorial_line(line, m, n=None, lineno=None):
    """Parse 2^m space-separated hex images; n defaults to the bit width
    of the largest image (the format itself does not carry n)."""
    parts = line.split()
    if len(parts) != (1 << m):
        raise ParseError(
            f"expected {1 << m} images for m={m}, got {len(parts)}", line=lineno)
    try:
        images = [int(p, 16) for p in parts]
    except ValueError:
        raise ParseError("invalid hex image value", line=lineno) from None
    width = n if n is not None else max(max(images).bit_length(), 1)
    try:
        return VectorialFunction(m, width, images)
    except ValueError as exc:
        raise ParseError(str(exc), line=lineno) from None


def iter_vectorial_lines(handle, m, n=None):
    for lineno, raw in enumerate(handle, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, parse_vectorial_line(line, m, n, lineno)


def load_vectorial_functions(path, m, n=None):
    with open(path, "r", encoding="ascii") as handle:
        return [F for _, F in iter_vectorial_lines(handle, m, n)]


def store_vectorial_functions(functions, path):
    with open(path, "w", encoding="ascii") as handle:
        for F in functions:
            handle.write(F.to_hex_line() + "\n")


def format_vectorial(F):
    return F.to_hex_line()


# -- kappa lists ----------------------------------------------------------

def load_kappa_file(path):
    """One rational per line (or whitespace separated); '7/4' and '1.75'
    both parse. Duplicates are collapsed."""
    values = []
    with open(path, "r", encoding="ascii") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for token in line.replace(",", " ").split():
                try:
                    values.append(parse_rational(token))
                except ValueError as exc:
                    raise ParseError(str(exc), line=lineno) from None
    return sorted(set(values))


# -- search configuration ----------------------------------------------------

_CONFIG_KEYS = {
    "m": int,
    "alpha": parse_rational,
    "beta": parse_rational,
    "seeds": str,
    "pool": str,
    "pool_orbit_samples": int,
    "pool_orbit_seed": int,
    "output_dir": str,
    "threads": int,
    "max_level_members": int,
    "budget_nodes": int,
    "budget_seconds": float,
    "max_solutions_per_candidate": int,
    "normalize": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "enforce_degree_policy": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "jprime_on_extension": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "checkpoint": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def load_config(path, env=None):
    """Plain key = value file; APNLAB_<KEY> environment entries override."""
    raw = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", line=lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.lower().replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise ParseError(f"unknown config key {key!r}", line=lineno)
            raw[key] = value.strip("\"'")
    env = os.environ if env is None else env
    for key in _CONFIG_KEYS:
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            raw[key] = env[env_key]
    out = {}
    for key, value in raw.items():
        try:
            out[key] = _CONFIG_KEYS[key](value)
        except (ValueError, TypeError):
            raise ParseError(f"bad value for config key {key!r}: {value!r}") from None
    return out


# -- digests and manifests ------------------------------------------------------

def blob_digest(data):
    if isinstance(data, str):
        data = data.encode()
    return hashlib.blake2b(data, digest_size=16).hexdigest()


def file_digest(path):
    h = hashlib.blake2b(digest_size=16)
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def config_digest(config):
    canon = json.dumps({k: str(v) for k, v in sorted(config.items())},
                       sort_keys=True)
    return blob_digest(canon)


@dataclass
class RunManifest:
    """Audit record for a command run.

    The digest covers every field except the timestamps, so reruns with
    identical inputs and configuration are recognizably identical.
    """

    command: str
    config_digest: str = ""
    input_digests: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    tool: str = f"{TOOL_NAME} {TOOL_VERSION}"
    invariant_hash: str = HASH_SPEC
    started_at: float = field(default_factory=time.time)
    finished_at: float = None

    def finish(self, **stats):
        self.finished_at = time.time()
        self.stats.update(stats)
        return self

    def digest(self):
        body = {
            "command": self.command,
            "config_digest": self.config_digest,
            "input_digests": self.input_digests,
            "stats": self.stats,
            "tool": self.tool,
            "invariant_hash": self.invariant_hash,
        }
        return blob_digest(json.dumps(body, sort_keys=True, default=str))

    def as_record(self):
        return {
            "tool": self.tool,
            "command": self.command,
            "config_digest": self.config_digest,
            "input_digests": self.input_digests,
            "stats": self.stats,
            "invariant_hash": self.invariant_hash,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "manifest_digest": self.digest(),
        }

    def write(self, path):
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.as_record(), handle, indent=2, sort_keys=True,
                      default=str)
            handle.write("\n")
