"""Experiment configuration and deterministic RNG streams.

Config files are flat ``key = value`` text.  Values are parsed as JSON
scalars (numbers, strings, booleans, lists) with bare words falling
back to strings; ``#`` starts a comment.  Nested group parameters use
dotted keys:

    group.kind = sign_flip
    group.d = 2
    arch = lmf
    m = 16
    seed = 7

All randomness in a run derives from one 64-bit seed through named
streams: ``stream(seed, name)`` hashes the purpose string into the seed
sequence, so adding a consumer never shifts the draws of another.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields

import numpy as np

from . import groups
from .groups import GroupSpec

MASK64 = (1 << 64) - 1


def atomic_write_text(path, text: str) -> None:
    """Write a file via a same-directory temp file and atomic rename."""
    import os
    import tempfile

    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one named purpose under one master seed."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    words = tuple(
        int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)
    )
    return np.random.default_rng(np.random.SeedSequence((int(seed) & MASK64, *words)))


def parse_kv_text(text: str) -> dict:
    """Parse ``key = value`` lines into a flat dict (dotted keys nested)."""
    flat: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        flat[key] = parsed

    nested: dict = {}
    for key, value in flat.items():
        parts = key.split(".")
        node = nested
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValueError(f"key {key!r} conflicts with a scalar")
        node[parts[-1]] = value
    return nested


ARCHS = ("mf", "lrmf", "lmf", "relu")

# documented optimizer defaults; overridable per run
DEFAULT_LR = 1e-2
DEFAULT_STEPS = 2000
DEFAULT_RESTARTS = 10


@dataclass
class ExperimentConfig:
    """One training or evaluation run.

    ``m`` is the bank width (hidden width for relu), ``n`` the output
    dimension; n = 0 means n = m.  ``batch_pairs = 0`` uses every pair
    each step.  ``scale_norm`` optionally standardizes the training set
    to unit mean norm before use.
    """

    group: GroupSpec
    arch: str = "lmf"
    m: int = 16
    n: int = 0
    steps: int = DEFAULT_STEPS
    learning_rate: float = DEFAULT_LR
    restarts: int = DEFAULT_RESTARTS
    train_size: int = 256
    test_size: int = 1024
    batch_pairs: int = 0
    augmentation_samples: int = 16
    scale_norm: bool = False
    seed: int = 0
    out: str = ""
    model: str = ""  # untrained model selector for cmd_distortion

    def __post_init__(self):
        if self.arch not in ARCHS:
            raise ValueError(f"arch must be one of {ARCHS}, got {self.arch!r}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.n == 0:
            self.n = self.m
        for name in ("steps", "restarts", "train_size", "test_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentConfig":
        cfg = dict(cfg)
        if "group" not in cfg:
            raise ValueError("config is missing the group section")
        G = groups.group_from_config(cfg.pop("group"))
        known = {f.name for f in fields(cls)} - {"group"}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(group=G, **cfg)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(parse_kv_text(fh.read()))

    def to_dict(self) -> dict:
        out = {"group": groups.group_to_config(self.group)}
        for f in fields(self):
            if f.name == "group":
                continue
            out[f.name] = getattr(self, f.name)
        return out


def gaussian_points(G: GroupSpec, n: int, rng) -> np.ndarray:
    """Standard Gaussian sample in the ambient space of G."""
    rng = np.random.default_rng(rng)
    return rng.standard_normal((n, G.ambient_dim))
