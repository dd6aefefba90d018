"""Pipeline configuration.

The config file is plain ``key = value`` lines; ``#`` starts a comment and
lists are comma separated.  Relative paths resolve against the config file's
directory.  Every threshold the method leaves open lives here.
"""

import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .corpus import PLUTCHIK
from .patterns import parse_templates


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid config:\n  " + "\n  ".join(self.errors))


PATH_KEYS = ("labeled", "objective", "subjective", "hashtags", "embeddings", "reference", "workdir")


@dataclass
class PipelineConfig:
    labeled: Optional[Path] = None
    objective: Optional[Path] = None
    subjective: Optional[Path] = None
    hashtags: Optional[Path] = None
    embeddings: Optional[Path] = None
    reference: Optional[Path] = None
    workdir: Path = Path("emopattern-run")
    emotions: list = field(default_factory=lambda: list(PLUTCHIK))
    window: int = 2
    phi_w: float = 0.0
    phi_eig: str = "p90"
    phi_cl: str = "p90"
    tol: float = 1e-10
    max_iter: int = 1000
    templates: str = "default"
    min_freq: int = 10
    enriched_min_freq: int = 10
    top_n: int = 20000
    k: str = "auto"
    test_fraction: float = 0.1
    seed: int = 42
    abstain: str = "abstain"
    evm_patterns: str = "basic"
    generalize: bool = False
    baseline_epochs: int = 10
    threads: int = 0

    @property
    def fallback(self):
        return None if self.abstain == "abstain" else self.abstain

    def params(self, *names):
        out = {}
        for n in names:
            v = getattr(self, n)
            out[n] = str(v) if isinstance(v, Path) else v
        return out


_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _convert(key, raw, base):
    if key in PATH_KEYS:
        p = Path(raw).expanduser()
        return p if p.is_absolute() else (base / p)
    typ = _TYPES[key]
    if key == "emotions":
        return [e.strip() for e in raw.split(",") if e.strip()]
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    if typ is bool:
        low = raw.lower()
        if low not in ("true", "false", "yes", "no", "1", "0"):
            raise ValueError(f"expected a boolean, got {raw!r}")
        return low in ("true", "yes", "1")
    return raw


def parse_config(text, base=Path("."), overrides=()):
    """Parse config text plus ``key=value`` overrides; all errors are batched."""
    base = Path(base)
    cfg = PipelineConfig(workdir=base / "emopattern-run")
    errors = []
    items = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        items.append((f"line {lineno}", key, value))
    for ov in overrides:
        if "=" not in ov:
            errors.append(f"override {ov!r}: expected key=value")
            continue
        key, value = (s.strip() for s in ov.split("=", 1))
        items.append((f"override {key}", key, value))
    for where, key, value in items:
        if key not in _TYPES:
            errors.append(f"{where}: unknown key {key!r}")
            continue
        try:
            setattr(cfg, key, _convert(key, value, base))
        except ValueError as exc:
            errors.append(f"{where}: {key}: {exc}")
    errors += validate(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path, overrides=()):
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent, overrides)


def _threshold_ok(value):
    s = str(value).strip().lower()
    try:
        v = float(s[1:]) if s.startswith("p") else float(s)
    except ValueError:
        return False
    return math.isfinite(v) and (not s.startswith("p") or 0 <= v <= 100)


def validate(cfg):
    errors = []
    for key in ("labeled", "objective"):
        if getattr(cfg, key) is None:
            errors.append(f"{key}: required")
    for key in ("labeled", "objective", "subjective", "hashtags", "embeddings", "reference"):
        p = getattr(cfg, key)
        if p is not None and not Path(p).is_file():
            errors.append(f"{key}: file not found: {p}")
    if len(cfg.emotions) < 2:
        errors.append("emotions: need at least two")
    if len(set(cfg.emotions)) != len(cfg.emotions):
        errors.append("emotions: duplicates")
    if not math.isfinite(cfg.phi_w):
        errors.append("phi_w: must be finite")
    for key in ("phi_eig", "phi_cl"):
        if not _threshold_ok(getattr(cfg, key)):
            errors.append(f"{key}: expected pNN or a finite number, got {getattr(cfg, key)!r}")
    if cfg.window < 2:
        errors.append("window: must be >= 2")
    if not 0 < cfg.test_fraction < 1:
        errors.append("test_fraction: must be in (0, 1)")
    for key in ("min_freq", "enriched_min_freq", "top_n", "max_iter"):
        if getattr(cfg, key) < 1:
            errors.append(f"{key}: must be >= 1")
    if not (cfg.tol > 0 and math.isfinite(cfg.tol)):
        errors.append("tol: must be positive and finite")
    if cfg.k != "auto":
        try:
            if int(cfg.k) < 1:
                raise ValueError
        except ValueError:
            errors.append(f"k: expected 'auto' or a positive integer, got {cfg.k!r}")
    if cfg.abstain != "abstain" and cfg.abstain not in cfg.emotions:
        errors.append(f"abstain: expected 'abstain' or an emotion, got {cfg.abstain!r}")
    if cfg.evm_patterns not in ("basic", "enriched", "all"):
        errors.append("evm_patterns: expected basic, enriched or all")
    if cfg.evm_patterns in ("enriched", "all") and cfg.embeddings is None:
        errors.append("evm_patterns: enriched patterns need 'embeddings'")
    try:
        parse_templates(cfg.templates)
    except ValueError as exc:
        errors.append(f"templates: {exc}")
    return errors
