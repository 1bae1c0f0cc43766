"""Suite configuration: YAML file plus ``key=value`` overrides."""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from ..fock import IndexSet
from ..graded_linalg import ParityProfile
from ..loperators import UnsupportedIndexSet, classify_index_set, supported_index_sets
from .catalog import CHECKS, SUITES


class ConfigError(ValueError):
    pass


def _complex_list(v, name) -> tuple[complex, ...]:
    try:
        return tuple(complex(str(s).replace(" ", "")) for s in v)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: expected a list of complex numbers") from e


def _index_set(v) -> tuple[int, ...]:
    if isinstance(v, str):
        v = [s for s in v.strip("{}[]() ").split(",") if s.strip()]
    try:
        return tuple(sorted(int(s) for s in v))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad index set {v!r}") from e


@dataclass(frozen=True)
class SuiteConfig:
    profile: tuple[int, int] = (2, 1)
    index_sets: str | tuple[tuple[int, ...], ...] = "all-supported"
    samples: int = 3
    q_modulus: tuple[float, float] = (0.3, 0.7)
    seed: int = 0
    cutoff: int = 6
    lattice_sites: int = 2
    xi: str | tuple[complex, ...] = "random"
    twist: str | tuple[complex, ...] = "random-convergent"
    tolerances: dict[str, float] = field(default_factory=dict)
    suites: tuple[str, ...] = SUITES
    skip_unsupported: bool = False
    kr_m_max: int = 12
    verma_degree: int = 8
    verma_draws: int = 20

    def __post_init__(self):
        M, N = self.profile
        if M < 0 or N < 0 or M + N < 1:
            raise ConfigError(f"profile {self.profile} must have M, N >= 0 and M + N >= 1")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite(s) {bad}; known: {', '.join(SUITES)}")
        bad = [k for k in self.tolerances if k not in CHECKS]
        if bad:
            raise ConfigError(f"tolerance override for unknown check(s) {bad}")
        lo, hi = self.q_modulus
        if not 0 < lo <= hi or hi == 1:
            raise ConfigError("q_modulus must satisfy 0 < lo <= hi, |q| != 1")
        if self.samples < 1 or self.lattice_sites < 1 or self.cutoff < 2:
            raise ConfigError("samples and lattice_sites must be >= 1, cutoff >= 2")
        if not isinstance(self.xi, str) and len(self.xi) != self.lattice_sites:
            raise ConfigError(f"xi needs {self.lattice_sites} values")
        if isinstance(self.xi, str) and self.xi != "random":
            raise ConfigError("xi must be 'random' or a list")
        if not isinstance(self.twist, str) and len(self.twist) != M + N:
            raise ConfigError(f"twist needs {M + N} values")
        if isinstance(self.twist, str) and self.twist != "random-convergent":
            raise ConfigError("twist must be 'random-convergent' or a list")
        if not isinstance(self.twist, str) and any(z == 0 for z in self.twist):
            raise ConfigError("twist values must be nonzero")
        if not isinstance(self.index_sets, str):
            for I in self.index_sets:
                if not set(I) <= set(range(1, M + N + 1)):
                    raise ConfigError(f"index set {I} not inside 1..{M + N}")
                if not self.skip_unsupported:
                    try:
                        classify_index_set(IndexSet(self.parity_profile, frozenset(I)))
                    except UnsupportedIndexSet as e:
                        raise ConfigError(f"{e}; pass skip_unsupported to skip it") from e
        elif self.index_sets != "all-supported":
            raise ConfigError("index_sets must be 'all-supported' or a list")

    @property
    def parity_profile(self) -> ParityProfile:
        return ParityProfile(*self.profile)

    def tol(self, check_id: str) -> float:
        return self.tolerances.get(check_id, CHECKS[check_id].tol)

    def resolved_index_sets(self) -> tuple[list[IndexSet], list[IndexSet]]:
        """(usable, skipped-as-unsupported)."""
        prof = self.parity_profile
        if self.index_sets == "all-supported":
            return supported_index_sets(prof), []
        ok, skipped = [], []
        for I in self.index_sets:
            s = IndexSet(prof, frozenset(I))
            try:
                classify_index_set(s)
                ok.append(s)
            except UnsupportedIndexSet:
                skipped.append(s)
        return ok, skipped

    def as_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple) and v and isinstance(v[0], complex):
                v = [_fmt(z) for z in v]
            elif isinstance(v, tuple):
                v = [list(t) if isinstance(t, tuple) else t for t in v]
            elif isinstance(v, dict):
                v = dict(sorted(v.items()))
            out[f.name] = v
        return out


def _fmt(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _coerce(raw: dict[str, Any]) -> dict[str, Any]:
    known = {f.name for f in fields(SuiteConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config key(s) {sorted(unknown)}")
    out = dict(raw)
    try:
        if "profile" in out:
            p = out["profile"]
            if isinstance(p, str):
                p = p.strip("()[] ").split(",")
            out["profile"] = tuple(int(s) for s in p)
        if "index_sets" in out and out["index_sets"] != "all-supported":
            v = out["index_sets"]
            if isinstance(v, str):
                v = [s for s in v.split(";") if s.strip()]
            out["index_sets"] = tuple(_index_set(s) for s in v)
        if "q_modulus" in out:
            v = out["q_modulus"]
            if isinstance(v, str):
                v = v.strip("()[] ").split(",")
            out["q_modulus"] = tuple(float(s) for s in v)
        for key in ("xi", "twist"):
            v = out.get(key)
            if v is not None and not (isinstance(v, str) and not v.startswith("[")):
                if isinstance(v, str):
                    v = v.strip("[] ").split(",")
                out[key] = _complex_list(v, key)
        if "suites" in out:
            v = out["suites"]
            if isinstance(v, str):
                v = SUITES if v == "all" else [s.strip() for s in v.split(",") if s.strip()]
            out["suites"] = tuple(v)
        if "tolerances" in out:
            out["tolerances"] = {str(k): float(v) for k, v in dict(out["tolerances"]).items()}
        for key in ("samples", "seed", "cutoff", "lattice_sites", "kr_m_max", "verma_degree",
                    "verma_draws"):
            if key in out:
                out[key] = int(out[key])
        if "skip_unsupported" in out:
            v = out["skip_unsupported"]
            out["skip_unsupported"] = v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes")
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed config value: {e}") from e
    return out


def load_config(path: str | Path | None = None, overrides: list[str] = ()) -> SuiteConfig:
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if data is not None and not isinstance(data, dict):
            raise ConfigError("config file must hold a mapping")
        raw.update(data or {})
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        key = key.strip()
        if key.startswith("tol."):
            raw.setdefault("tolerances", {})[key[4:]] = value
        elif key in ("index_sets", "xi", "twist", "profile", "q_modulus", "suites"):
            raw[key] = value.strip()
        else:
            raw[key] = yaml.safe_load(value) if value.strip() else value
    return SuiteConfig(**_coerce(raw))
