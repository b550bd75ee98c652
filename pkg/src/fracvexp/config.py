"""Run configuration: plain-text sectioned key=value files (INI) with JSON
accepted as an alternative; defaults merged underneath; seeded and hashed
so every report can state exactly what produced it.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import PreconditionError
from .exponents import ExponentSpec, spec_from_config
from .quadrature import QuadratureConfig

DEFAULTS = {
    "run": {"seed": 12345, "output_dir": "out"},
    "exponent": {"dimension": 1, "order": 0.5, "m": 0.5,
                 "q_kind": "example_ii", "q_params": ""},
    "quadrature": {"pairing_radius": 0.25, "graded_levels": 12,
                   "nodes_per_level": 8, "angular_nodes": 32,
                   "tail_radius": 4.0, "tail_tolerance": 1e-8},
    "solver": {"nodes": 201, "extent": 1.5, "amplitude": 0.5,
               "tol_res": 1e-4, "max_iters": 50000, "eta": 1e-3,
               "checkpoint_every": 25, "perturbation": 0.05},
    "sweep": {"count": 101, "refine": 10, "tol": 1e-5,
              "directions": 8, "decay_tol": 1e-6, "radial_tol": 1e-4},
    "lemmas": {"n_mean_value": 100000, "n_kernel": 10000, "n_gprime": 100000},
    "mp": {"hyp_tol": 1e-6, "concl_tol": 1e-5},
}

_INT_KEYS = {"seed", "dimension", "graded_levels", "nodes_per_level",
             "angular_nodes", "nodes", "max_iters", "checkpoint_every",
             "count", "refine", "directions", "n_mean_value", "n_kernel",
             "n_gprime"}
_STR_KEYS = {"output_dir", "q_kind", "q_params"}


def _coerce(key: str, value):
    if key in _STR_KEYS:
        return str(value)
    if key in _INT_KEYS:
        return int(float(value))
    return float(value)


@dataclass
class RunConfig:
    """Merged configuration; `sections` mirrors the file layout."""

    sections: dict = field(default_factory=dict)
    path: str | None = None

    @classmethod
    def load(cls, path=None) -> "RunConfig":
        merged = {sec: dict(vals) for sec, vals in DEFAULTS.items()}
        if path is not None:
            path = Path(path)
            if not path.exists():
                raise PreconditionError(f"config file not found: {path}")
            text = path.read_text()
            if path.suffix == ".json" or text.lstrip().startswith("{"):
                raw = json.loads(text)
                if not isinstance(raw, dict):
                    raise PreconditionError("JSON config must be an object of sections")
                items = raw.items()
            else:
                cp = configparser.ConfigParser()
                cp.read_string(text)
                items = ((sec, dict(cp[sec])) for sec in cp.sections())
            for sec, vals in items:
                if sec not in merged:
                    raise PreconditionError(f"unknown config section [{sec}]")
                for key, val in dict(vals).items():
                    if key not in merged[sec]:
                        raise PreconditionError(f"unknown key {key!r} in section [{sec}]")
                    merged[sec][key] = _coerce(key, val)
        cfg = cls(merged, None if path is None else str(path))
        return cfg

    def section(self, name: str) -> dict:
        return self.sections[name]

    @property
    def seed(self) -> int:
        return int(self.sections["run"]["seed"])

    @property
    def output_dir(self) -> Path:
        return Path(self.sections["run"]["output_dir"])

    def override(self, section: str, key: str, value) -> None:
        if section not in self.sections or key not in self.sections[section]:
            raise PreconditionError(f"unknown config entry [{section}] {key}")
        self.sections[section][key] = _coerce(key, value)

    def exponent_spec(self) -> ExponentSpec:
        return spec_from_config(self.sections["exponent"])

    def quadrature(self) -> QuadratureConfig:
        q = self.sections["quadrature"]
        return QuadratureConfig(
            pairing_radius=q["pairing_radius"],
            graded_levels=q["graded_levels"],
            nodes_per_level=q["nodes_per_level"],
            angular_nodes=q["angular_nodes"],
            tail_radius=q["tail_radius"],
            tail_tolerance=q["tail_tolerance"],
        )

    def config_hash(self) -> str:
        """Hash of everything that shapes results (output_dir excluded)."""
        payload = {sec: {k: v for k, v in vals.items() if k != "output_dir"}
                   for sec, vals in self.sections.items()}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()
