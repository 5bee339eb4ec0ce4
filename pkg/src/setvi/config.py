"""Run settings shared by the CLI, the suite, and report serialization."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .analysis import DiniConfig
from .cone import TAU_STRICT


@dataclass(frozen=True)
class RunSettings:
    """Everything a verdict needs to be reproduced from its report alone."""

    tau_strict: float = TAU_STRICT
    wstar_density: int = 33
    dini: DiniConfig = field(default_factory=DiniConfig)
    seed: int = 0
    output: str = "text"          # text | json | both
    workers: int = 1
    ray_steps: int = 17           # scalar-path grids for the convexity command
    chain_ray_grid: int = 9
    chain_max_rays: int = 8
    vi_domain: str = "formula"    # or "dom" to align all x quantifiers
    eps_list: tuple | None = None
    probe_radii: tuple | None = None

    def __post_init__(self):
        if self.tau_strict <= 0 or self.wstar_density < 1 or self.workers < 1:
            raise ValueError("settings must be positive")
        if self.output not in ("text", "json", "both"):
            raise ValueError("output must be text, json, or both")
        if self.vi_domain not in ("formula", "dom"):
            raise ValueError("vi_domain must be 'formula' or 'dom'")

    @staticmethod
    def from_dict(doc: dict, **overrides) -> "RunSettings":
        doc = dict(doc or {})
        doc.update({k: v for k, v in overrides.items() if v is not None})
        dini = doc.get("dini", {})
        if isinstance(dini, dict):
            dini = DiniConfig(**{k: dini[k] for k in ("t_max", "ratio", "steps")
                                 if k in dini})
        known = {f for f in RunSettings.__dataclass_fields__}
        kwargs = {k: v for k, v in doc.items() if k in known and k != "dini"}
        if "eps_list" in kwargs and kwargs["eps_list"] is not None:
            kwargs["eps_list"] = tuple(float(e) for e in kwargs["eps_list"])
        if "probe_radii" in kwargs and kwargs["probe_radii"] is not None:
            kwargs["probe_radii"] = tuple(float(r) for r in kwargs["probe_radii"])
        return RunSettings(dini=dini, **kwargs)

    def with_(self, **kw) -> "RunSettings":
        return replace(self, **kw)

    def effective_workers(self) -> int:
        cap = os.environ.get("SETVI_THREADS")
        if cap:
            try:
                return max(1, min(self.workers, int(cap)))
            except ValueError:
                pass
        return self.workers

    def to_dict(self) -> dict:
        # workers and output shape the run, not the verdicts, and reports must
        # be byte-identical across worker counts; they are left out on purpose
        return {
            "tau_strict": self.tau_strict,
            "wstar_density": self.wstar_density,
            "dini": self.dini.to_dict(),
            "seed": self.seed,
            "ray_steps": self.ray_steps,
            "chain_ray_grid": self.chain_ray_grid,
            "chain_max_rays": self.chain_max_rays,
            "vi_domain": self.vi_domain,
            "eps_list": list(self.eps_list) if self.eps_list else None,
            "probe_radii": list(self.probe_radii) if self.probe_radii else None,
        }
