"""Run configuration: flat ``key = value`` text with dotted block keys.

Grammar: one ``key = value`` per line, ``#`` starts a comment, blank lines
ignored.  Grids accept either an explicit comma list (``0,1,20,60``) or a
generator form ``logspace:lo:hi:n`` / ``linspace:lo:hi:n``.  Drive profiles
are comma-separated ``duration:relative_power`` segments.

Engines run from the dimensionless block; the SI blocks feed the feasibility
checks and may be used to derive dimensionless values.  When a quantity is
given both ways the two must agree to one part in 1e9 or the run aborts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mapping import SqueezingModel
from .model import AtomicPhysics, DriveParams, MediumParams, total_dephasing

SI_AGREEMENT_RTOL = 1e-9

KNOWN_KEYS = {
    # dimensionless engine block
    "dimensionless.alpha",
    "dimensionless.alpha_grid",
    "dimensionless.b",
    "dimensionless.b_list",
    "dimensionless.s",
    "dimensionless.x0_sq",
    "dimensionless.input",
    "dimensionless.x_grid",
    # transient sampling
    "transient.tau_max_gamma",
    "transient.points",
    # grid oracle block
    "grid.nz",
    "grid.ntau",
    "grid.tau_max_gamma",
    # tolerances
    "tolerance.quad_abs",
    # SI medium block
    "medium.density_per_m3",
    "medium.length_m",
    "medium.area_m2",
    "medium.gamma0_per_s",
    "medium.wavelength_m",
    # SI drive block
    "drive.g_per_m_per_s",
    "drive.gamma_s_per_s",
    "drive.tau_pulse_s",
    "drive.profile",
    # SI atomic-physics block
    "physics.omega_rad_per_s",
    "physics.delta_1photon_rad_per_s",
    "physics.gamma_i_per_s",
    "physics.dipole_sum_si",
    "physics.saturation",
    "physics.gamma_q_per_s",
    "physics.k_mismatch_per_m",
    # feasibility thresholds
    "feasibility.ratio",
    "feasibility.fresnel_min",
    "feasibility.fresnel_max",
    # read-out block
    "teleport.alpha_pulse",
    "teleport.epr_residual",
    "teleport.r_threshold",
}

_MEDIUM_KEYS = ("medium.density_per_m3", "medium.length_m", "medium.area_m2",
                "medium.gamma0_per_s", "medium.wavelength_m")
_DRIVE_KEYS = ("drive.g_per_m_per_s", "drive.gamma_s_per_s", "drive.tau_pulse_s")
_PHYSICS_KEYS = ("physics.omega_rad_per_s", "physics.delta_1photon_rad_per_s",
                 "physics.gamma_i_per_s", "physics.dipole_sum_si",
                 "physics.saturation", "physics.gamma_q_per_s")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field {field_name!r}: {message}")
        self.field = field_name


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        values[key] = value
    return values


def _parse_grid(text: str, key: str) -> np.ndarray:
    parts = text.split(":")
    if parts[0] in ("logspace", "linspace"):
        if len(parts) != 4:
            raise ConfigError(key, f"expected {parts[0]}:lo:hi:n")
        try:
            lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
        if n < 1:
            raise ConfigError(key, "grid size must be at least 1")
        fn = np.geomspace if parts[0] == "logspace" else np.linspace
        return fn(lo, hi, n)
    try:
        return np.array([float(p) for p in text.split(",") if p.strip() != ""])
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


@dataclass
class RunConfig:
    values: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(parse_config_text(fh.read()))

    # -- low-level typed access -------------------------------------------
    def has(self, key: str) -> bool:
        return key in self.values

    def get_float(self, key: str, default: float | None = None) -> float | None:
        if key not in self.values:
            return default
        try:
            return float(self.values[key])
        except ValueError:
            raise ConfigError(key, f"not a number: {self.values[key]!r}") from None

    def get_int(self, key: str, default: int | None = None) -> int | None:
        if key not in self.values:
            return default
        try:
            return int(self.values[key])
        except ValueError:
            raise ConfigError(key, f"not an integer: {self.values[key]!r}") from None

    def get_grid(self, key: str, default: np.ndarray | None = None) -> np.ndarray | None:
        if key not in self.values:
            return default
        return _parse_grid(self.values[key], key)

    def require(self, key: str) -> str:
        if key not in self.values:
            raise ConfigError(key, "required but missing")
        return self.values[key]

    # -- SI blocks ----------------------------------------------------------
    def _block_state(self, keys) -> str:
        present = sum(1 for k in keys if k in self.values)
        if present == 0:
            return "absent"
        if present == len(keys):
            return "complete"
        missing = next(k for k in keys if k not in self.values)
        raise ConfigError(missing, "SI block is incomplete")

    def medium(self, required: bool = False) -> MediumParams | None:
        if self._block_state(_MEDIUM_KEYS) == "absent":
            if required:
                raise ConfigError(_MEDIUM_KEYS[0], "required but missing")
            return None
        try:
            return MediumParams(
                density=self.get_float("medium.density_per_m3"),
                length=self.get_float("medium.length_m"),
                area=self.get_float("medium.area_m2"),
                gamma0=self.get_float("medium.gamma0_per_s"),
                wavelength=self.get_float("medium.wavelength_m"),
            )
        except ValueError as exc:
            raise ConfigError("medium", str(exc)) from None

    def drive(self, required: bool = False) -> DriveParams | None:
        if self._block_state(_DRIVE_KEYS) == "absent":
            if required:
                raise ConfigError(_DRIVE_KEYS[0], "required but missing")
            return None
        profile = ()
        if self.has("drive.profile"):
            profile = _parse_profile(self.values["drive.profile"])
        try:
            return DriveParams(
                g=self.get_float("drive.g_per_m_per_s"),
                gamma_s=self.get_float("drive.gamma_s_per_s"),
                tau_pulse=self.get_float("drive.tau_pulse_s"),
                profile=profile,
            )
        except ValueError as exc:
            raise ConfigError("drive", str(exc)) from None

    def physics(self, required: bool = False) -> AtomicPhysics | None:
        if self._block_state(_PHYSICS_KEYS) == "absent":
            if required:
                raise ConfigError(_PHYSICS_KEYS[0], "required but missing")
            return None
        try:
            return AtomicPhysics(
                omega=self.get_float("physics.omega_rad_per_s"),
                delta_1photon=self.get_float("physics.delta_1photon_rad_per_s"),
                gamma_i=self.get_float("physics.gamma_i_per_s"),
                dipole_sum=self.get_float("physics.dipole_sum_si"),
                saturation=self.get_float("physics.saturation"),
                gamma_q=self.get_float("physics.gamma_q_per_s"),
                k_mismatch=self.get_float("physics.k_mismatch_per_m", 0.0),
            )
        except ValueError as exc:
            raise ConfigError("physics", str(exc)) from None

    # -- derived dimensionless quantities ------------------------------------
    def _si_alpha(self) -> float | None:
        medium = self.medium()
        drive = self.drive()
        if medium is None or drive is None:
            return None
        gamma = total_dephasing(medium, drive, drive_on=True)
        return drive.g * medium.length / gamma

    def _si_bandwidth_ratio(self) -> float | None:
        medium = self.medium()
        drive = self.drive()
        physics = self.physics()
        if medium is None or drive is None or physics is None:
            return None
        return physics.gamma_q / total_dephasing(medium, drive, drive_on=True)

    def alpha(self) -> float:
        """Optical depth: dimensionless block, cross-checked against SI."""
        declared = self.get_float("dimensionless.alpha")
        derived = self._si_alpha()
        if declared is None and derived is None:
            raise ConfigError("dimensionless.alpha", "required but missing (no SI block either)")
        if declared is not None and derived is not None:
            if not math.isclose(declared, derived, rel_tol=SI_AGREEMENT_RTOL, abs_tol=0.0):
                raise ConfigError(
                    "dimensionless.alpha",
                    f"declared {declared!r} disagrees with SI-derived {derived!r}",
                )
        value = declared if declared is not None else derived
        if value < 0:
            raise ConfigError("dimensionless.alpha", "must be nonnegative")
        return value

    def bandwidth_ratio(self) -> float | None:
        declared = self.get_float("dimensionless.b")
        derived = self._si_bandwidth_ratio()
        if declared is not None and derived is not None:
            if not math.isclose(declared, derived, rel_tol=SI_AGREEMENT_RTOL, abs_tol=0.0):
                raise ConfigError(
                    "dimensionless.b",
                    f"declared {declared!r} disagrees with SI-derived {derived!r}",
                )
        return declared if declared is not None else derived

    def squeezing_model(self) -> SqueezingModel:
        """Input-light model; Gamma = 1 in engine units, so b doubles as gamma_q."""
        kind = self.values.get("dimensionless.input", "flat")
        if kind == "flat":
            x0_sq = self.get_float("dimensionless.x0_sq", 0.0)
            if x0_sq < 0:
                raise ConfigError("dimensionless.x0_sq", "must be nonnegative")
            return SqueezingModel.flat(x0_sq)
        if kind == "lorentzian":
            b = self.bandwidth_ratio()
            if b is None:
                raise ConfigError("dimensionless.b", "required for lorentzian input")
            s = self.get_float("dimensionless.s", 1.0)
            try:
                return SqueezingModel.lorentzian(gamma_q=b, s=s)
            except ValueError as exc:
                raise ConfigError("dimensionless.s", str(exc)) from None
        raise ConfigError("dimensionless.input", f"must be flat or lorentzian, got {kind!r}")

    def quad_tol(self, override: float | None = None) -> float:
        tol = override if override is not None else self.get_float("tolerance.quad_abs", 1e-9)
        if not tol > 0:
            raise ConfigError("tolerance.quad_abs", "must be positive")
        return tol


def _parse_profile(text: str) -> tuple[tuple[float, float], ...]:
    segments = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 2:
            raise ConfigError("drive.profile", f"expected duration:power, got {part!r}")
        try:
            segments.append((float(bits[0]), float(bits[1])))
        except ValueError as exc:
            raise ConfigError("drive.profile", str(exc)) from None
    if not segments:
        raise ConfigError("drive.profile", "empty profile")
    return tuple(segments)
