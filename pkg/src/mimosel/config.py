"""System configuration: array dimensions, link budgets, solver controls.

Budgets are accepted in log-scale units (dBm for powers, dB for path gains)
in configuration files and converted once at load time; everything internal
runs in linear-scale watts.
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .rng import MAX_SEED

_LOG_KEYS = {"noise_dbm", "power_dbm", "path_gain_db"}


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0) * 1e-3


def watts_to_dbm(value_w: float) -> float:
    if value_w == 0.0:
        return -math.inf
    return 10.0 * math.log10(value_w / 1e-3)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


@dataclass
class SystemConfig:
    """Static description of one uplink instance.

    n_antennas receive antennas at the base station feed n_chains RF chains
    (n_chains < n_antennas, so a subset must be selected). n_users terminals
    transmit, terminal k with ut_antennas[k] antennas, power budget
    power_budgets[k] watts and average path gain path_gains[k] (linear).
    """

    n_antennas: int
    n_chains: int
    n_users: int
    ut_antennas: list[int]
    noise_power: float
    power_budgets: list[float]
    path_gains: list[float]
    rng_seed: int = 0
    fp_tol: float = 1e-9
    fp_max_iter: int = 500
    ao_tol: float = 1e-4
    ao_max_iter: int = 30
    mm_tol: float = 1e-7
    mm_max_iter: int = 200

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n_antennas < 1:
            raise ConfigError("n_antennas must be positive")
        if not 1 <= self.n_chains <= self.n_antennas:
            raise ConfigError(
                f"n_chains must lie in [1, n_antennas], got {self.n_chains} "
                f"with n_antennas={self.n_antennas}"
            )
        if self.n_users < 1:
            raise ConfigError("n_users must be positive")
        for name, values in (
            ("ut_antennas", self.ut_antennas),
            ("power_budgets", self.power_budgets),
            ("path_gains", self.path_gains),
        ):
            if len(values) != self.n_users:
                raise ConfigError(f"{name} must have one entry per user")
        if any(int(m) < 1 for m in self.ut_antennas):
            raise ConfigError("every terminal needs at least one antenna")
        if any(p < 0 for p in self.power_budgets):
            raise ConfigError("power budgets must be nonnegative")
        if any(b <= 0 for b in self.path_gains):
            raise ConfigError("path gains must be strictly positive")
        if self.noise_power <= 0:
            raise ConfigError("noise power must be strictly positive")
        if not 0 <= int(self.rng_seed) <= MAX_SEED:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")
        for name in ("fp_tol", "ao_tol", "mm_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("fp_max_iter", "ao_max_iter", "mm_max_iter"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "SystemConfig":
        """Build a config from file keys, converting log-scale budgets.

        Accepts either linear keys (noise_power, power_budgets, path_gains)
        or log-scale keys (noise_dbm, power_dbm, path_gain_db); scalars are
        broadcast across users.
        """
        if not isinstance(raw, dict):
            raise ConfigError("configuration payload must be a mapping")
        d = dict(raw)
        try:
            n_users = int(d["n_users"])
        except KeyError as exc:
            raise ConfigError("missing required key: n_users") from exc

        def per_user(value, convert=None):
            if isinstance(value, (int, float)):
                value = [value] * n_users
            values = [float(v) for v in value]
            if convert is not None:
                values = [convert(v) for v in values]
            return values

        if "noise_dbm" in d:
            d["noise_power"] = dbm_to_watts(float(d.pop("noise_dbm")))
        if "power_dbm" in d:
            d["power_budgets"] = per_user(d.pop("power_dbm"), dbm_to_watts)
        if "path_gain_db" in d:
            d["path_gains"] = per_user(d.pop("path_gain_db"), db_to_linear)

        try:
            kwargs = {
                "n_antennas": int(d.pop("n_antennas")),
                "n_chains": int(d.pop("n_chains")),
                "n_users": n_users,
                "ut_antennas": [int(m) for m in per_user(d.pop("ut_antennas"))],
                "noise_power": float(d.pop("noise_power")),
                "power_budgets": per_user(d.pop("power_budgets")),
                "path_gains": per_user(d.pop("path_gains")),
            }
        except KeyError as exc:
            raise ConfigError(f"missing required key: {exc.args[0]}") from exc
        d.pop("n_users")
        for name in (
            "rng_seed",
            "fp_tol",
            "fp_max_iter",
            "ao_tol",
            "ao_max_iter",
            "mm_tol",
            "mm_max_iter",
        ):
            if name in d:
                value = d.pop(name)
                kwargs[name] = int(value) if "iter" in name or name == "rng_seed" else float(value)
        if d:
            raise ConfigError(f"unknown configuration keys: {sorted(d)}")
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def with_power_dbm(self, power_dbm: float) -> "SystemConfig":
        """Copy of this config with every budget set to the given dBm value."""
        return dataclasses.replace(
            self, power_budgets=[dbm_to_watts(power_dbm)] * self.n_users
        )

    @classmethod
    def from_file(cls, path) -> "SystemConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"could not parse configuration file {path}: {exc}") from exc
        return cls.from_dict(raw)
