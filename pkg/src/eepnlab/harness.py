"""Sweep orchestration: config files, Monte Carlo stopping, CSV/JSON output.

A sweep walks (scenario, OSNR) points and accumulates independent trial
blocks until ``min_errors`` errors are seen or ``max_symbols`` symbols
are spent. Trials are addressed by (scenario index, OSNR index, trial
index) through a splitmix hash into Philox stream ids, so the schedule
(and the --jobs knob) can never change the numbers.
"""

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone

from . import __version__
from .analytics import FiberSpec, LaserSpec, SymbolClock
from .link import BerRecord, LinkScenario, analytic_companions, edge_guard_symbols, simulate
from .noise import RngStream, splitmix64

CSV_HEADER = (
    "scenario,compensation,distance_km,df_tx_hz,df_lo_hz,osnr_db,"
    "n_bits,n_errors,ber,eepn_lw_hz,eff_lw_hz,ber_floor_theory"
)


class ConfigError(Exception):
    """Invalid sweep configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class OsnrGrid:
    start_db: float
    stop_db: float
    step_db: float
    include_no_noise: bool = True

    def __post_init__(self):
        if self.step_db <= 0:
            raise ConfigError("osnr step_db must be > 0")
        if self.stop_db < self.start_db:
            raise ConfigError("osnr stop_db must be >= start_db")

    def points(self) -> list[float]:
        pts = []
        value = self.start_db
        while value <= self.stop_db + 1e-9:
            pts.append(round(value, 9))
            value += self.step_db
        if self.include_no_noise:
            pts.append(math.inf)
        return pts


@dataclass(frozen=True)
class LinewidthSplit:
    """A named (Tx, LO) linewidth split, e.g. 10/0, 5/5, 0/10 MHz."""

    name: str
    df_tx_hz: float
    df_lo_hz: float

    def __post_init__(self):
        if not self.name:
            raise ConfigError("scenario name must be nonempty")
        if self.df_tx_hz < 0 or self.df_lo_hz < 0:
            raise ConfigError("linewidths must be >= 0")


@dataclass(frozen=True)
class SweepConfig:
    base: LinkScenario
    osnr_grid: OsnrGrid
    scenarios: tuple[LinewidthSplit, ...]
    min_errors: int = 100
    max_symbols: int = 1_000_000
    parallelism: int = 1
    master_seed: int = 1

    def __post_init__(self):
        if self.min_errors < 1:
            raise ConfigError("min_errors must be >= 1")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        names = [s.name for s in self.scenarios]
        if len(set(names)) != len(names):
            raise ConfigError("scenario names must be unique")
        if self.max_symbols < self.base.training_len:
            raise ConfigError("max_symbols budget is below the training length")
        guard = edge_guard_symbols(self.base)
        if self.base.n_symbols <= self.base.training_len + 2 * guard:
            raise ConfigError(
                "n_symbols per trial must exceed training_len + 2*filter guard "
                f"({self.base.training_len + 2 * guard})"
            )


@dataclass(frozen=True)
class ResultSet:
    records: tuple[BerRecord, ...]
    version: str
    timestamp: str
    config_hash: str


# ---------------------------------------------------------------------------
# configuration parsing

_BASE_KEYS = {
    "compensation": str,
    "symbol_rate_hz": float,
    "samples_per_symbol": int,
    "dispersion_ps_nm_km": float,
    "distance_km": float,
    "wavelength_nm": float,
    "n_symbols": int,
    "training_len": int,
    "mu": float,
    "constellation_order": int,
    "anchor_window": int,
    "anchor_smooth": int,
}
_BASE_DEFAULTS = {
    "wavelength_nm": 1550.0,
    "samples_per_symbol": 2,
    "n_symbols": 65536,
    "training_len": 500,
    "mu": 0.2,
    "constellation_order": 4,
    "anchor_window": 32,
    "anchor_smooth": 9,
}
_TOP_KEYS = {"base", "osnr_grid", "scenarios", "min_errors", "max_symbols", "parallelism", "master_seed"}
_GRID_KEYS = {"start_db", "stop_db", "step_db", "include_no_noise"}
_SCENARIO_KEYS = {"name", "df_tx_hz", "df_lo_hz"}


def _reject_unknown(d: dict, allowed: set, where: str):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _base_scenario_from_dict(d: dict) -> LinkScenario:
    _reject_unknown(d, set(_BASE_KEYS), "base")
    merged = {**_BASE_DEFAULTS, **d}
    missing = {"compensation", "symbol_rate_hz", "dispersion_ps_nm_km", "distance_km"} - set(merged)
    if missing:
        raise ConfigError(f"base is missing required key(s): {sorted(missing)}")
    try:
        return LinkScenario(
            compensation=merged["compensation"],
            tx_laser=LaserSpec(0.0),
            lo_laser=LaserSpec(0.0),
            fiber=FiberSpec.from_engineering(
                merged["dispersion_ps_nm_km"], merged["distance_km"], merged["wavelength_nm"]
            ),
            clock=SymbolClock.from_rate(merged["symbol_rate_hz"], merged["samples_per_symbol"]),
            constellation_order=merged["constellation_order"],
            n_symbols=merged["n_symbols"],
            training_len=merged["training_len"],
            mu=merged["mu"],
            anchor_window=merged["anchor_window"],
            anchor_smooth=merged["anchor_smooth"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(d: dict) -> SweepConfig:
    if not isinstance(d, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(d, _TOP_KEYS, "config")
    for key in ("base", "osnr_grid", "scenarios"):
        if key not in d:
            raise ConfigError(f"config is missing required key: {key}")
    grid_d = d["osnr_grid"]
    _reject_unknown(grid_d, _GRID_KEYS, "osnr_grid")
    scenarios = []
    for i, s in enumerate(d["scenarios"]):
        _reject_unknown(s, _SCENARIO_KEYS, f"scenarios[{i}]")
        scenarios.append(LinewidthSplit(**s))
    try:
        return SweepConfig(
            base=_base_scenario_from_dict(d["base"]),
            osnr_grid=OsnrGrid(**grid_d),
            scenarios=tuple(scenarios),
            min_errors=d.get("min_errors", 100),
            max_symbols=d.get("max_symbols", 1_000_000),
            parallelism=d.get("parallelism", 1),
            master_seed=d.get("master_seed", 1),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg: SweepConfig) -> dict:
    base = cfg.base
    return {
        "base": {
            "compensation": base.compensation,
            "symbol_rate_hz": base.clock.symbol_rate,
            "samples_per_symbol": base.clock.samples_per_symbol,
            "dispersion_ps_nm_km": base.fiber.d_ps_nm_km,
            "distance_km": base.fiber.length_km,
            "wavelength_nm": base.fiber.wavelength_lambda * 1e9,
            "n_symbols": base.n_symbols,
            "training_len": base.training_len,
            "mu": base.mu,
            "constellation_order": base.constellation_order,
            "anchor_window": base.anchor_window,
            "anchor_smooth": base.anchor_smooth,
        },
        "osnr_grid": asdict(cfg.osnr_grid),
        "scenarios": [asdict(s) for s in cfg.scenarios],
        "min_errors": cfg.min_errors,
        "max_symbols": cfg.max_symbols,
        "parallelism": cfg.parallelism,
        "master_seed": cfg.master_seed,
    }


def load_config(path: str) -> SweepConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return config_from_dict(raw)


def config_hash(cfg: SweepConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


PRESETS = {
    "fig4": {
        "base": {
            "compensation": "post",
            "symbol_rate_hz": 28e9,
            "samples_per_symbol": 2,
            "dispersion_ps_nm_km": 16.0,
            "distance_km": 2000.0,
            "wavelength_nm": 1550.0,
            "n_symbols": 65536,
            "training_len": 500,
            "mu": 0.2,
        },
        "osnr_grid": {"start_db": 6.0, "stop_db": 24.0, "step_db": 2.0, "include_no_noise": True},
        "scenarios": [
            {"name": "tx10_lo0", "df_tx_hz": 10e6, "df_lo_hz": 0.0},
            {"name": "tx5_lo5", "df_tx_hz": 5e6, "df_lo_hz": 5e6},
            {"name": "tx0_lo10", "df_tx_hz": 0.0, "df_lo_hz": 10e6},
        ],
        "min_errors": 100,
        "max_symbols": 1_000_000,
        "parallelism": 1,
        "master_seed": 1,
    },
}
PRESETS["fig5"] = json.loads(json.dumps(PRESETS["fig4"]))
PRESETS["fig5"]["base"]["compensation"] = "pre"


def config_from_preset(name: str) -> SweepConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return config_from_dict(PRESETS[name])


# ---------------------------------------------------------------------------
# sweep execution

def trial_stream_id(scenario_idx: int, osnr_idx: int, trial_idx: int) -> int:
    """Schedule-independent stream id for one trial."""
    h = splitmix64(scenario_idx + 1)
    h = splitmix64(h ^ (osnr_idx + 1))
    return splitmix64(h ^ (trial_idx + 1))


def _point_scenario(cfg: SweepConfig, split: LinewidthSplit, osnr_db: float) -> LinkScenario:
    return replace(
        cfg.base,
        tx_laser=LaserSpec(split.df_tx_hz),
        lo_laser=LaserSpec(split.df_lo_hz),
        osnr_db=osnr_db,
    )


def _accumulate_point(cfg, split, s_idx, osnr_db, o_idx, pool) -> BerRecord:
    base = _point_scenario(cfg, split, osnr_db)
    total_errors = 0
    total_bits = 0
    total_symbols = 0
    trial_idx = 0
    wave = max(1, cfg.parallelism)

    def done():
        return total_errors >= cfg.min_errors or total_symbols >= cfg.max_symbols

    while not done():
        scenarios = [
            replace(base, rng=RngStream(cfg.master_seed, trial_stream_id(s_idx, o_idx, trial_idx + i)))
            for i in range(wave)
        ]
        results = pool.map(simulate, scenarios) if pool is not None else map(simulate, scenarios)
        for rec in results:
            total_errors += rec.n_errors
            total_bits += rec.n_bits
            total_symbols += base.n_symbols
            trial_idx += 1
            if done():
                break  # later results in this wave are discarded

    eepn_lw, eff_lw, floor = analytic_companions(base)
    return BerRecord(
        scenario=split.name,
        compensation=base.compensation,
        distance_km=base.fiber.length_km,
        df_tx_hz=split.df_tx_hz,
        df_lo_hz=split.df_lo_hz,
        osnr_db=osnr_db,
        n_bits=total_bits,
        n_errors=total_errors,
        ber=total_errors / total_bits,
        eepn_lw_hz=eepn_lw,
        eff_lw_hz=eff_lw,
        ber_floor_theory=floor,
    )


def run_sweep(cfg: SweepConfig, progress=None) -> ResultSet:
    """Measure BER over every (scenario, OSNR) point of the sweep.

    Deterministic for a given (config, master_seed) regardless of the
    parallelism degree: trials are included in index order and the
    stopping rule is evaluated on that ordered prefix.
    """
    osnr_points = cfg.osnr_grid.points()
    records = []
    pool = ProcessPoolExecutor(max_workers=cfg.parallelism) if cfg.parallelism > 1 else None
    try:
        for s_idx, split in enumerate(cfg.scenarios):
            for o_idx, osnr_db in enumerate(osnr_points):
                rec = _accumulate_point(cfg, split, s_idx, osnr_db, o_idx, pool)
                records.append(rec)
                if progress is not None:
                    progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return ResultSet(
        records=tuple(records),
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        config_hash=config_hash(cfg),
    )


def theory_table(cfg: SweepConfig) -> ResultSet:
    """Analytic-only records: EEPN/effective linewidths and the analytic BER floor
    per scenario, no simulation. ``ber`` is NaN since nothing was counted."""
    records = []
    for split in cfg.scenarios:
        sc = _point_scenario(cfg, split, math.inf)
        eepn_lw, eff_lw, floor = analytic_companions(sc)
        records.append(
            BerRecord(
                scenario=split.name,
                compensation=sc.compensation,
                distance_km=sc.fiber.length_km,
                df_tx_hz=split.df_tx_hz,
                df_lo_hz=split.df_lo_hz,
                osnr_db=math.inf,
                n_bits=0,
                n_errors=0,
                ber=math.nan,
                eepn_lw_hz=eepn_lw,
                eff_lw_hz=eff_lw,
                ber_floor_theory=floor,
            )
        )
    return ResultSet(
        records=tuple(records),
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        config_hash=config_hash(cfg),
    )


# ---------------------------------------------------------------------------
# output

def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _record_row(rec: BerRecord) -> str:
    return ",".join(
        _fmt(v)
        for v in (
            rec.scenario,
            rec.compensation,
            rec.distance_km,
            rec.df_tx_hz,
            rec.df_lo_hz,
            rec.osnr_db,
            rec.n_bits,
            rec.n_errors,
            rec.ber,
            rec.eepn_lw_hz,
            rec.eff_lw_hz,
            rec.ber_floor_theory,
        )
    )


def _json_float(value):
    if math.isinf(value):
        return "inf"
    if math.isnan(value):
        return None
    return value


def results_to_json_dict(results: ResultSet) -> dict:
    return {
        "version": results.version,
        "timestamp": results.timestamp,
        "config_hash": results.config_hash,
        "records": [
            {
                "scenario": r.scenario,
                "compensation": r.compensation,
                "distance_km": r.distance_km,
                "df_tx_hz": r.df_tx_hz,
                "df_lo_hz": r.df_lo_hz,
                "osnr_db": _json_float(r.osnr_db),
                "n_bits": r.n_bits,
                "n_errors": r.n_errors,
                "ber": _json_float(r.ber),
                "eepn_lw_hz": r.eepn_lw_hz,
                "eff_lw_hz": r.eff_lw_hz,
                "ber_floor_theory": r.ber_floor_theory,
            }
            for r in results.records
        ],
    }


def _float_from_json(value) -> float:
    if value == "inf":
        return math.inf
    if value is None:
        return math.nan
    return float(value)


def results_from_json_dict(d: dict) -> ResultSet:
    records = tuple(
        BerRecord(
            scenario=r["scenario"],
            compensation=r["compensation"],
            distance_km=float(r["distance_km"]),
            df_tx_hz=float(r["df_tx_hz"]),
            df_lo_hz=float(r["df_lo_hz"]),
            osnr_db=_float_from_json(r["osnr_db"]),
            n_bits=int(r["n_bits"]),
            n_errors=int(r["n_errors"]),
            ber=_float_from_json(r["ber"]),
            eepn_lw_hz=float(r["eepn_lw_hz"]),
            eff_lw_hz=float(r["eff_lw_hz"]),
            ber_floor_theory=float(r["ber_floor_theory"]),
        )
        for r in d["records"]
    )
    return ResultSet(
        records=records,
        version=d["version"],
        timestamp=d["timestamp"],
        config_hash=d["config_hash"],
    )


def emit(results: ResultSet, path: str, fmt: str = "csv") -> str:
    """Write the result set; CSV's column order is part of the contract."""
    if not results.records:
        raise ValueError("refusing to emit an empty result set")
    if fmt == "csv":
        body = "\n".join([CSV_HEADER, *(_record_row(r) for r in results.records)]) + "\n"
    elif fmt == "json":
        body = json.dumps(results_to_json_dict(results), indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    except OSError as exc:
        raise OSError(f"failed writing results to {path!r}: {exc}") from exc
    return path


def load_results_json(path: str) -> ResultSet:
    with open(path, "r", encoding="utf-8") as fh:
        return results_from_json_dict(json.load(fh))
