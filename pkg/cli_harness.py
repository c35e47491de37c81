"""Configuration-driven verification runs: spectra, bounds, check suites and report files"""
import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd
import plotly.graph_objects as go
import scipy
import toml

import database
import settings
from bounds import BoundInputs, conjectural_bounds, evaluate_all, theorem1_average
from eigensolver import default_extrapolation_order, richardson_extrapolate, smallest_eigenvalues
from fourier_checks import CheckReport, check_global_identities, check_pointwise_bounds
from geometry import DOMAIN_KINDS, DomainError, DomainSpec, discretize, inertia_floor, measure
from lemma_engine import fuzz_lemma1
from rearrange import GriddedFunction, rearrange, rebinning_tolerance, slope_bound_check

logger = logging.getLogger(__name__)

CHECKS = ("bounds", "fourier", "rearrange", "lemma1")
FORMATS = ("csv", "json", "gnuplot", "html", "db")
CONFIG_KEYS = ("domain", "l", "k_max", "levels", "checks", "formats", "out", "fourier", "lemma1", "seed")
CSV_COLUMNS = ["k", "mean_lambda", "theorem1", "classical", "melas", "polya", "margin_ratio", "asymptotic_ratio"]
SERIES = CSV_COLUMNS[1:]

EXIT_PASS = 0
EXIT_CONFIG = 1
EXIT_VIOLATION = 2
EXIT_SOLVER = 3


class ConfigError(ValueError):
    """A run configuration that does not match the schema; `field` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSpec
    l: int
    k_max: int = settings.DEFAULT_K_MAX
    levels: tuple = ()
    checks: tuple = settings.DEFAULT_CHECKS
    formats: tuple = settings.DEFAULT_FORMATS
    out: str = settings.DEFAULT_OUT
    fourier: dict = field(default_factory=lambda: dict(settings.FOURIER_DEFAULTS))
    lemma1: dict = field(default_factory=lambda: dict(settings.LEMMA1_DEFAULTS))
    seed: int = 0

    def to_dict(self):
        return {
            "domain": self.domain.to_dict(),
            "l": self.l,
            "k_max": self.k_max,
            "levels": list(self.levels),
            "checks": list(self.checks),
            "formats": list(self.formats),
            "out": self.out,
            "fourier": dict(self.fourier),
            "lemma1": dict(self.lemma1),
            "seed": self.seed,
        }


def _positive_int(data, key, default=None):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(key, f"must be a positive integer, got {value!r}")
    return value


def _subset(data, key, allowed, default):
    value = data.get(key, list(default))
    if isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    unknown = [v for v in value if v not in allowed]
    if unknown or not value:
        raise ConfigError(key, f"must be a nonempty subset of {allowed}, got {value!r}")
    # Fixed order keeps the config hash stable
    return tuple(v for v in allowed if v in value)


def _merged(data, key, defaults):
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(key, f"must be an object, got {type(value).__name__}")
    unknown = sorted(set(value) - set(defaults))
    if unknown:
        raise ConfigError(f"{key}.{unknown[0]}", "unknown key")
    return {**defaults, **value}


def default_levels(domain):
    """[h, h/2] with h the base cell for the domain's dimension, or the mask cell."""
    if domain.kind == "mask":
        h = domain.cell
    else:
        lower, upper = domain.bounds()
        h = float(np.max(upper - lower)) / settings.DEFAULT_CELLS[domain.dim]
    return (h, h / 2)


def _parse(text, suffix):
    if suffix == ".toml":
        return toml.loads(text)
    if suffix == ".json":
        return json.loads(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return toml.loads(text)


def load_config(source, base_dir=None):
    """Parse and validate a run configuration from a .json/.toml path or inline JSON/TOML text."""
    suffix = None
    if isinstance(source, Path) or (isinstance(source, str) and Path(source).suffix in (".json", ".toml")):
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        text, suffix = path.read_text(), path.suffix
        base_dir = base_dir or path.parent
    else:
        text = source

    try:
        data = _parse(text, suffix)
    except (json.JSONDecodeError, toml.TomlDecodeError) as e:
        raise ConfigError("config", f"not valid JSON or TOML ({e})") from e
    if not isinstance(data, dict):
        raise ConfigError("config", "must be an object")

    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    if "domain" not in data:
        raise ConfigError("domain", "is required")
    if isinstance(data["domain"], dict) and data["domain"].get("kind") not in DOMAIN_KINDS:
        raise ConfigError("domain.kind", f"must be one of {DOMAIN_KINDS}, got {data['domain'].get('kind')!r}")
    try:
        domain = DomainSpec.from_dict(data["domain"], base_dir)
    except DomainError as e:
        raise ConfigError("domain", str(e)) from e
    if domain.dim > 2:
        raise ConfigError("domain", f"eigensolves support dimension 1 or 2, got {domain.dim}")

    l = _positive_int(data, "l")
    k_max = _positive_int(data, "k_max", settings.DEFAULT_K_MAX)

    levels = data.get("levels")
    if levels is None:
        levels = default_levels(domain)
    if not isinstance(levels, (list, tuple)) or not levels:
        raise ConfigError("levels", "must be a nonempty list of cell sizes")
    try:
        levels = tuple(float(h) for h in levels)
    except (TypeError, ValueError) as e:
        raise ConfigError("levels", f"must be numbers ({e})") from e
    if any(not h > 0 for h in levels):
        raise ConfigError("levels", f"cell sizes must be positive, got {list(levels)}")
    if any(not math.isclose(fine, coarse / 2, rel_tol=1e-9) for coarse, fine in zip(levels, levels[1:])):
        raise ConfigError("levels", f"each level must halve the previous one, got {list(levels)}")

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", f"must be an integer, got {seed!r}")

    config = RunConfig(
        domain=domain,
        l=l,
        k_max=k_max,
        levels=levels,
        checks=_subset(data, "checks", CHECKS, settings.DEFAULT_CHECKS),
        formats=_subset(data, "formats", FORMATS, settings.DEFAULT_FORMATS),
        out=str(data.get("out", settings.DEFAULT_OUT)),
        fourier=_merged(data, "fourier", settings.FOURIER_DEFAULTS),
        lemma1=_merged(data, "lemma1", settings.LEMMA1_DEFAULTS),
        seed=seed,
    )

    interior = discretize(domain, levels[0]).size
    if k_max > interior:
        raise ConfigError("k_max", f"{k_max} exceeds the {interior} interior points at h={levels[0]:g}")
    return config


def config_hash(config):
    """sha256 of the canonical JSON form of the config"""
    canonical = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class BoundReport:
    """One row per k comparing the mean of the first k eigenvalues with every bound."""
    rows: pd.DataFrame
    metadata: dict

    @property
    def passed(self):
        return not bool(self.rows["violation"].any())

    def records(self):
        """CSV columns as JSON-ready dicts, inapplicable cells as None"""
        table = self.rows[CSV_COLUMNS].astype(object)
        return table.where(pd.notna(table), None).to_dict("records")


@dataclass(frozen=True, eq=False)
class RunResult:
    config: RunConfig
    report: BoundReport
    checks: list
    spectrum: object
    timestamp: str

    @property
    def passed(self):
        """Bound rows and every non-advisory check"""
        return self.report.passed and all(c.passed for c in self.checks if not c.details.get("advisory"))


def lowered_inertia(n, V, I, inertia_tolerance):
    """Smallest I consistent with the quadrature tolerance, never below the ball's floor."""
    if inertia_tolerance <= 0:
        return I
    floor = inertia_floor(n, V)
    if I - inertia_tolerance > floor:
        logger.info(f"inertia lowered by its tolerance to {I - inertia_tolerance:.6g}")
        return I - inertia_tolerance
    logger.info(f"inertia tolerance {inertia_tolerance:.3g} reaches the ball floor, using I={floor:.6g}")
    return min(I, floor)


def bound_rows(spectrum, n, l, V, I, k_max, inertia_tolerance=0.0):
    """Bound table for k = 1..k_max; a row is a violation when mean_lambda < theorem1 - tol.

    The inertia actually used for the tolerance is kept in rows.attrs["inertia_used"].
    """
    rows = []
    errors = spectrum.error_estimates
    lowered_I = lowered_inertia(n, V, I, inertia_tolerance)
    for k in range(1, k_max + 1):
        mean_lambda = float(np.mean(spectrum.values[:k]))
        inputs = BoundInputs(n, l, V, I, k)
        values = evaluate_all(inputs)
        tol = 0.0 if errors is None else float(np.mean(errors[:k]))
        if lowered_I < I:
            # Underestimating I raises the bound
            lowered = BoundInputs(n, l, V, lowered_I, k)
            tol += theorem1_average(lowered).value - values["theorem1"]
        rows.append({
            "k": k,
            "mean_lambda": mean_lambda,
            "theorem1": values["theorem1"],
            "classical": values["classical"],
            "melas": values.get("melas", np.nan),
            "polya": values.get("polya", np.nan),
            "margin_ratio": mean_lambda / values["theorem1"],
            "asymptotic_ratio": mean_lambda / values["asymptotic"],
            "tolerance": tol,
            "violation": mean_lambda < values["theorem1"] - tol,
        })
    table = pd.DataFrame(rows)
    table.attrs["inertia_used"] = lowered_I
    return table


def _solve_levels(config, want_vectors):
    def solve(h):
        return smallest_eigenvalues(discretize(config.domain, h), config.l, config.k_max, want_vectors)

    workers = min(settings.THREADS, len(config.levels))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(solve, config.levels))


def _bound_checks(rows, l):
    # Strict: the largest classical - theorem1 gap must be negative
    gap = float((rows["classical"] - rows["theorem1"]).max())
    checks = [CheckReport("theorem1_above_classical", gap, 0.0, gap < 0, 0.0)]
    if l == 1:
        relative = ((rows["theorem1"] - rows["melas"]).abs() / rows["theorem1"]).max()
        checks.append(CheckReport.identity("theorem1_equals_melas", float(relative), 0.0, 1e-12))
    return checks


def _rearrange_checks(spectrum, l):
    """Rearrangement facts for f = u_1^2 on the finest lattice."""
    f = GriddedFunction(spectrum.grid, spectrum.vectors[:, 0] ** 2)
    result = rearrange(f, l)
    slope = slope_bound_check(f)
    return [
        CheckReport.identity("rearranged_mass", result.mass, f.mass, 1e-12 * f.mass),
        CheckReport.inequality("rearranged_moment", result.radial_moment_2l, f.radial_moment(l),
                               rebinning_tolerance(f, result)),
        CheckReport(
            "slope_bound", slope.worst_slope, slope.tau, slope.passed, settings.TOL_SLOPE * slope.tau,
            details={"advisory": True, "skipped": slope.skipped, "connected": slope.connected,
                     "ratio": slope.worst_ratio},
        ),
    ]


def fourier_suite(spectrum, fourier, seed):
    """Pointwise checks at random z in [-Z, Z]^n plus the global identities on a z lattice."""
    n = spectrum.grid.dim
    k = min(int(fourier["k"]), spectrum.count)
    Z, dz = float(fourier["Z"]), float(fourier["dz"])
    if n == 2:
        # Two-dimensional z quadrature at reduced sampling
        dz = max(dz, 2 * Z / 200)
    rng = np.random.default_rng(seed)
    zs = rng.uniform(-Z, Z, size=(int(fourier["samples"]), n))
    return check_pointwise_bounds(spectrum, k, zs) + check_global_identities(spectrum, k, Z, dz)


def run_report(config):
    """Solve every level, extrapolate, evaluate the bounds and run the requested check suites."""
    logger.info(f"run {config.domain.label} l={config.l} k_max={config.k_max} levels={list(config.levels)}")
    want_vectors = "fourier" in config.checks or "rearrange" in config.checks
    spectra = _solve_levels(config, want_vectors)
    spectrum = spectra[-1]
    order = None
    if len(spectra) >= 2:
        order = default_extrapolation_order(config.domain.kind, config.l)
        spectrum = richardson_extrapolate(spectra[-2], spectra[-1], order)

    if config.domain.has_analytic_measure:
        geometry = measure(config.domain)
    else:
        geometry = measure(config.domain, min(config.levels))
    n = config.domain.dim

    rows = bound_rows(spectrum, n, config.l, geometry.volume, geometry.inertia, config.k_max, geometry.tolerance)
    if not (rows["violation"].any()):
        logger.info(f"mean eigenvalues clear the inertia bound for k=1..{config.k_max}, "
                    f"min margin {rows['margin_ratio'].min():.4f}")
    else:
        logger.warning(f"mean eigenvalue below the inertia bound at k={rows.loc[rows['violation'], 'k'].tolist()}; "
                       f"refine the grid levels")

    checks = []
    if "bounds" in config.checks:
        checks += _bound_checks(rows, config.l)
    if "fourier" in config.checks:
        checks += fourier_suite(spectrum, config.fourier, config.seed)
    if "rearrange" in config.checks:
        checks += _rearrange_checks(spectrum, config.l)
    if "lemma1" in config.checks:
        summary = fuzz_lemma1(**config.lemma1)
        checks.append(CheckReport.inequality(
            "lemma1_fuzz", float(summary["violations"].sum()), 0.0, 0.0,
            samples=int(summary["samples"].sum()), min_ratio=float(summary["min_ratio"].min()),
        ))

    first = BoundInputs(n, config.l, geometry.volume, geometry.inertia, 1)
    conjectural = conjectural_bounds(first, config.domain.kind)
    if conjectural:
        logger.info(f"{', '.join(conjectural)} only conjectured on {config.domain.label}")

    metadata = {
        "config_hash": config_hash(config),
        "config": config.to_dict(),
        "domain": config.domain.label,
        "l": config.l,
        "levels": list(config.levels),
        "extrapolation_order": order,
        "method": spectrum.method,
        "volume": geometry.volume,
        "inertia": geometry.inertia,
        "conjectural": conjectural,
        "tolerances": {
            "geometry": geometry.tolerance,
            "inertia_used": rows.attrs["inertia_used"],
            "slope": settings.TOL_SLOPE,
            "rows": rows["tolerance"].tolist(),
        },
        "versions": {"numpy": np.__version__, "scipy": scipy.__version__, "pandas": pd.__version__},
    }
    timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return RunResult(config, BoundReport(rows, metadata), checks, spectrum, timestamp)


def _write_json(result, path):
    payload = {
        "metadata": result.report.metadata,
        "rows": result.report.records(),
        "checks": [c.to_dict() for c in result.checks],
        "spectrum": result.spectrum.to_dict(),
        "passed": result.passed,
        "timestamp": result.timestamp,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")


def _write_gnuplot(rows, out_dir):
    paths = []
    for series in SERIES:
        data = rows[["k", series]].dropna()
        if data.empty:
            continue
        path = out_dir / f"{series}.dat"
        lines = [f"# k {series}"] + [f"{int(k)} {value:.17g}" for k, value in data.itertuples(index=False)]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths


def _write_html(result, path):
    rows = result.report.rows
    fig = go.Figure()
    conjectural = result.report.metadata.get("conjectural", [])
    for series in ("mean_lambda", "theorem1", "classical", "melas", "polya"):
        data = rows[["k", series]].dropna()
        if not data.empty:
            name = f"{series} (conjectural)" if series in conjectural else series
            fig.add_trace(go.Scatter(x=data["k"], y=data[series], mode="lines+markers", name=name))
    fig.update_layout(
        title=f"{result.config.domain.label}, l={result.config.l}",
        xaxis_title="k",
        yaxis_title="mean of the first k eigenvalues",
        yaxis_type="log",
    )
    fig.write_html(str(path), include_plotlyjs="cdn")


def emit(result, formats=None, out_dir=None):
    """Write the report in each requested format; returns the written paths."""
    formats = result.config.formats if formats is None else formats
    out_dir = Path(out_dir or result.config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = result.report.rows
    paths = []

    for fmt in formats:
        if fmt == "csv":
            path = out_dir / "report.csv"
            rows[CSV_COLUMNS].to_csv(path, index=False, na_rep="")
            paths.append(path)
        elif fmt == "json":
            path = out_dir / "report.json"
            _write_json(result, path)
            paths.append(path)
        elif fmt == "gnuplot":
            paths.extend(_write_gnuplot(rows, out_dir))
        elif fmt == "html":
            path = out_dir / "report.html"
            _write_html(result, path)
            paths.append(path)
        elif fmt == "db":
            count = database.save_report(rows, result.report.metadata["config_hash"],
                                         result.config.domain.label, result.config.l)
            logger.info(f"stored {count} rows in {settings.DATABASE_PATH}")
        else:
            raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")

    logger.info(f"wrote {[str(p) for p in paths]}")
    return paths


def load_report(path):
    """Read a JSON report back; rows come back as a DataFrame with the CSV columns."""
    data = json.loads(Path(path).read_text())
    rows = pd.DataFrame(data["rows"], columns=CSV_COLUMNS).astype(float)
    rows["k"] = rows["k"].astype(int)
    return {**data, "rows": rows}
