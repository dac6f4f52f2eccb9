"""Monte Carlo experiment orchestration and result persistence.

Each trial is a pure function of ``(master_seed, trial_index)``: the trial
seed splits into separate streams for edge coupling, weights, the vertex
permutation, the perturbation dimensions, and the perturbation families,
so no two random sources ever share a stream.  Records are ordered by
trial index, which makes the CSV output byte-identical across reruns and
worker counts.  Wall-clock timings are kept on the in-memory records only,
never serialized.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import analytic
from .exactla import DEFAULT_RATIONAL_CAP, TypeProfile, type_census
from .field import FieldSpec
from .perturb import CoupledFamilies, PerturbationSpec, canonical_perturb
from .prf import (
    TAG_EDGES,
    TAG_PERM,
    TAG_THETA,
    TAG_TRIAL,
    TAG_WEIGHTS,
    derive_seed,
)
from .randgraph import CouplingSource, Graph, WeightTemplate, karp_sipser, sample_T, sample_graph

CSV_SCHEMA_TAG = "#frozenrank-v1"
CENSUS_CAP = 400

#: Largest primes below 2^31; rational ranks above the exact cap are
#: certified from below by the maximum rank over these reductions.
RATIONAL_PROXY_PRIMES = (2147483647, 2147483629, 2147483587)

_TEMPLATE_KINDS = ("allones", "random")

_CONFIG_REQUIRED = ("n", "d", "field", "trials", "master_seed")
_CONFIG_OPTIONAL = {
    "template": "allones",
    "pert_P": None,
    "pert_seed": None,
    "census": False,
    "output": None,
    "workers": 1,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one experiment."""

    n: int
    d: float
    field: str  # field label: "F2", "Fp:<p>" or "Q"
    trials: int
    master_seed: int
    template: str = "allones"
    pert_P: int | None = None
    pert_seed: int | None = None  # perturbation streams; master_seed when unset
    census: bool = False
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.d >= 0.0:
            raise ValueError("d must be a nonnegative real")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.template not in _TEMPLATE_KINDS:
            raise ValueError(f"template must be one of {_TEMPLATE_KINDS}")
        FieldSpec.parse_label(self.field)  # raises on bad label
        if self.census:
            if self.pert_P is None:
                raise ValueError("census runs require pert_P")
            if self.n > CENSUS_CAP:
                raise ValueError(f"census n={self.n} exceeds the census cap {CENSUS_CAP}")
            if (self.field_spec.kind == "rationals"
                    and self.n + self.pert_P > DEFAULT_RATIONAL_CAP):
                raise ValueError(
                    f"rational census needs n + pert_P <= {DEFAULT_RATIONAL_CAP} "
                    "for exact elimination of the perturbed matrix"
                )
        if self.pert_P is not None and self.pert_P < 1:
            raise ValueError("pert_P must be >= 1")

    @property
    def field_spec(self) -> FieldSpec:
        return FieldSpec.parse_label(self.field)

    @property
    def group(self) -> str:
        """Grouping key for summaries: field label + template kind."""
        return f"{self.field}+{self.template}"

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("config JSON must be an object")
        unknown = set(data) - set(_CONFIG_REQUIRED) - set(_CONFIG_OPTIONAL)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        missing = [k for k in _CONFIG_REQUIRED if k not in data]
        if missing:
            raise ValueError(f"missing config keys: {missing}")
        kwargs = {**_CONFIG_OPTIONAL, **data}
        return ExperimentConfig(**kwargs)


@dataclass
class TrialRecord:
    """One Monte Carlo draw; ``rank + nullity = n`` and the leaf-removal
    upper bound ``rank/n <= 1 - ks_isolated/n`` hold exactly by construction."""

    trial_index: int
    derived_seed: int
    n: int
    d: float
    field: str
    template: str
    rank: int
    nullity: int
    normalized_rank: float
    ks_isolated: int
    ks_core_size: int
    census: TypeProfile | None = None
    theta: tuple[int, int] | None = None
    elapsed_ms: float = 0.0  # in-memory diagnostic, not serialized

    def __post_init__(self):
        if self.rank + self.nullity != self.n:
            raise ValueError("rank + nullity must equal n")
        if self.rank > self.n - self.ks_isolated:
            raise ValueError("leaf-removal upper bound violated; exact arithmetic bug")

    @property
    def group(self) -> str:
        return f"{self.field}+{self.template}"


@dataclass(frozen=True)
class GroupStats:
    count: int
    mean_normalized_rank: float
    stddev_normalized_rank: float


@dataclass(frozen=True)
class CensusSummary:
    trials: int
    mean_residual_y: float
    mean_residual_u: float
    mean_residual_v: float
    max_deficit_z: float
    mean_alpha: float
    mean_alpha_hat: float


@dataclass(frozen=True)
class SummaryReport:
    """Pure aggregation of trial records (always recomputable from them)."""

    d: float
    analytic_min_R: float
    groups: dict
    gaps: dict  # group -> |mean - analytic_min_R|
    pairwise_gaps: dict  # (group_a, group_b) -> |mean_a - mean_b|
    census: CensusSummary | None = None

    def to_json(self) -> str:
        payload = {
            "d": self.d,
            "analytic_min_R": self.analytic_min_R,
            "groups": {
                k: {
                    "count": s.count,
                    "mean_normalized_rank": s.mean_normalized_rank,
                    "stddev_normalized_rank": s.stddev_normalized_rank,
                }
                for k, s in self.groups.items()
            },
            "gaps": dict(self.gaps),
            "pairwise_gaps": {f"{a} vs {b}": v for (a, b), v in self.pairwise_gaps.items()},
        }
        if self.census is not None:
            payload["census"] = {
                "trials": self.census.trials,
                "mean_residual_y": self.census.mean_residual_y,
                "mean_residual_u": self.census.mean_residual_u,
                "mean_residual_v": self.census.mean_residual_v,
                "max_deficit_z": self.census.max_deficit_z,
                "mean_alpha": self.census.mean_alpha,
                "mean_alpha_hat": self.census.mean_alpha_hat,
            }
        return json.dumps(payload, indent=2, sort_keys=True)


def summarize(records: list[TrialRecord], d: float) -> SummaryReport:
    """Aggregate records (possibly spanning several field/template groups)."""
    by_group: dict[str, list[float]] = {}
    for rec in records:
        by_group.setdefault(rec.group, []).append(rec.normalized_rank)
    limit = analytic.min_R(d)
    groups = {}
    for key, vals in sorted(by_group.items()):
        mean = statistics.fmean(vals)
        std = statistics.stdev(vals) if len(vals) > 1 else 0.0
        groups[key] = GroupStats(count=len(vals), mean_normalized_rank=mean,
                                 stddev_normalized_rank=std)
    gaps = {k: abs(s.mean_normalized_rank - limit) for k, s in groups.items()}
    keys = sorted(groups)
    pairwise = {
        (a, b): abs(groups[a].mean_normalized_rank - groups[b].mean_normalized_rank)
        for i, a in enumerate(keys)
        for b in keys[i + 1:]
    }
    census_part = None
    with_census = [r for r in records if r.census is not None]
    if with_census:
        res_y, res_u, res_v, defs = [], [], [], []
        for rec in with_census:
            prof = rec.census
            fy, fu, fv = analytic.type_functions(prof, lambda r: analytic.phi(d, r))
            res_y.append(abs(prof.y - fy))
            res_u.append(abs(prof.u - fu))
            res_v.append(abs(prof.v - fv))
            defs.append(max(0.0, analytic.phi(d, prof.y) - prof.z))
        census_part = CensusSummary(
            trials=len(with_census),
            mean_residual_y=statistics.fmean(res_y),
            mean_residual_u=statistics.fmean(res_u),
            mean_residual_v=statistics.fmean(res_v),
            max_deficit_z=max(defs),
            mean_alpha=statistics.fmean(r.census.alpha for r in with_census),
            mean_alpha_hat=statistics.fmean(r.census.alpha_hat for r in with_census),
        )
    return SummaryReport(
        d=d,
        analytic_min_R=limit,
        groups=groups,
        gaps=gaps,
        pairwise_gaps=pairwise,
        census=census_part,
    )


# ------------------------------------------------------------------- trials


def _trial_streams(cfg: ExperimentConfig, index: int):
    trial_seed = derive_seed(cfg.master_seed, index, TAG_TRIAL)
    coupling = CouplingSource(derive_seed(trial_seed, 0, TAG_EDGES))
    weight_seed = derive_seed(trial_seed, 0, TAG_WEIGHTS)
    return trial_seed, coupling, weight_seed


def _rank_of_graph(cfg: ExperimentConfig, G: Graph) -> int:
    """Exact rank; rationals above the exact cap use the documented proxy:
    the maximum rank over three large-prime reductions (a lower-bound
    certificate for the rational rank, equal to it with high probability)."""
    spec = cfg.field_spec
    if spec.kind != "rationals" or cfg.n <= DEFAULT_RATIONAL_CAP:
        return G.adjacency().rank()
    best = 0
    for p in RATIONAL_PROXY_PRIMES:
        proxy = FieldSpec.prime(p)
        edges = []
        for i, j, w in G.edges:
            num = w.numerator % p
            den = w.denominator % p
            edges.append((i, j, num * pow(den, p - 2, p) % p))
        best = max(best, Graph(n=G.n, field=proxy, edges=tuple(edges)).adjacency().rank())
    return best


def _run_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    start = time.perf_counter()
    trial_seed, coupling, weight_seed = _trial_streams(cfg, index)
    spec = cfg.field_spec
    template = WeightTemplate(spec, cfg.n, cfg.template, weight_seed)
    G = sample_graph(cfg.n, cfg.d / cfg.n, template, coupling)
    rank = _rank_of_graph(cfg, G)
    ks = karp_sipser(G)
    return TrialRecord(
        trial_index=index,
        derived_seed=trial_seed,
        n=cfg.n,
        d=cfg.d,
        field=cfg.field,
        template=cfg.template,
        rank=rank,
        nullity=cfg.n - rank,
        normalized_rank=rank / cfg.n,
        ks_isolated=ks.isolated_count,
        ks_core_size=len(ks.core_vertices),
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def _run_census_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    start = time.perf_counter()
    trial_seed, coupling, weight_seed = _trial_streams(cfg, index)
    spec = cfg.field_spec
    template = WeightTemplate(spec, cfg.n, cfg.template, weight_seed)
    perm_seed = derive_seed(trial_seed, 0, TAG_PERM)
    pert_base = trial_seed if cfg.pert_seed is None else \
        derive_seed(cfg.pert_seed, index, TAG_TRIAL)
    theta = PerturbationSpec.draw(cfg.pert_P, derive_seed(pert_base, 0, TAG_THETA))
    fams = CoupledFamilies.from_seed(pert_base)
    T = sample_T(cfg.n, cfg.n, cfg.d / cfg.n, template, coupling, perm_seed=perm_seed)
    perturbed = canonical_perturb(T, theta, fams)
    profile = type_census(perturbed, census_size=cfg.n)
    rank = T.rank()
    # leaf-removal statistics are relabelling-invariant, so the unpermuted
    # graph with the same coupling gives the statistics of T's support
    ks = karp_sipser(sample_graph(cfg.n, cfg.d / cfg.n, template, coupling))
    return TrialRecord(
        trial_index=index,
        derived_seed=trial_seed,
        n=cfg.n,
        d=cfg.d,
        field=cfg.field,
        template=cfg.template,
        rank=rank,
        nullity=cfg.n - rank,
        normalized_rank=rank / cfg.n,
        ks_isolated=ks.isolated_count,
        ks_core_size=len(ks.core_vertices),
        census=profile,
        theta=(theta.theta_r, theta.theta_c),
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def _run_many(cfg: ExperimentConfig, runner) -> list[TrialRecord]:
    indices = range(cfg.trials)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(runner, [cfg] * cfg.trials, indices))
    else:
        records = [runner(cfg, i) for i in indices]
    records.sort(key=lambda r: r.trial_index)
    return records


def run_experiment(cfg: ExperimentConfig) -> tuple[list[TrialRecord], SummaryReport]:
    """Run rank/leaf-removal trials; persist CSV when cfg.output is set."""
    if cfg.census:
        return run_census(cfg)
    records = _run_many(cfg, _run_trial)
    if cfg.output:
        write_csv_file(records, cfg.output)
    return records, summarize(records, cfg.d)


def run_census(cfg: ExperimentConfig) -> tuple[list[TrialRecord], SummaryReport]:
    """Run perturbed-census trials (requires ``pert_P``; ``n`` capped)."""
    if cfg.pert_P is None:
        raise ValueError("census runs require pert_P")
    records = _run_many(cfg, _run_census_trial)
    if cfg.output:
        write_csv_file(records, cfg.output)
    return records, summarize(records, cfg.d)


# ---------------------------------------------------------------------- CSV

_BASE_COLUMNS = (
    "trial_index",
    "derived_seed",
    "n",
    "d",
    "field",
    "template",
    "rank",
    "nullity",
    "normalized_rank",
    "ks_isolated",
    "ks_core_size",
)
_CENSUS_COLUMNS = (
    "theta_r",
    "theta_c",
    "count_x",
    "count_y",
    "count_z",
    "count_u",
    "count_v",
    "frozen_count",
    "frozen_count_t",
    "x",
    "y",
    "z",
    "u",
    "v",
    "alpha",
    "alpha_hat",
)


def records_to_csv(records: list[TrialRecord]) -> str:
    """Canonical CSV text: schema tag line, header row, one row per trial."""
    with_census = any(r.census is not None for r in records)
    columns = _BASE_COLUMNS + (_CENSUS_COLUMNS if with_census else ())
    buf = io.StringIO()
    buf.write(CSV_SCHEMA_TAG + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in sorted(records, key=lambda r: r.trial_index):
        row = [
            rec.trial_index,
            rec.derived_seed,
            rec.n,
            rec.d,
            rec.field,
            rec.template,
            rec.rank,
            rec.nullity,
            rec.normalized_rank,
            rec.ks_isolated,
            rec.ks_core_size,
        ]
        if with_census:
            prof = rec.census
            if prof is None:
                raise ValueError("mixed census/non-census records in one CSV")
            row += [
                rec.theta[0],
                rec.theta[1],
                prof.count_x,
                prof.count_y,
                prof.count_z,
                prof.count_u,
                prof.count_v,
                prof.frozen_count,
                prof.frozen_count_t,
                prof.x,
                prof.y,
                prof.z,
                prof.u,
                prof.v,
                prof.alpha,
                prof.alpha_hat,
            ]
        writer.writerow(row)
    return buf.getvalue()


def write_csv_file(records: list[TrialRecord], path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fp:
            fp.write(records_to_csv(records))
    except OSError as exc:
        raise OSError(f"could not write records to {path}: {exc}") from exc
