"""Multi-run extraction and comparison.

Each run ``i`` uses ``seed = base_seed + i`` for community detection and
depends on nothing else, so runs can be executed in any order or in
parallel. Reports are assembled in run order and serialised with sorted
keys, which makes them byte-identical across executions.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .backbone import (
    METHODS,
    SKIP_BRIDGES,
    Backbone,
    ExtractionError,
    disparity_filter,
    ego_backbone,
    hubs_backbone,
    tune_alpha,
)
from .community import CommunityCover, detect_communities, read_cover, write_cover
from .graph import WeightedGraph, load_edge_list, number_connected_components
from .metrics import (
    MetricError,
    common_nodes_fraction,
    effectiveness_summary,
    kendall_tau,
    pearson,
    rank_biased_overlap,
    rank_nodes,
    top_preservation,
)

logger = logging.getLogger(__name__)

RBO_P_GRID = (0.5, 0.7, 0.8, 0.9, 0.98)
SHORT = {"ego": "OE", "hubs": "OH", "disparity": "DF"}


@dataclass
class RunConfig:
    input: str = ""
    methods: Tuple[str, ...] = METHODS
    s: float = 0.3
    runs: int = 10
    seed: int = 0
    slpa_iters: int = 100
    slpa_threshold: float = 0.3
    prune_policy: str = SKIP_BRIDGES
    alpha: Optional[float] = None
    out: Optional[str] = None
    cover: Optional[str] = None
    top_fraction: float = 0.1
    jobs: int = 1

    def validate(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0 < self.s <= 1:
            raise ValueError("s must lie in (0, 1]")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ValueError(f"methods must be a non-empty subset of {METHODS}, got {list(self.methods)}")
        if self.alpha is not None and not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.slpa_iters < 1:
            raise ValueError("slpa_iters must be >= 1")
        if not 0 < self.slpa_threshold < 1:
            raise ValueError("slpa_threshold must lie in (0, 1)")

    def ordered_methods(self) -> List[str]:
        return [m for m in METHODS if m in self.methods]


@dataclass
class RunResult:
    run: int
    seed: int
    backbones: Dict[str, Backbone] = field(default_factory=dict)
    cover: Optional[CommunityCover] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def extract_run(g: WeightedGraph, config: RunConfig, run: int,
                cover: Optional[CommunityCover] = None) -> RunResult:
    """Detect communities (unless ``cover`` is given) and extract every requested backbone."""
    seed = config.seed + run
    res = RunResult(run, seed)
    if cover is None:
        cover = detect_communities(g, config.slpa_iters, config.slpa_threshold, seed)
    res.cover = cover
    try:
        for method in config.ordered_methods():
            if method == "ego":
                bb = ego_backbone(g, cover, config.s, config.prune_policy)
            elif method == "hubs":
                bb = hubs_backbone(g, cover, config.s, config.prune_policy)
            elif config.alpha is not None:
                bb = disparity_filter(g, config.alpha)
            else:
                if "ego" in res.backbones:
                    target = res.backbones["ego"].graph.number_of_nodes()
                else:
                    target = math.floor(config.s * g.number_of_nodes())
                _, bb = tune_alpha(g, target)
            bb.params["seed"] = seed
            res.backbones[method] = bb
    except ExtractionError as exc:
        res.error = str(exc)
        logger.info("run %d (seed %d) failed: %s", run, seed, exc)
    return res


def _safe(fn, *args):
    try:
        return fn(*args)
    except MetricError:
        return None


def run_metrics(g: WeightedGraph, res: RunResult, top_fraction: float = 0.1) -> dict:
    """Every per-method and per-pair measure for one successful run."""
    methods = {}
    ranked = {}
    for name, bb in res.backbones.items():
        eff = _safe(effectiveness_summary, bb)
        methods[name] = {
            "A_t": top_preservation(g, bb, top_fraction) if bb.graph.number_of_nodes() else 0.0,
            "A_t_source": top_preservation(g, bb, top_fraction, rank_by="source") if bb.graph.number_of_nodes() else 0.0,
            "avg_betweenness": eff.avg_betweenness if eff else None,
            "avg_weighted_degree": eff.avg_weighted_degree if eff else None,
            "avg_link_weight": eff.avg_link_weight if eff else None,
            "nodes": bb.graph.number_of_nodes(),
            "edges": bb.graph.number_of_edges(),
            "components": number_connected_components(bb.graph),
        }
        if bb.method == "disparity":
            methods[name]["alpha"] = bb.params.get("alpha")
        ranked[name] = rank_nodes(g, bb.nodes)
    pairs = {}
    for a, b in combinations([m for m in METHODS if m in res.backbones], 2):
        X, Y = ranked[a], ranked[b]
        n = min(len(X), len(Y))
        entry = {
            "A_n": _safe(common_nodes_fraction, X.nodes, Y.nodes),
            "sizes": [len(X), len(Y)],
            "size_mismatch": len(X) != len(Y),
        }
        for p in RBO_P_GRID:
            entry[f"rbo_{p}"] = _safe(rank_biased_overlap, X, Y, p) if n else None
        entry["pearson"] = _safe(pearson, X.degrees[:n], Y.degrees[:n])
        entry["kendall"] = _safe(kendall_tau, X.ranks[:n], Y.ranks[:n])
        pairs[f"{a}-{b}"] = entry
    return {"run": res.run, "seed": res.seed, "methods": methods, "pairs": pairs}


def _stats(values: Iterable[Optional[float]]) -> dict:
    vals = [float(v) for v in values if v is not None]
    if not vals:
        return {"mean": None, "std": None, "n": 0}
    mean = math.fsum(vals) / len(vals)
    var = math.fsum((v - mean) ** 2 for v in vals) / len(vals)
    return {"mean": mean, "std": math.sqrt(var), "n": len(vals)}


AGG_METHOD_KEYS = ("A_t", "A_t_source", "avg_betweenness", "avg_weighted_degree", "avg_link_weight",
                   "nodes", "edges", "components", "alpha")
AGG_PAIR_KEYS = ("A_n",) + tuple(f"rbo_{p}" for p in RBO_P_GRID) + ("pearson", "kendall")


def aggregate(per_run: Sequence[dict]) -> Tuple[dict, dict]:
    """Mean and population standard deviation of every measure across runs."""
    methods: Dict[str, dict] = {}
    pairs: Dict[str, dict] = {}
    names = [m for m in METHODS if any(m in r["methods"] for r in per_run)]
    for m in names:
        rows = [r["methods"][m] for r in per_run if m in r["methods"]]
        methods[m] = {k: _stats(row.get(k) for row in rows) for k in AGG_METHOD_KEYS if any(k in row for row in rows)}
    pair_names = sorted({p for r in per_run for p in r["pairs"]},
                        key=lambda p: tuple(METHODS.index(x) for x in p.split("-")))
    for p in pair_names:
        rows = [r["pairs"][p] for r in per_run if p in r["pairs"]]
        pairs[p] = {k: _stats(row.get(k) for row in rows) for k in AGG_PAIR_KEYS}
        pairs[p]["size_mismatch_runs"] = sum(1 for row in rows if row["size_mismatch"])
    return methods, pairs


def _load(config: RunConfig) -> Tuple[WeightedGraph, Optional[CommunityCover]]:
    g = load_edge_list(config.input)
    cover = None
    if config.cover:
        cover = read_cover(config.cover)
    return g, cover


def _worker(args) -> Tuple[RunResult, Optional[dict]]:
    g, config, run, cover = args
    res = extract_run(g, config, run, cover)
    return res, (run_metrics(g, res, config.top_fraction) if res.ok else None)


def execute_runs(g: WeightedGraph, config: RunConfig, cover: Optional[CommunityCover] = None,
                 runs: Optional[Sequence[int]] = None) -> List[Tuple[RunResult, Optional[dict]]]:
    order = list(range(config.runs)) if runs is None else list(runs)
    tasks = [(g, config, i, cover) for i in order]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            out = list(pool.map(_worker, tasks))
    else:
        out = [_worker(t) for t in tasks]
    out.sort(key=lambda item: item[0].run)
    return out


def write_run_artifacts(g: WeightedGraph, res: RunResult, out_dir: str) -> None:
    for method, bb in res.backbones.items():
        d = os.path.join(out_dir, method, f"run{res.run}")
        os.makedirs(d, exist_ok=True)
        bb.write(os.path.join(d, "backbone.txt"), os.path.join(d, "provenance.json"))
    if res.cover is not None:
        d = os.path.join(out_dir, "covers")
        os.makedirs(d, exist_ok=True)
        write_cover(res.cover, os.path.join(d, f"run{res.run}.json"), g)


def cmd_extract(config: RunConfig) -> List[RunResult]:
    """Extract backbones for every run and write them under ``config.out``."""
    config.validate()
    g, cover = _load(config)
    results = [res for res, _ in execute_runs(g, config, cover)]
    if not any(r.ok for r in results):
        raise AllRunsFailed([r.error for r in results])
    if config.out:
        for res in results:
            if res.ok:
                write_run_artifacts(g, res, config.out)
    return results


class AllRunsFailed(RuntimeError):
    def __init__(self, errors: Sequence[Optional[str]]):
        self.errors = list(errors)
        first = next((e for e in errors if e), "unknown error")
        super().__init__(f"all {len(errors)} run(s) failed; first error: {first}")


def build_report(g: WeightedGraph, config: RunConfig,
                 outcomes: Sequence[Tuple[RunResult, Optional[dict]]]) -> dict:
    per_run = [m for res, m in outcomes if m is not None]
    if not per_run:
        raise AllRunsFailed([res.error for res, _ in outcomes])
    methods, pairs = aggregate(per_run)
    cfg = asdict(config)
    for key in ("out", "jobs", "input"):
        cfg.pop(key, None)
    cfg["methods"] = list(config.ordered_methods())
    return {
        "network": g.name,
        "N": g.number_of_nodes(),
        "E": g.number_of_edges(),
        "runs": config.runs,
        "successful_runs": len(per_run),
        "failed_runs": [{"run": res.run, "seed": res.seed, "error": res.error} for res, m in outcomes if m is None],
        "config": cfg,
        "methods": methods,
        "pairs": pairs,
        "per_run": per_run,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def cmd_compare(config: RunConfig) -> dict:
    """Run extraction inline, compute every measure per run and aggregate."""
    config.validate()
    g, cover = _load(config)
    outcomes = execute_runs(g, config, cover)
    report = build_report(g, config, outcomes)
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        for res, metrics in outcomes:
            if metrics is None:
                continue
            write_run_artifacts(g, res, config.out)
            d = os.path.join(config.out, "runs")
            os.makedirs(d, exist_ok=True)
            with open(os.path.join(d, f"run{res.run}.json"), "w", encoding="utf-8") as fh:
                fh.write(report_json(metrics))
        with open(os.path.join(config.out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(report_json(report))
        with open(os.path.join(config.out, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write(format_table(report))
    return report


# -- text rendering ----------------------------------------------------------

def _fmt(stat: Optional[dict]) -> str:
    if not stat or stat.get("mean") is None:
        return "-"
    return f"{stat['mean']:.2f}"


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) if i == 0 else str(c).rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
             for r in [header, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def format_table(report: dict) -> str:
    """Aligned text tables rounded to two decimals; the JSON report keeps full precision."""
    methods, pairs = report["methods"], report["pairs"]
    pnames = list(pairs)
    plabel = {p: "-".join(SHORT[x] for x in p.split("-")) for p in pnames}
    mnames = list(methods)
    out = [f"network: {report['network']}  N={report['N']}  runs={report['successful_runs']}/{report['runs']}", ""]
    out.append("Common nodes and top-node preservation")
    out.append(_table(["measure"] + [plabel[p] for p in pnames] + [SHORT[m] for m in mnames],
                      [["A_n"] + [_fmt(pairs[p]["A_n"]) for p in pnames] + ["" for _ in mnames],
                       ["A_t"] + ["" for _ in pnames] + [_fmt(methods[m]["A_t"]) for m in mnames]]))
    out.append("")
    out.append("Rank-biased overlap")
    out.append(_table(["p"] + [plabel[p] for p in pnames],
                      [[str(pv)] + [_fmt(pairs[p][f"rbo_{pv}"]) for p in pnames] for pv in RBO_P_GRID]))
    out.append("")
    out.append("Correlation")
    out.append(_table(["measure"] + [plabel[p] for p in pnames],
                      [["pearson"] + [_fmt(pairs[p]["pearson"]) for p in pnames],
                       ["kendall"] + [_fmt(pairs[p]["kendall"]) for p in pnames]]))
    out.append("")
    out.append("Effectiveness")
    out.append(_table(["measure"] + [SHORT[m] for m in mnames],
                      [[label] + [_fmt(methods[m][key]) for m in mnames]
                       for label, key in (("<beta>", "avg_betweenness"), ("<k>", "avg_weighted_degree"),
                                          ("<w>", "avg_link_weight"), ("nodes", "nodes"), ("edges", "edges"),
                                          ("components", "components"))]))
    return "\n".join(out) + "\n"


# -- DOT export --------------------------------------------------------------

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
           "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5")
OVERLAP_COLOR = "gray"
NEUTRAL_COLOR = "white"


def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: WeightedGraph, cover: Optional[CommunityCover] = None, name: str = "backbone") -> Tuple[str, int]:
    """Render ``g`` as DOT; returns the text and the count of nodes missing from ``cover``.

    Node fill follows the node's single community, gray for overlapping
    nodes. Node width grows with weighted degree and edge pen width with
    weight.
    """
    st = g.strengths()
    max_st = float(st.max()) if len(st) and st.max() > 0 else 1.0
    edges = g.edges()
    max_w = max((w for _, _, w in edges), default=1.0)
    missing = 0
    lines = [f"graph {_dot_id(name)} {{", "  node [shape=circle, style=filled, fixedsize=true, fontsize=10];"]
    for i, lab in enumerate(g.labels):
        if cover is not None and lab in cover.memberships:
            comms = cover.memberships[lab]
            color = OVERLAP_COLOR if len(comms) > 1 else PALETTE[next(iter(comms)) % len(PALETTE)]
        else:
            color = NEUTRAL_COLOR
            if cover is not None:
                missing += 1
        width = 0.3 + 0.9 * float(st[i]) / max_st
        lines.append(f"  {_dot_id(lab)} [fillcolor=\"{color}\", width={width:.3f}];")
    for u, v, w in edges:
        pen = 0.5 + 4.5 * w / max_w
        lines.append(f"  {_dot_id(u)} -- {_dot_id(v)} [penwidth={pen!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n", missing


def cmd_export_dot(backbone_path: str, cover_path: Optional[str] = None) -> str:
    g = load_edge_list(backbone_path)
    cover = read_cover(cover_path) if cover_path else None
    text, missing = to_dot(g, cover, name=g.name or "backbone")
    if missing:
        logger.warning("%d backbone node(s) absent from the cover were left uncoloured", missing)
    return text
