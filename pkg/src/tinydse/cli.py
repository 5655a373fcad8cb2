"""Command-line front end.

    tinydse size     --arch resnet10 --scheme fixed8 --modality fusion
    tinydse cost     --arch resnet10 --scheme fixed8 --modality fusion --cores 2
    tinydse latency  --arch resnet10 --scheme xnor_2_1 --coeffs coeffs.csv
    tinydse eer      --scores scores.csv --far 1,5,10
    tinydse explore  --coeffs coeffs.csv --results results.csv --out out/

Exit status: 0 success, 3 unreadable input file, 4 configuration error,
5 infeasible hardware requirement, 6 metric not computable, 1 anything else
from this package. Usage errors exit 2 (argparse).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import archmodel, bioeval, dse, footprint, hwcatalog, perfmodel, report
from .errors import ConfigError, EvaluationError, InfeasibleError, ParseError, SpecError, TinyDSEError
from .footprint import MB, PrecisionScheme

log = logging.getLogger("tinydse")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 3
EXIT_CONFIG = 4
EXIT_INFEASIBLE = 5
EXIT_EVAL = 6

COMMANDS = ("size", "cost", "latency", "eer", "explore")


@dataclass
class RunConfig:
    command: str
    catalog: Path | None = None
    archs: Path | None = None
    coeffs: Path | None = None
    results: Path | None = None
    scores: Path | None = None
    embeddings: Path | None = None
    arch: str | None = None
    scheme: str | None = None
    modality: str = "face"
    cores: int | None = None
    fars: tuple[float, ...] = dse.DEFAULT_FARS
    code_size: int = footprint.DEFAULT_CODE_SIZE
    include_preprocessing: bool = False
    fmt: str = "csv"
    out: Path | None = None
    psram_mb: int | None = None
    flash_mb: int | None = None
    bins: int | None = None
    hist_range: tuple[float, float] = (0.4, 1.7)
    fusion_memory: str = "max"
    per_layer: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("catalog", "archs", "coeffs", "results", "scores", "embeddings"):
            p = getattr(self, name)
            if p is not None and not Path(p).exists():
                raise ConfigError(f"--{name} file not found: {p}")
        for f in self.fars:
            if not 0 < f < 100:
                raise ConfigError(f"FAR levels must be percentages in (0, 100), got {f:g}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        if self.modality not in dse.MODALITIES:
            raise ConfigError(f"modality must be one of {dse.MODALITIES}, got {self.modality!r}")
        if self.cores is not None and self.cores < 1:
            raise ConfigError("--cores must be >= 1")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _range(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected lo,hi")
    return vals[0], vals[1]


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--catalog", type=Path, help="part catalog CSV (default: bundled catalog)")
    shared.add_argument("--archs", type=Path, help="architecture CSV (default: bundled six-model family)")
    shared.add_argument("--coeffs", type=Path, help="latency coefficient CSV")
    shared.add_argument("--results", type=Path, help="measured accuracy CSV")
    shared.add_argument("--scores", type=Path, help="label,distance CSV")
    shared.add_argument("--embeddings", type=Path, help="embedding-pair CSV")
    shared.add_argument("--arch", help="architecture name from --archs")
    shared.add_argument("--scheme", help="float32, fixed8 or xnor_A_W")
    shared.add_argument("--modality", default="face", choices=dse.MODALITIES)
    shared.add_argument("--cores", type=int, help="processor core count")
    shared.add_argument("--far", type=_float_list, default=dse.DEFAULT_FARS, help="FAR levels in percent, e.g. 1,5,10")
    shared.add_argument("--code-size-kb", type=int, default=footprint.DEFAULT_CODE_SIZE // 1024)
    shared.add_argument("--include-preprocessing", action="store_true")
    shared.add_argument("--format", dest="fmt", default="csv", choices=("csv", "json"))
    shared.add_argument("--out", type=Path, help="output file (directory for explore); stdout if omitted")

    parser = argparse.ArgumentParser(prog="tinydse", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("size", parents=[shared], help="weight and activation footprint of one model")
    p.add_argument("--per-layer", action="store_true", help="emit the per-layer breakdown instead of the summary")
    p = sub.add_parser("cost", parents=[shared], help="bill of materials of the minimal board")
    p.add_argument("--psram-mb", type=int, help="pin the PSRAM requirement instead of deriving it")
    p.add_argument("--flash-mb", type=int, help="pin the flash requirement instead of deriving it")
    p.add_argument("--fusion-memory", default="max", choices=("max", "sum"))
    sub.add_parser("latency", parents=[shared], help="estimated inference latency")
    p = sub.add_parser("eer", parents=[shared], help="EER and FRR at fixed FAR from scores or embeddings")
    p.add_argument("--bins", type=int, help="also emit a distance histogram with this many bins")
    p.add_argument("--hist-range", type=_range, default=(0.4, 1.7), help="histogram range lo,hi")
    p = sub.add_parser("explore", parents=[shared], help="evaluate the full design space and its Pareto fronts")
    p.add_argument("--fusion-memory", default="max", choices=("max", "sum"))
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        catalog=ns.catalog,
        archs=ns.archs,
        coeffs=ns.coeffs,
        results=ns.results,
        scores=ns.scores,
        embeddings=ns.embeddings,
        arch=ns.arch,
        scheme=ns.scheme,
        modality=ns.modality,
        cores=ns.cores,
        fars=tuple(ns.far),
        code_size=ns.code_size_kb * 1024,
        include_preprocessing=ns.include_preprocessing,
        fmt=ns.fmt,
        out=ns.out,
        psram_mb=getattr(ns, "psram_mb", None),
        flash_mb=getattr(ns, "flash_mb", None),
        bins=getattr(ns, "bins", None),
        hist_range=getattr(ns, "hist_range", (0.4, 1.7)),
        fusion_memory=getattr(ns, "fusion_memory", "max"),
        per_layer=getattr(ns, "per_layer", False),
    )


# -- loaders -----------------------------------------------------------------


def _catalog(cfg: RunConfig) -> hwcatalog.PartCatalog:
    return hwcatalog.load_catalog(cfg.catalog) if cfg.catalog else hwcatalog.default_catalog()


def _archs(cfg: RunConfig) -> dict[str, archmodel.ArchSpec]:
    path = cfg.archs or archmodel.default_archs_path()
    return archmodel.load_archs(path)


def _coeffs(cfg: RunConfig) -> perfmodel.LatencyCoeffs:
    if cfg.coeffs is None:
        raise ConfigError("latency estimates need a coefficients file (--coeffs)")
    return perfmodel.load_coeffs(cfg.coeffs)


def _selected_arch(cfg: RunConfig) -> archmodel.ArchSpec:
    specs = _archs(cfg)
    if cfg.arch is None:
        raise ConfigError(f"--arch is required; known: {', '.join(specs)}")
    if cfg.arch not in specs:
        raise ConfigError(f"unknown architecture {cfg.arch!r}; known: {', '.join(specs)}")
    return specs[cfg.arch]


def _selected_scheme(cfg: RunConfig) -> PrecisionScheme:
    if cfg.scheme is None:
        raise ConfigError("--scheme is required (float32, fixed8 or xnor_A_W)")
    try:
        return PrecisionScheme.parse(cfg.scheme)
    except SpecError as exc:
        raise ConfigError(str(exc)) from None


def _branches(modality: str) -> int:
    return 2 if modality == "fusion" else 1


def _emit(cfg: RunConfig, table: report.Table) -> None:
    report.write_text(report.render(table, cfg.fmt), cfg.out)


# -- commands ----------------------------------------------------------------


def cmd_size(cfg: RunConfig) -> int:
    spec, scheme = _selected_arch(cfg), _selected_scheme(cfg)
    graph = archmodel.build_arch(spec)
    rep = footprint.size_report(graph, scheme, cfg.code_size)
    if cfg.per_layer:
        header = ["layer", "kind", "param_bytes", "activation_bytes"]
        rows = [[l.name, l.kind, str(l.param_bytes), str(l.activation_bytes)] for l in rep.per_layer_breakdown]
        _emit(cfg, (header, rows))
        return EXIT_OK
    n = _branches(cfg.modality)
    pbytes = n * rep.param_bytes
    peak = rep.peak_activation_bytes * (n if cfg.fusion_memory == "sum" else 1)
    header = [
        "arch",
        "scheme",
        "modality",
        "param_bytes",
        "peak_activation_bytes",
        "peak_layer",
        "code_size_bytes",
        "flash_required_bytes",
        "psram_required_bytes",
    ]
    row = [
        spec.name,
        scheme.tag,
        cfg.modality,
        str(pbytes),
        str(peak),
        rep.peak_layer,
        str(cfg.code_size),
        str(footprint.flash_required_bytes(pbytes, cfg.code_size)),
        str(peak),
    ]
    _emit(cfg, (header, [row]))
    return EXIT_OK


def cmd_cost(cfg: RunConfig) -> int:
    catalog = _catalog(cfg)
    pinned = cfg.psram_mb is not None and cfg.flash_mb is not None
    if pinned:
        psram, flash = cfg.psram_mb * MB, cfg.flash_mb * MB
    else:
        if cfg.arch is None or cfg.scheme is None:
            raise ConfigError("cost needs --arch and --scheme, or both --psram-mb and --flash-mb")
        spec, scheme = _selected_arch(cfg), _selected_scheme(cfg)
        graph = archmodel.build_arch(spec)
        n = _branches(cfg.modality)
        pbytes = n * footprint.param_bytes(graph, scheme)
        branch_peak = footprint.peak_memory_bytes(graph, scheme)
        psram = branch_peak * (n if cfg.fusion_memory == "sum" else 1)
        flash = footprint.flash_required_bytes(pbytes, cfg.code_size)
        if cfg.psram_mb is not None:
            psram = cfg.psram_mb * MB
        if cfg.flash_mb is not None:
            flash = cfg.flash_mb * MB
    req = hwcatalog.Requirements(
        flash_bytes=flash,
        psram_bytes=psram,
        sensors=dse.SENSORS_FOR[cfg.modality],
        min_cores=cfg.cores or 1,
    )
    board = hwcatalog.min_board(req, catalog)
    cost = hwcatalog.board_cost(board)
    kinds = {p.name: p.kind for p in board.parts}
    header = ["item", "kind", "price_cents", "price_usd"]
    rows = [[name, kinds[name], str(c), hwcatalog.format_usd(c)] for name, c in cost.items]
    rows.append(["total", "", str(cost.total_cents), hwcatalog.format_usd(cost.total_cents)])
    _emit(cfg, (header, rows))
    return EXIT_OK


def cmd_latency(cfg: RunConfig) -> int:
    coeffs = _coeffs(cfg)
    spec, scheme = _selected_arch(cfg), _selected_scheme(cfg)
    graph = archmodel.build_arch(spec)
    t = perfmodel.model_latency(graph, scheme, coeffs)
    branches = [("face", t), ("voice", t)] if cfg.modality == "fusion" else [(cfg.modality, t)]
    pipe = perfmodel.system_latency(branches, cfg.cores or 1, coeffs.preprocessing, cfg.include_preprocessing)
    header = ["component", "modality", "core", "seconds"]
    rows = [["inference", m, str(core), report.fmt_seconds(s)] for (m, s), core in zip(pipe.branch_seconds, pipe.core_assignment)]
    rows += [["preprocessing", m, "", report.fmt_seconds(s)] for m, s in pipe.preprocessing_seconds]
    rows.append(["compute", "", "", report.fmt_seconds(pipe.compute_seconds)])
    rows.append(["total", "", "", report.fmt_seconds(pipe.total_seconds)])
    _emit(cfg, (header, rows))
    return EXIT_OK


def eer_tables(sets: dict[str, bioeval.ScoreSet], cfg: RunConfig) -> tuple[report.Table, report.Table | None]:
    header = ["source", "n_same", "n_different", "eer_pct", "eer_threshold"]
    for f in cfg.fars:
        lab = dse.far_label(f)
        header += [f"threshold_at_far_{lab}", f"frr_at_far_{lab}_pct"]
    rows = []
    hist_rows = []
    for source, scores in sets.items():
        curve = bioeval.roc(scores)
        thr, rate = bioeval.eer_point(curve)
        row = [source, str(scores.genuine.size), str(scores.impostor.size), report.fmt_pct(100 * rate), report.fmt_float(thr)]
        for f in cfg.fars:
            t, frr = bioeval.frr_at_far(curve, f / 100)
            row += [report.fmt_float(t), report.fmt_pct(100 * frr)]
        rows.append(row)
        if cfg.bins:
            h = bioeval.histogram(scores, cfg.bins, cfg.hist_range)
            for i in range(cfg.bins):
                hist_rows.append(
                    [source, str(i), report.fmt_float(h.edges[i]), report.fmt_float(h.edges[i + 1]), str(h.same[i]), str(h.different[i])]
                )
    hist = (["source", "bin", "lo", "hi", "same", "different"], hist_rows) if cfg.bins else None
    return (header, rows), hist


def cmd_eer(cfg: RunConfig) -> int:
    if (cfg.scores is None) == (cfg.embeddings is None):
        raise ConfigError("eer needs exactly one of --scores or --embeddings")
    if cfg.scores is not None:
        sets = {"scores": bioeval.load_scores(cfg.scores)}
    else:
        sets = bioeval.score_embeddings(bioeval.load_embeddings(cfg.embeddings))
    metrics, hist = eer_tables(sets, cfg)
    if cfg.fmt == "json":
        payload = {"metrics": report.to_records(metrics)}
        if hist is not None:
            payload["histogram"] = report.to_records(hist)
        report.write_text(report.to_json(payload), cfg.out)
        return EXIT_OK
    if hist is None:
        report.write_text(report.to_csv(metrics), cfg.out)
    elif cfg.out is None:
        report.write_text(report.to_csv(metrics) + "\n" + report.to_csv(hist), None)
    else:
        report.write_text(report.to_csv(metrics), cfg.out)
        report.write_text(report.to_csv(hist), cfg.out.with_name(cfg.out.stem + "_hist.csv"))
    return EXIT_OK


def front_specs(fars: Sequence[float]) -> list[tuple[str, str, str]]:
    """``(file stem, x metric, y metric)`` for every front emitted by ``explore``."""
    specs = [
        ("front_eer_vs_param_bytes", "param_bytes", "eer_pct"),
        ("front_eer_vs_latency", "latency_s", "eer_pct"),
        ("front_eer_vs_cost", "cost_cents", "eer_pct"),
    ]
    specs += [
        (f"front_effective_latency_far_{dse.far_label(f)}_vs_cost", "cost_cents", f"effective_latency_s@{f}")
        for f in fars
    ]
    return specs


def cmd_explore(cfg: RunConfig) -> int:
    catalog, specs, coeffs = _catalog(cfg), _archs(cfg), _coeffs(cfg)
    results = dse.load_results(cfg.results) if cfg.results else None
    if results is None:
        log.warning("no --results file: EER and effective-latency fronts are skipped")
    if cfg.arch and cfg.arch not in specs:
        raise ConfigError(f"unknown architecture {cfg.arch!r}; known: {', '.join(specs)}")
    archs = [specs[cfg.arch]] if cfg.arch else list(specs.values())
    schemes = [_selected_scheme(cfg)] if cfg.scheme else list(footprint.DEFAULT_SCHEMES)
    processors = catalog.processors
    if cfg.cores is not None:
        processors = [p for p in processors if p.cores == cfg.cores]
        if not processors:
            raise ConfigError(f"catalog has no processor with {cfg.cores} cores")
    options = dse.EvalOptions(cfg.code_size, cfg.fars, cfg.include_preprocessing, cfg.fusion_memory)
    points = dse.explore(archs, schemes, dse.MODALITIES, catalog, coeffs, results, options, processors)

    out_dir = cfg.out or Path("explore_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = cfg.fmt
    header, rows = report.points_table(points, cfg.fars)
    report.write_text(report.render((header, rows), cfg.fmt), out_dir / f"points.{ext}")
    n_infeasible = sum(not p.feasible for p in points)
    if n_infeasible:
        log.warning("%d of %d points are infeasible with this catalog", n_infeasible, len(points))

    for stem, x, y in front_specs(cfg.fars):
        if results is None:
            continue
        cands, dropped = dse.front_candidates(points, x, y)
        if dropped:
            log.warning("%s: %d point(s) lack %s/%s or are infeasible and are left out", stem, len(dropped), x, y)
        if not cands:
            log.warning("%s: no eligible points, skipped", stem)
            continue
        front = dse.pareto_front(cands, x, y)
        report.write_text(report.render(report.points_table(front, cfg.fars), cfg.fmt), out_dir / f"{stem}.{ext}")
    print(f"{len(points)} design points written to {out_dir}", file=sys.stderr)
    return EXIT_OK


HANDLERS = {"size": cmd_size, "cost": cmd_cost, "latency": cmd_latency, "eer": cmd_eer, "explore": cmd_explore}


def run(cfg: RunConfig) -> int:
    return HANDLERS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    ns = build_parser().parse_args(argv)
    try:
        return run(config_from_args(ns))
    except ParseError as exc:
        code, exc_ = EXIT_PARSE, exc
    except (ConfigError, SpecError) as exc:
        code, exc_ = EXIT_CONFIG, exc
    except InfeasibleError as exc:
        code, exc_ = EXIT_INFEASIBLE, exc
    except EvaluationError as exc:
        code, exc_ = EXIT_EVAL, exc
    except TinyDSEError as exc:
        code, exc_ = EXIT_ERROR, exc
    print(f"tinydse: error: {exc_}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
