"""Command-line interface exposing all pipelines with reproducible seeds.

Every subcommand writes its outputs plus a run manifest
(<primary output>.manifest.json) recording the resolved options, seed,
input digests, tool version, and wall-clock time.

Exit codes: 0 success, 1 usage error, 2 data/I-O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .catalog import N_ORBITS, get_catalog, role_orbit_sets
from .counting import BACKEND_ENV, THREADS_ENV, count_signatures
from .distances import (
    DistanceReport,
    dgcm,
    dgdda,
    dgdvs,
    dgcd,
    degree_distribution_distance,
    drgf,
    spectral_distance,
)
from .enrichment import AnnotationTable, enrich
from .errors import DigraphletsError
from .evalharness import MEASURES, evaluate, robustness
from .graph import (
    Reaction,
    TradeRecord,
    build_enzyme_network,
    build_trade_network,
    load_edge_list,
    save_edge_list,
)
from .models import MODELS, GeneratorSpec, generate, target_edge_count
from .roles import (
    CcaModel,
    RoleDataset,
    brokerage_scores,
    fit_cca,
    permutation_significance,
    predict,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


# -- manifest -----------------------------------------------------------------


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(primary_out, subcommand, options, inputs, seed, started) -> None:
    manifest = {
        "subcommand": subcommand,
        "options": {k: v for k, v in sorted(options.items())},
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "version": __version__,
        "wall_clock_s": round(time.perf_counter() - started, 6),
    }
    with open(f"{primary_out}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


# -- CSV readers/writers (the tool's own round-trip formats) -------------------


def write_signature_csv(path, labels, signatures) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node"] + [f"o{i}" for i in range(signatures.shape[1])])
        for lab, row in zip(labels, signatures):
            w.writerow([lab] + [int(x) for x in row])


def read_keyed_csv(path) -> tuple[list[str], list[str], np.ndarray]:
    """CSV with a leading key column; returns (keys, column names, float matrix)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise DigraphletsError(f"{path}: expected a key column plus data columns")
    header = rows[0][1:]
    keys, data = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header) + 1:
            raise DigraphletsError(f"{path}:{lineno}: expected {len(header) + 1} fields")
        keys.append(row[0])
        try:
            data.append([float(x) for x in row[1:]])
        except ValueError as exc:
            raise DigraphletsError(f"{path}:{lineno}: {exc}") from None
    return keys, header, np.asarray(data, dtype=np.float64)


def read_manifest_tsv(path) -> list[tuple[str, str, str]]:
    """Evaluation suite manifest: path<TAB>label[<TAB>group] per line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise DigraphletsError(f"{path}:{lineno}: expected 'path\\tlabel[\\tgroup]'")
            out.append((parts[0], parts[1], parts[2] if len(parts) == 3 else ""))
    if not out:
        raise DigraphletsError(f"{path}: empty manifest")
    return out


def read_trades_csv(path) -> list[TradeRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"exporter", "importer", "value"}
        if not reader.fieldnames or not required.issubset(reader.fieldnames):
            raise DigraphletsError(f"{path}: header must contain {sorted(required)}")
        records = []
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(
                    TradeRecord(row["exporter"], row["importer"], float(row["value"]))
                )
            except (TypeError, ValueError) as exc:
                raise DigraphletsError(f"{path}:{lineno}: {exc}") from None
    return records


def read_reactions_csv(path) -> list[Reaction]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"enzyme", "substrates", "products"}
        if not reader.fieldnames or not required.issubset(reader.fieldnames):
            raise DigraphletsError(f"{path}: header must contain {sorted(required)}")
        reactions = []
        for row in reader:
            reactions.append(
                Reaction(
                    enzyme=row["enzyme"],
                    substrates=frozenset(s for s in row["substrates"].split(";") if s),
                    products=frozenset(s for s in row["products"].split(";") if s),
                )
            )
    return reactions


def read_clustering_csv(path) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["entity", "cluster"]:
        raise DigraphletsError(f"{path}: header must be entity,cluster")
    return {row[0]: row[1] for row in rows[1:] if row}


def read_annotations_csv(path) -> AnnotationTable:
    keys, terms, mat = read_keyed_csv(path)
    if not np.isin(mat, (0.0, 1.0)).all():
        raise DigraphletsError(f"{path}: annotation entries must be 0 or 1")
    return AnnotationTable(entities=keys, terms=terms, matrix=mat.astype(np.uint8))


# -- subcommands ---------------------------------------------------------------


def _cmd_catalog(args) -> list:
    cat = get_catalog()
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["graphlet", "size", "edges", "orbits"])
        for g in cat.graphlets:
            w.writerow(
                [
                    g.id,
                    g.size,
                    ";".join(f"{a}>{b}" for a, b in g.edges),
                    ";".join(str(o) for o in g.orbit_of_position),
                ]
            )
    return []


def _cmd_count(args) -> list:
    g = load_edge_list(args.infile)
    sig = count_signatures(g, backend=args.backend, threads=args.threads)
    write_signature_csv(args.out, g.labels, sig)
    return [args.infile]


def _cmd_gcm(args) -> list:
    g = load_edge_list(args.infile)
    mat = dgcm(g, orbits=args.orbits)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["orbit"] + [f"o{i}" for i in mat.orbit_ids])
        for oid, row in zip(mat.orbit_ids, mat.entries):
            w.writerow([f"o{oid}"] + [f"{x:.10g}" for x in row])
    return [args.infile]


def _cmd_dist(args) -> list:
    g1 = load_edge_list(args.graph_a)
    g2 = load_edge_list(args.graph_b)
    meta = {"graph_a": str(args.graph_a), "graph_b": str(args.graph_b)}
    measure = args.measure
    if measure == "drgf":
        value = drgf(g1, g2, log_scale=args.log)
        meta["log_scale"] = args.log
    elif measure == "dgdda":
        value = dgdda(g1, g2, geometric=args.geometric)
        meta["geometric"] = args.geometric
    elif measure in ("dgcd13", "dgcd129"):
        value = dgcd(g1, g2, variant=int(measure[4:]))
        meta["orbit_set"] = int(measure[4:])
    elif measure in ("indeg", "outdeg"):
        value = degree_distribution_distance(g1, g2, side=measure[:-3])
    elif measure == "spectral":
        value = spectral_distance(g1, g2)
    elif measure == "dgdvs":
        if args.node_a is None or args.node_b is None:
            raise _UsageError("--measure dgdvs requires --node-a and --node-b labels")
        s1 = count_signatures(g1)[g1.id_of(args.node_a)]
        s2 = count_signatures(g2)[g2.id_of(args.node_b)]
        value = dgdvs(s1, s2)
        meta["node_a"] = args.node_a
        meta["node_b"] = args.node_b
    else:
        raise _UsageError(f"unknown measure {measure!r}")
    report = DistanceReport(measure=measure, value=float(value), metadata=meta)
    _json_dump(report.to_dict(), args.out)
    return [args.graph_a, args.graph_b]


def _cmd_generate(args) -> list:
    spec = GeneratorSpec(model=args.model, n=args.n, density=args.density, seed=args.seed)
    g = generate(spec)
    save_edge_list(g, args.out)
    _json_dump(
        {
            "model": args.model,
            "n": args.n,
            "density": args.density,
            "seed": args.seed,
            "target_m": target_edge_count(args.n, args.density),
            "achieved_m": g.m,
        },
        f"{args.out}.provenance.json",
    )
    return []


def _load_suite(path) -> tuple[list, list]:
    rows = read_manifest_tsv(path)
    graphs = [(label, load_edge_list(p)) for p, label, _ in rows]
    groups = [grp for _, _, grp in rows]
    return graphs, groups


def _cmd_eval(args) -> list:
    graphs, groups = _load_suite(args.manifest)
    report = evaluate(graphs, args.measure)
    payload = {"pooled": report.to_dict()}
    if args.per_group:
        by_group: dict = {}
        for (lab, g), grp in zip(graphs, groups):
            by_group.setdefault(grp, []).append((lab, g))

        def eligible(members) -> bool:
            # a sweep needs >= 1 negative pair (2+ labels) and >= 1 positive
            # pair (some label with 2+ graphs)
            counts: dict = {}
            for lab, _ in members:
                counts[lab] = counts.get(lab, 0) + 1
            return len(counts) >= 2 and max(counts.values()) >= 2

        payload["groups"] = {
            grp: evaluate(members, args.measure).to_dict()
            for grp, members in sorted(by_group.items())
            if eligible(members)
        }
    _json_dump(payload, args.out)
    if args.curve:
        with open(args.curve, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["threshold", "tp", "fp", "tn", "fn", "precision", "recall", "fpr"])
            for i in range(len(report.thresholds)):
                w.writerow(
                    [
                        f"{report.thresholds[i]:.10g}",
                        int(report.tp[i]),
                        int(report.fp[i]),
                        int(report.tn[i]),
                        int(report.fn[i]),
                        f"{report.precision[i]:.10g}",
                        f"{report.recall[i]:.10g}",
                        f"{report.fpr[i]:.10g}",
                    ]
                )
    return [args.manifest] + [p for p, _, _ in read_manifest_tsv(args.manifest)]


def _cmd_robustness(args) -> list:
    graphs, _ = _load_suite(args.manifest)
    levels = [float(x) for x in args.levels.split(",")]
    results = robustness(
        graphs, args.measure, kind=args.kind, levels=levels, repeats=args.repeats, seed=args.seed
    )
    _json_dump(
        {
            "measure": args.measure,
            "kind": args.kind,
            "repeats": args.repeats,
            "levels": [r.to_dict() for r in results],
        },
        args.out,
    )
    return [args.manifest] + [p for p, _, _ in read_manifest_tsv(args.manifest)]


def _joined_dataset(roles_path, attrs_path) -> tuple[RoleDataset, list[str]]:
    r_keys, r_names, r_mat = read_keyed_csv(roles_path)
    a_keys, a_names, a_mat = read_keyed_csv(attrs_path)
    a_index = {k: i for i, k in enumerate(a_keys)}
    shared = [k for k in r_keys if k in a_index]
    missing = len(r_keys) - len(shared)
    if missing:
        logger.info("dropped %d role row(s) without matching attributes", missing)
    if not shared:
        raise DigraphletsError("no shared entity ids between roles and attributes")
    r_index = {k: i for i, k in enumerate(r_keys)}
    roles = r_mat[[r_index[k] for k in shared]]
    attrs = a_mat[[a_index[k] for k in shared]]
    return (
        RoleDataset(roles=roles, attributes=attrs, role_names=r_names, attribute_names=a_names),
        shared,
    )


def _cmd_cca(args) -> list:
    data, entities = _joined_dataset(args.roles, args.attributes)
    model = fit_cca(data)
    _json_dump(model.to_dict(), args.out_model)
    pred = predict(model, data.roles)
    with open(args.out_predictions, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["entity"] + [f"pred_{a}" for a in data.attribute_names])
        for ent, row in zip(entities, pred):
            w.writerow([ent] + [f"{x:.10g}" for x in row])
    if args.out_significance:
        sig = permutation_significance(data, trials=args.trials, seed=args.seed, q=args.q)
        with open(args.out_significance, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["attribute", "observed_r", "p_value", "significant"])
            for name, r, p, s in zip(
                data.attribute_names, sig.observed, sig.p_values, sig.significant
            ):
                w.writerow([name, f"{r:.10g}", f"{p:.10g}", bool(s)])
    return [args.roles, args.attributes]


def _cmd_score(args) -> list:
    with open(args.model, encoding="utf-8") as fh:
        model = CcaModel.from_dict(json.load(fh))
    keys, names, roles = read_keyed_csv(args.roles)
    if roles.shape[1] != N_ORBITS:
        raise DigraphletsError(
            f"brokerage scoring expects the {N_ORBITS} orbit degree columns, got {roles.shape[1]}"
        )
    scores = brokerage_scores(
        model, roles, role_orbit_sets(), variate=args.variate, use_loadings=args.use_loadings
    )
    cols = ["brokerage", "peripheral", "brokerage_import", "brokerage_export"]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["entity"] + cols)
        for i, key in enumerate(keys):
            w.writerow([key] + [f"{scores[c][i]:.10g}" for c in cols])
    return [args.model, args.roles]


def _cmd_enrich(args) -> list:
    clustering = read_clustering_csv(args.clustering)
    annotations = read_annotations_csv(args.annotations)
    records = enrich(clustering, annotations, alpha=args.alpha, correct=args.bh)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["cluster", "term", "X", "N", "K", "M", "p", "significant"])
        for r in records:
            w.writerow([r.cluster, r.term, r.x, r.n, r.k, r.m, f"{r.p_value:.10g}", r.significant])
    return [args.clustering, args.annotations]


def _cmd_build_wtn(args) -> list:
    records = read_trades_csv(args.trades)
    g = build_trade_network(records, coverage=args.coverage)
    save_edge_list(g, args.out)
    _json_dump(g.metadata(), f"{args.out}.meta.json")
    return [args.trades]


def _cmd_build_metabolic(args) -> list:
    reactions = read_reactions_csv(args.reactions)
    g = build_enzyme_network(reactions)
    save_edge_list(g, args.out)
    _json_dump(g.metadata(), f"{args.out}.meta.json")
    return [args.reactions]


# -- parser --------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="digraphlets", description=__doc__)
    parser.add_argument("--log-level", default="WARNING", help="logging level name")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"worker cap for the census (default: {THREADS_ENV} or all cores)",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("catalog", help="dump the graphlet/orbit table as CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_catalog, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("count", help="orbit degree vectors of every node")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--backend", choices=("numba", "python"), default=None,
                   help=f"census backend (default: {BACKEND_ENV} or numba)")
    p.set_defaults(func=_cmd_count, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("gcm", help="orbit correlation matrix as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--orbits", type=int, choices=(13, 129), default=129)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gcm, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("dist", help="distance between two networks")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--measure", required=True,
                   choices=("drgf", "dgdda", "dgcd13", "dgcd129", "dgdvs", "indeg", "outdeg", "spectral"))
    p.add_argument("--out", required=True)
    p.add_argument("--log", action="store_true", help="drgf: -log frequency variant")
    p.add_argument("--geometric", action="store_true", help="dgdda: geometric mean")
    p.add_argument("--node-a", default=None, help="dgdvs: node label in graph A")
    p.add_argument("--node-b", default=None, help="dgdvs: node label in graph B")
    p.set_defaults(func=_cmd_dist, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("generate", help="sample a random-network model")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate, primary_out=lambda a: a.out, seed_of=lambda a: a.seed)

    p = sub.add_parser("eval", help="PR/ROC evaluation of a measure over a labeled suite")
    p.add_argument("--manifest", required=True, help="TSV: path\\tlabel[\\tgroup]")
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--out", required=True)
    p.add_argument("--curve", default=None, help="also write curve points CSV")
    p.add_argument("--per-group", action="store_true",
                   help="additionally evaluate each manifest group separately")
    p.set_defaults(func=_cmd_eval, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("robustness", help="AUPR under edge rewiring/removal noise")
    p.add_argument("--manifest", required=True)
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--kind", required=True, choices=("rewire", "remove"))
    p.add_argument("--levels", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--repeats", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_robustness, primary_out=lambda a: a.out, seed_of=lambda a: a.seed)

    p = sub.add_parser("cca", help="fit CCA between roles and attributes")
    p.add_argument("--roles", required=True, help="CSV keyed by entity id")
    p.add_argument("--attributes", required=True, help="CSV keyed by entity id")
    p.add_argument("--out-model", required=True)
    p.add_argument("--out-predictions", required=True)
    p.add_argument("--out-significance", default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--q", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_cca, primary_out=lambda a: a.out_model, seed_of=lambda a: a.seed)

    p = sub.add_parser("score", help="brokerage/peripheral scores from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--roles", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--variate", type=int, default=0)
    p.add_argument("--use-loadings", action="store_true")
    p.set_defaults(func=_cmd_score, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("enrich", help="hypergeometric term enrichment of clusters")
    p.add_argument("--clustering", required=True, help="CSV: entity,cluster")
    p.add_argument("--annotations", required=True, help="CSV keyed by entity, binary terms")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--bh", action="store_true", help="Benjamini-Hochberg corrected decisions")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_enrich, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("build-wtn", help="trade-table to filtered trade network")
    p.add_argument("--trades", required=True, help="CSV: exporter,importer,value")
    p.add_argument("--coverage", type=float, default=0.90)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_wtn, primary_out=lambda a: a.out, seed_of=lambda a: None)

    p = sub.add_parser("build-metabolic", help="reaction table to enzyme-enzyme network")
    p.add_argument("--reactions", required=True, help="CSV: enzyme,substrates,products")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_metabolic, primary_out=lambda a: a.out, seed_of=lambda a: None)

    return parser


def dispatch(argv=None) -> int:
    started = time.perf_counter()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING))
    if args.threads is not None:
        os.environ[THREADS_ENV] = str(args.threads)
    try:
        inputs = args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DigraphletsError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    options = {
        k: v
        for k, v in vars(args).items()
        if k not in ("func", "primary_out", "seed_of") and not callable(v)
    }
    _write_manifest(
        args.primary_out(args),
        args.subcommand,
        options,
        inputs,
        args.seed_of(args),
        started,
    )
    return EXIT_OK


def main(argv=None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
