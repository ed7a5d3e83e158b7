#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures under tests/fixtures/.

The trade table fabricates a core/broker/periphery economy; the reaction
table fabricates metabolite chains shared across enzyme families.  Both
are small enough for the full CLI pipelines to run in seconds.
"""

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def make_trades(rng):
    core = [f"COR{i}" for i in range(6)]
    brokers = [f"BRO{i}" for i in range(4)]
    periphery = [f"PER{i}" for i in range(12)]
    rows = []
    for a in core:
        for b in core:
            if a != b and rng.random() < 0.9:
                rows.append((a, b, rng.lognormal(6.0, 0.3)))
    for br in brokers:
        for c in rng.choice(core, size=4, replace=False):
            rows.append((br, c, rng.lognormal(5.0, 0.3)))
            rows.append((c, br, rng.lognormal(5.0, 0.3)))
    for i, p in enumerate(periphery):
        br = brokers[i % len(brokers)]
        if i % 2 == 0:
            rows.append((br, p, rng.lognormal(5.0, 0.25)))  # peripheral importer
        else:
            rows.append((p, br, rng.lognormal(5.0, 0.25)))  # peripheral exporter
    # ballast of micro-trades among peripherals; the 90% coverage filter
    # should cut these, not the countries' broker links
    for _ in range(120):
        a, b = rng.choice(periphery, size=2, replace=False)
        rows.append((a, b, rng.lognormal(2.9, 0.3)))
    with open(OUT / "trades.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["exporter", "importer", "value"])
        for a, b, v in rows:
            w.writerow([a, b, f"{v:.2f}"])
    return core + brokers + periphery, rows


def make_indicators(rng, countries, rows):
    exports = {c: 0.0 for c in countries}
    imports = {c: 0.0 for c in countries}
    for a, b, v in rows:
        exports[a] += v
        imports[b] += v
    with open(OUT / "indicators.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["entity", "gdp", "export_income", "import_expense", "population"])
        for c in countries:
            gdp = 2.0 * exports[c] + imports[c] + rng.normal(scale=20.0)
            w.writerow(
                [
                    c,
                    f"{gdp:.2f}",
                    f"{exports[c]:.2f}",
                    f"{imports[c]:.2f}",
                    f"{rng.lognormal(3.0, 1.0):.2f}",
                ]
            )


def make_reactions(rng):
    enzymes = [f"E{i:02d}" for i in range(24)]
    rows = []
    # two metabolite families with chained reactions, plus a few cross links
    for fam, prefix in ((0, "A"), (1, "B")):
        members = enzymes[fam * 12 : (fam + 1) * 12]
        for i, e in enumerate(members):
            subs = {f"{prefix}{i}"}
            prods = {f"{prefix}{i + 1}"}
            if rng.random() < 0.3:
                prods.add(f"{prefix}{(i + 3) % 13}")
            rows.append((e, subs, prods))
    rows.append(("E05", {"A6"}, {"B2"}))
    rows.append(("E17", {"B6"}, {"A3"}))
    with open(OUT / "reactions.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["enzyme", "substrates", "products"])
        for e, subs, prods in rows:
            w.writerow([e, ";".join(sorted(subs)), ";".join(sorted(prods))])
    return enzymes


def make_annotations(rng, enzymes):
    terms = ["chainA", "chainB", "branching", "housekeeping"]
    with open(OUT / "annotations.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["entity"] + terms)
        for i, e in enumerate(enzymes):
            row = [
                1 if i < 12 else 0,
                1 if i >= 12 else 0,
                1 if rng.random() < 0.25 else 0,
                1 if rng.random() < 0.8 else 0,
            ]
            w.writerow([e] + row)


def make_clustering(enzymes):
    with open(OUT / "clustering.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["entity", "cluster"])
        for i, e in enumerate(enzymes):
            w.writerow([e, f"c{0 if i < 12 else 1}"])


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(4242)
    countries, rows = make_trades(rng)
    make_indicators(rng, countries, rows)
    enzymes = make_reactions(rng)
    make_annotations(rng, enzymes)
    make_clustering(enzymes)
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
