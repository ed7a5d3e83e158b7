#!/usr/bin/env python3
"""Regenerate docs/orbits.md, the derived graphlet/orbit reference table."""

from pathlib import Path

from digraphlets.catalog import get_catalog, role_orbit_sets

OUT = Path(__file__).resolve().parent.parent / "docs" / "orbits.md"


def main():
    cat = get_catalog()
    sets = role_orbit_sets()
    named = {}
    for name in ("peripheral_import", "peripheral_export", "broker_import",
                 "broker_export", "core_nonbroker"):
        for orbit in getattr(sets, name):
            named[orbit] = name

    lines = [
        "# Graphlet and orbit reference",
        "",
        "Derived enumeration of the 40 weakly connected oriented digraphs on",
        "2-4 nodes and their 129 automorphism orbits.  Graphlets are numbered",
        "by (size, edge count, canonical code); orbits by (graphlet, minimal",
        "canonical position).  Regenerate with",
        "`python scripts/make_orbit_reference.py`.",
        "",
        "| graphlet | size | edges | orbit of position 0.. | named orbit groups |",
        "|---|---|---|---|---|",
    ]
    for g in cat.graphlets:
        edges = ", ".join(f"{a}&rarr;{b}" for a, b in g.edges)
        orbits = ", ".join(str(o) for o in g.orbit_of_position)
        tags = "; ".join(
            f"{o}: {named[o]}" for o in sorted(set(g.orbit_of_position)) if o in named
        )
        lines.append(f"| G{g.id} | {g.size} | {edges} | {orbits} | {tags} |")

    lines += [
        "",
        "## Named orbit groups",
        "",
        "Positions on the eight triangle-plus-pendant graphlets:",
        "",
    ]
    for name in ("peripheral_import", "peripheral_export", "broker_import",
                 "broker_export", "core_nonbroker"):
        ids = ", ".join(str(o) for o in sorted(getattr(sets, name)))
        lines.append(f"- **{name}**: {ids}")
    lines.append("")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines), encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
