"""Compute (and, when run as a script, write) the corpus golden files.

Each golden is the serialized output of one analysis over one fixture;
the corpus test asserts that every shipped golden regenerates
bit-identically from the fixture source through the pipeline.
"""

from __future__ import annotations

import sys
from pathlib import Path

from tmkit import (
    ExploreConfig,
    RenderOptions,
    SimConfig,
    assemble_model,
    check_behavior,
    check_static,
    explore_state_space,
    format_model,
    infer_dependencies,
    parse,
    simplify,
    simulate,
    to_dot,
)
from tmkit.behavior import check_all_events
from tmkit.corpus import ALL_NAMES, fixture_source


def compute_goldens(name: str) -> dict[str, str]:
    model = assemble_model(parse(fixture_source(name)))
    graph = simplify(model)
    diags = check_static(model) + check_all_events(model) + check_behavior(model)
    deps = sorted(infer_dependencies(model))
    goldens = {
        "diagnostics": "".join(d.to_json() + "\n" for d in diags),
        "dependencies": "".join(f"{a} -> {b}\n" for a, b in deps),
        "simplified": graph.edge_list_text(),
        "format": format_model(model),
        "dot-static": to_dot(model, RenderOptions(view="static")),
        "dot-behavior": to_dot(model, RenderOptions(view="behavior")),
        "dot-simplified": to_dot(graph, RenderOptions(view="simplified")),
        "trace": simulate(model, SimConfig(max_steps=8, seed=0)).to_jsonl(),
        "explore": explore_state_space(model, ExploreConfig()).to_json() + "\n",
    }
    return goldens


def main() -> None:
    out_dir = (
        Path(__file__).resolve().parent.parent
        / "src"
        / "tmkit"
        / "corpus"
        / "goldens"
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in ALL_NAMES:
        for analysis, text in compute_goldens(name).items():
            path = out_dir / f"{name}.{analysis}.txt"
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path.relative_to(out_dir.parent.parent.parent.parent)}")


if __name__ == "__main__":
    sys.exit(main())
