"""Deterministic DOT export of static models, behavior graphs, and
simplified graphs.

Flow arcs render solid and triggers dashed, matching the diagram
convention the models come from.  Output is byte-identical across runs
for identical input: thimacs and stages are emitted in path-sorted
order, arcs in model order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import BehaviorGraph, KIND_ORDER, StageRef, TMModel
from .match import FLOW, SimplifiedGraph

_HEADER = "// generated by tmkit; do not edit\n"


@dataclass(frozen=True)
class RenderOptions:
    view: str = "static"  # static | behavior | simplified
    cluster_by_thimac: bool = True
    show_thing_labels: bool = True


def to_dot(
    obj: TMModel | BehaviorGraph | SimplifiedGraph,
    opts: RenderOptions | None = None,
) -> str:
    opts = opts or RenderOptions()
    if opts.view == "static":
        if not isinstance(obj, TMModel):
            raise TypeError("static view renders a TMModel")
        return _static_dot(obj, opts)
    if opts.view == "behavior":
        if isinstance(obj, TMModel):
            obj = obj.behavior
        if not isinstance(obj, BehaviorGraph):
            raise TypeError("behavior view renders a BehaviorGraph")
        return _behavior_dot(obj)
    if opts.view == "simplified":
        if not isinstance(obj, SimplifiedGraph):
            raise TypeError("simplified view renders a SimplifiedGraph")
        return _simplified_dot(obj, opts)
    raise ValueError(f"unknown view {opts.view!r}")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _static_dot(model: TMModel, opts: RenderOptions) -> str:
    name = model.name or "untitled"
    lines = [_HEADER + f"digraph {_quote(name)} {{"]
    lines.append("  node [shape=box, fontsize=10];")

    def stage_lines(path: str, indent: str) -> list[str]:
        out = []
        thimac = model.thimacs[path]
        for kind in KIND_ORDER:
            if kind in thimac.stages:
                ref = StageRef(path, kind)
                out.append(f"{indent}{_quote(str(ref))} [label={_quote(kind.value)}];")
        return out

    if opts.cluster_by_thimac:

        def emit_cluster(path: str, depth: int) -> None:
            indent = "  " * (depth + 1)
            thimac = model.thimacs[path]
            lines.append(f"{indent}subgraph {_quote('cluster_' + path)} {{")
            lines.append(f"{indent}  label={_quote(thimac.name)};")
            lines.extend(stage_lines(path, indent + "  "))
            for child in thimac.children:
                emit_cluster(child, depth + 1)
            lines.append(f"{indent}}}")

        for top in model.thimacs[""].children:
            emit_cluster(top, 0)
    else:
        for path in sorted(model.thimacs):
            if path:
                for kind in KIND_ORDER:
                    if kind in model.thimacs[path].stages:
                        ref = StageRef(path, kind)
                        lines.append(f"  {_quote(str(ref))} [label={_quote(str(ref))}];")

    for arc in model.flows:
        attrs = []
        if opts.show_thing_labels:
            attrs.append(f"label={_quote(arc.label)}")
        attr_text = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(
            f"  {_quote(str(arc.source))} -> {_quote(str(arc.target))}{attr_text};"
        )
    for trig in model.triggers:
        lines.append(
            f"  {_quote(str(trig.source))} -> {_quote(str(trig.target))} "
            "[style=dashed];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _behavior_dot(behavior: BehaviorGraph) -> str:
    lines = [_HEADER + "digraph behavior {"]
    lines.append("  node [shape=ellipse, fontsize=10];")
    for node in sorted(behavior.nodes):
        lines.append(f"  {_quote(node)};")
    for a, b in behavior.edges:
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _simplified_dot(g: SimplifiedGraph, opts: RenderOptions) -> str:
    lines = [_HEADER + "digraph simplified {"]
    lines.append("  node [shape=box, fontsize=10];")
    for node in g.nodes:
        attrs = [f"label={_quote(f'{node.role} {node.kind.value}')}"]
        if node.is_env:
            attrs.append("style=dashed")
        lines.append(f"  {_quote(node.id)} [{', '.join(attrs)}];")
    for edge in g.edges:
        attrs = []
        if edge.kind != FLOW:
            attrs.append("style=dashed")
        if opts.show_thing_labels and edge.thing:
            attrs.append(f"label={_quote(edge.thing)}")
        attr_text = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(edge.src)} -> {_quote(edge.dst)}{attr_text};")
    lines.append("}")
    return "\n".join(lines) + "\n"
