"""Core domain types: thimacs, stages, arcs, events, and model assembly.

A model is assembled from parsed declarations (see `tmkit.dsl`) or from
declarations constructed programmatically.  Assembly resolves thimac
paths, expands flow chains into individual arcs, and freezes the result;
assembled models are immutable and safe to share between analyses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .diagnostics import SourceSpan, TMError


class StageKind(enum.Enum):
    """The five generic operations a thimac can carry; there are no others."""

    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"

    def __str__(self) -> str:
        return self.value


#: Canonical ordering used wherever stage kinds are serialized.
KIND_ORDER: tuple[StageKind, ...] = (
    StageKind.CREATE,
    StageKind.PROCESS,
    StageKind.RELEASE,
    StageKind.TRANSFER,
    StageKind.RECEIVE,
)

_KIND_BY_NAME = {k.value: k for k in StageKind}


def kind_from_name(name: str) -> StageKind | None:
    """Look up a stage kind by its lowercase name, or None if unknown."""
    return _KIND_BY_NAME.get(name)


@dataclass(frozen=True)
class StageRef:
    """Addressable stage of a thimac, e.g. ``Mill.Motor`` + ``process``."""

    thimac: str
    kind: StageKind

    def __str__(self) -> str:
        return f"{self.thimac}.{self.kind.value}"

    @classmethod
    def parse(cls, text: str) -> StageRef:
        path, _, kind_name = text.rpartition(".")
        kind = kind_from_name(kind_name)
        if not path or kind is None:
            raise ValueError(f"not a stage reference: {text!r}")
        return cls(path, kind)


@dataclass(frozen=True)
class Thimac:
    """A thing/machine node in the hierarchy.  `path` doubles as its id."""

    path: str
    name: str
    children: tuple[str, ...] = ()
    stages: frozenset[StageKind] = frozenset()

    @property
    def id(self) -> str:
        return self.path


@dataclass(frozen=True)
class FlowArc:
    """Solid-arrow movement of a thing between two stages."""

    id: str
    label: str
    source: StageRef
    target: StageRef
    span: SourceSpan | None = None


@dataclass(frozen=True)
class TriggerArc:
    """Dashed-arrow activation from one stage to another."""

    id: str
    source: StageRef
    target: StageRef
    span: SourceSpan | None = None


@dataclass(frozen=True)
class Event:
    """A dynamic unit: a named region of the static model, plus optional
    description and opaque time annotation."""

    name: str
    region: tuple[StageRef, ...]
    description: str | None = None
    time: str | None = None
    span: SourceSpan | None = None


@dataclass(frozen=True)
class BehaviorGraph:
    """Chronology of events: nodes are event names, edges are earlier->later."""

    nodes: tuple[str, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()

    def successors(self, name: str) -> tuple[str, ...]:
        return tuple(b for a, b in self.edges if a == name)


@dataclass(frozen=True)
class TMModel:
    """An assembled, immutable model (the grand thimac and everything in it)."""

    name: str
    thimacs: Mapping[str, Thimac]
    flows: tuple[FlowArc, ...]
    triggers: tuple[TriggerArc, ...]
    events: Mapping[str, Event]
    behavior: BehaviorGraph

    def resolves(self, ref: StageRef) -> bool:
        thimac = self.thimacs.get(ref.thimac)
        return thimac is not None and ref.kind in thimac.stages

    def stage_refs(self) -> list[StageRef]:
        """All stages present in the model, in path-then-kind order."""
        refs = []
        for path in sorted(self.thimacs):
            if not path:
                continue
            thimac = self.thimacs[path]
            for kind in KIND_ORDER:
                if kind in thimac.stages:
                    refs.append(StageRef(path, kind))
        return refs


# ---------------------------------------------------------------------------
# Declarations (produced by tmkit.dsl.parse or built programmatically)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelDecl:
    name: str
    span: SourceSpan | None = None


@dataclass(frozen=True)
class ThimacDecl:
    path: str
    stages: tuple[StageKind, ...] = ()
    span: SourceSpan | None = None


@dataclass(frozen=True)
class FlowDecl:
    label: str
    chain: tuple[StageRef, ...]
    span: SourceSpan | None = None


@dataclass(frozen=True)
class TriggerDecl:
    source: StageRef
    target: StageRef
    span: SourceSpan | None = None


@dataclass(frozen=True)
class EventDecl:
    name: str
    members: tuple[StageRef | str, ...]
    description: str | None = None
    time: str | None = None
    span: SourceSpan | None = None


@dataclass(frozen=True)
class BehaviorDecl:
    chain: tuple[str, ...]
    span: SourceSpan | None = None


Declaration = (
    ModelDecl | ThimacDecl | FlowDecl | TriggerDecl | EventDecl | BehaviorDecl
)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

class AssemblyError(TMError):
    """Raised when declarations cannot be assembled into a valid model."""

    code = "E_ASSEMBLY"

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.span = span


class DuplicatePathError(AssemblyError):
    code = "E_DUPLICATE_PATH"


class UnknownParentError(AssemblyError):
    code = "E_UNKNOWN_PARENT"


class DanglingRefError(AssemblyError):
    code = "E_DANGLING_REF"


class DuplicateArcError(AssemblyError):
    code = "E_DUPLICATE_ARC"


class InvalidArcError(AssemblyError):
    code = "E_INVALID_ARC"


class DuplicateEventError(AssemblyError):
    code = "E_DUPLICATE_EVENT"


class _ThimacBuilder:
    __slots__ = ("path", "stages", "explicit")

    def __init__(self, path: str, explicit: bool):
        self.path = path
        self.stages: set[StageKind] = set()
        self.explicit = explicit


def assemble_model(
    decls: Sequence[Declaration],
    *,
    implicit_decls: bool = True,
    name: str | None = None,
) -> TMModel:
    """Assemble declarations into an immutable model.

    Stages referenced by flow and trigger arcs are implicitly added to
    their thimac; with `implicit_decls` (the default) missing thimacs are
    created on first reference, otherwise a reference to an undeclared
    thimac raises DanglingRefError.  Event regions are carried as written
    and checked later by `tmkit.behavior.check_event_region`, so a model
    with unresolved event members can still be assembled and diagnosed.
    """
    builders: dict[str, _ThimacBuilder] = {"": _ThimacBuilder("", True)}
    model_name = name

    def declare(path: str, span: SourceSpan | None) -> None:
        existing = builders.get(path)
        if existing is not None:
            if existing.explicit:
                raise DuplicatePathError(f"thimac {path!r} declared twice", span)
            existing.explicit = True
            return
        parent, _, _ = path.rpartition(".")
        if parent and parent not in builders:
            raise UnknownParentError(
                f"thimac {path!r} has undeclared parent {parent!r}", span
            )
        builders[path] = _ThimacBuilder(path, True)

    def touch(ref: StageRef, span: SourceSpan | None) -> None:
        if ref.thimac not in builders:
            if not implicit_decls:
                raise DanglingRefError(
                    f"reference to undeclared thimac {ref.thimac!r}", span
                )
            # Create the thimac and any missing ancestors.
            parts = ref.thimac.split(".")
            for i in range(1, len(parts) + 1):
                prefix = ".".join(parts[:i])
                if prefix not in builders:
                    builders[prefix] = _ThimacBuilder(prefix, False)
        builders[ref.thimac].stages.add(ref.kind)

    flows: list[FlowArc] = []
    triggers: list[TriggerArc] = []
    events: dict[str, Event] = {}
    behavior_nodes: list[str] = []
    behavior_edges: list[tuple[str, str]] = []
    seen_flow_keys: set[tuple[str, StageRef, StageRef]] = set()
    seen_trigger_keys: set[tuple[StageRef, StageRef]] = set()

    for decl in decls:
        if isinstance(decl, ModelDecl):
            if model_name is None:
                model_name = decl.name
        elif isinstance(decl, ThimacDecl):
            declare(decl.path, decl.span)
            for kind in decl.stages:
                builders[decl.path].stages.add(kind)
        elif isinstance(decl, FlowDecl):
            for ref in decl.chain:
                touch(ref, decl.span)
            for src, dst in zip(decl.chain, decl.chain[1:]):
                key = (decl.label, src, dst)
                if key in seen_flow_keys:
                    raise DuplicateArcError(
                        f"duplicate flow arc {decl.label}: {src} -> {dst}",
                        decl.span,
                    )
                seen_flow_keys.add(key)
                flows.append(
                    FlowArc(f"F{len(flows) + 1}", decl.label, src, dst, decl.span)
                )
        elif isinstance(decl, TriggerDecl):
            if decl.source == decl.target:
                raise InvalidArcError(
                    f"trigger may not point at its own source: {decl.source}",
                    decl.span,
                )
            touch(decl.source, decl.span)
            touch(decl.target, decl.span)
            key = (decl.source, decl.target)
            if key in seen_trigger_keys:
                raise DuplicateArcError(
                    f"duplicate trigger {decl.source} ~> {decl.target}", decl.span
                )
            seen_trigger_keys.add(key)
            triggers.append(
                TriggerArc(f"T{len(triggers) + 1}", decl.source, decl.target, decl.span)
            )
        elif isinstance(decl, EventDecl):
            if decl.name in events:
                raise DuplicateEventError(
                    f"event {decl.name!r} declared twice", decl.span
                )
            region: list[StageRef] = []
            for member in decl.members:
                if isinstance(member, StageRef):
                    if member not in region:
                        region.append(member)
                else:
                    arc = _find_arc(flows, triggers, member)
                    if arc is None:
                        raise DanglingRefError(
                            f"event {decl.name!r} names unknown arc {member!r}",
                            decl.span,
                        )
                    for ref in (arc.source, arc.target):
                        if ref not in region:
                            region.append(ref)
            events[decl.name] = Event(
                decl.name, tuple(region), decl.description, decl.time, decl.span
            )
        elif isinstance(decl, BehaviorDecl):
            for evt_name in decl.chain:
                if evt_name not in events:
                    raise DanglingRefError(
                        f"behavior names undeclared event {evt_name!r}", decl.span
                    )
                if evt_name not in behavior_nodes:
                    behavior_nodes.append(evt_name)
            for a, b in zip(decl.chain, decl.chain[1:]):
                if a == b:
                    raise InvalidArcError(
                        f"behavior edge {a} -> {b} is a self-loop", decl.span
                    )
                if (a, b) not in behavior_edges:
                    behavior_edges.append((a, b))
        else:
            raise AssemblyError(f"unknown declaration type: {decl!r}")

    children: dict[str, list[str]] = {path: [] for path in builders}
    for path in builders:
        if path:
            parent, _, _ = path.rpartition(".")
            children[parent].append(path)

    thimacs = {
        path: Thimac(
            path=path,
            name=path.rpartition(".")[2] if path else (model_name or ""),
            children=tuple(sorted(children[path])),
            stages=frozenset(builder.stages),
        )
        for path, builder in builders.items()
    }

    return TMModel(
        name=model_name or "",
        thimacs=MappingProxyType(thimacs),
        flows=tuple(flows),
        triggers=tuple(triggers),
        events=MappingProxyType(events),
        behavior=BehaviorGraph(tuple(behavior_nodes), tuple(behavior_edges)),
    )


def _find_arc(
    flows: Iterable[FlowArc], triggers: Iterable[TriggerArc], arc_id: str
) -> FlowArc | TriggerArc | None:
    for arc in flows:
        if arc.id == arc_id:
            return arc
    for arc in triggers:
        if arc.id == arc_id:
            return arc
    return None
