"""Design document, extract/inject, request dispatch, and .sqd persistence.

The document owns at most one of each sub-entity (topology, equivalent
circuit, chip layout, process rules). Tools never edit it directly: they
extract a parameter bundle, work on the copy, and inject the result back,
which re-validates cross-entity references and appends to the provenance
log. Persistence is canonical sorted-key JSON; GDS payloads live in a
sidecar file referenced by path.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .circuit import CouplingParams, EquivalentCircuit, QubitElectricalParams
from .errors import (
    CrossEntityViolation,
    MissingSubEntity,
    ParseError,
    UnknownSelector,
    UnregisteredRequest,
    VersionMismatch,
)
from .process import ProcessRules
from .topology import Topology

SCHEMA_VERSION = "sqd-1"
_EPOCH_ISO = "1970-01-01T00:00:00Z"   # pinned: identical runs, identical bytes

_SECTIONS = ("topology", "circuit", "layout", "process_rules")


@dataclass
class DesignDocument:
    name: str = "design"
    version: str = SCHEMA_VERSION
    topology: Topology | None = None
    circuit: EquivalentCircuit | None = None
    layout: object | None = None          # ChipLayout
    process_rules: ProcessRules | None = None
    provenance_log: list[dict] = field(default_factory=list)


@dataclass
class ParameterBundle:
    version: str = SCHEMA_VERSION
    sections: dict[str, object] = field(default_factory=dict)


def _circuit_qubit_ids(circuit: EquivalentCircuit) -> set[str]:
    ids = set(circuit.qubits)
    for a, b in circuit.couplings:
        ids.add(a)
        ids.add(b)
    return ids


def _layout_qubit_ids(layout) -> set[str]:
    ids = {c.comp_id for c in layout.components
           if c.kind in ("xmon", "transmon")}
    for c in layout.components:
        if c.kind == "resonator" and c.params.get("qubit_id"):
            ids.add(c.params["qubit_id"])
    return ids


def validate_references(topology, circuit, layout) -> None:
    """Cross-entity invariant: circuit and layout may only name topology
    qubits."""
    known = set(topology.qubits) if topology is not None else set()
    if circuit is not None:
        stray = _circuit_qubit_ids(circuit) - known
        if stray:
            raise CrossEntityViolation(
                f"circuit references unknown qubits {sorted(stray)}")
    if layout is not None:
        stray = _layout_qubit_ids(layout) - known
        if stray:
            raise CrossEntityViolation(
                f"layout references unknown qubits {sorted(stray)}")


def extract(doc: DesignDocument, selector: str) -> ParameterBundle:
    """Deep snapshot of one sub-entity (or "all"); the document is untouched."""
    if selector == "all":
        names = [s for s in _SECTIONS if getattr(doc, s) is not None]
    elif selector in _SECTIONS:
        if getattr(doc, selector) is None:
            raise MissingSubEntity(f"document has no {selector}")
        names = [selector]
    else:
        raise UnknownSelector(
            f"selector {selector!r}; expected one of {_SECTIONS} or 'all'")
    return ParameterBundle(doc.version, {
        name: copy.deepcopy(getattr(doc, name)) for name in names})


def inject(doc: DesignDocument, bundle: ParameterBundle,
           operation: str = "inject") -> DesignDocument:
    """Replace the bundle's sub-entities atomically; returns a new document.

    The input document is never modified, so any validation error leaves
    the caller's state exactly as it was.
    """
    if bundle.version != doc.version:
        raise VersionMismatch(
            f"bundle is {bundle.version}, document is {doc.version}")
    unknown = set(bundle.sections) - set(_SECTIONS)
    if unknown:
        raise UnknownSelector(f"bundle carries unknown sections "
                              f"{sorted(unknown)}")
    merged = {s: getattr(doc, s) for s in _SECTIONS}
    merged.update(bundle.sections)
    validate_references(merged["topology"], merged["circuit"],
                        merged["layout"])
    record = {
        "operation": operation,
        "timestamp": _EPOCH_ISO,
        "digest": _bundle_digest(bundle),
    }
    return DesignDocument(
        doc.name, doc.version,
        merged["topology"], merged["circuit"], merged["layout"],
        merged["process_rules"],
        doc.provenance_log + [record],
    )


def _bundle_digest(bundle: ParameterBundle) -> str:
    h = hashlib.sha256()
    for name in sorted(bundle.sections):
        h.update(name.encode())
        value = bundle.sections[name]
        if name == "layout" and value is not None:
            from .gdsio import write_gds
            h.update(write_gds(value))
        else:
            h.update(json.dumps(_section_to_json(name, value),
                                sort_keys=True).encode())
    return h.hexdigest()[:16]


# ---- request dispatch ------------------------------------------------------

_CATEGORIES = ("design-entity", "function", "library")


@dataclass(frozen=True)
class RequestKey:
    category: str
    operation: str
    parameter_signature: tuple[str, ...] = ()

    def __post_init__(self):
        if self.category not in _CATEGORIES:
            raise UnknownSelector(f"request category {self.category!r}")
        object.__setattr__(self, "parameter_signature",
                           tuple(sorted(self.parameter_signature)))


_REGISTRY: dict[RequestKey, object] = {}


def register(key: RequestKey, handler) -> None:
    if key in _REGISTRY and _REGISTRY[key] is not handler:
        raise UnknownSelector(f"request {key} already has a handler")
    _REGISTRY[key] = handler


def registered_requests() -> list[RequestKey]:
    return sorted(_REGISTRY, key=lambda k: (k.category, k.operation))


def dispatch(key: RequestKey, doc: DesignDocument, **args) -> DesignDocument:
    """Route a request to its registered handler (extract-process-inject).

    The argument names must match the key's parameter signature: a different
    combination is a different request and is refused.
    """
    handler = _REGISTRY.get(key)
    if handler is None:
        raise UnregisteredRequest(f"no handler for {key}")
    if tuple(sorted(args)) != key.parameter_signature:
        raise UnregisteredRequest(
            f"{key.operation} expects parameters {key.parameter_signature}, "
            f"got {tuple(sorted(args))}")
    return handler(doc, **args)


# ---- persistence -----------------------------------------------------------

def _topology_to_json(t: Topology) -> dict:
    return {
        "qubits": {q: list(pos) for q, pos in sorted(t.qubits.items())},
        "edges": sorted(list(e) for e in t.edges),
        "grid_dims": list(t.grid_dims) if t.grid_dims else None,
    }


def _topology_from_json(d: dict) -> Topology:
    return Topology(
        {q: tuple(pos) for q, pos in d["qubits"].items()},
        {tuple(e) for e in d["edges"]},
        tuple(d["grid_dims"]) if d.get("grid_dims") else None,
    )


def _circuit_to_json(c: EquivalentCircuit) -> dict:
    return {
        "qubits": {q: asdict(p) for q, p in sorted(c.qubits.items())},
        "couplings": {"|".join(e): asdict(p)
                      for e, p in sorted(c.couplings.items())},
    }


def _circuit_from_json(d: dict) -> EquivalentCircuit:
    qubits = {}
    for q, p in d["qubits"].items():
        qubits[q] = QubitElectricalParams(**p)
    couplings = {}
    for key, p in d["couplings"].items():
        edge = tuple(key.split("|"))
        p = dict(p)
        p["edge"] = edge
        couplings[edge] = CouplingParams(**p)
    return EquivalentCircuit(qubits, couplings)


def _section_to_json(name: str, value):
    if value is None:
        return None
    if name == "topology":
        return _topology_to_json(value)
    if name == "circuit":
        return _circuit_to_json(value)
    if name == "process_rules":
        return asdict(value)
    raise UnknownSelector(name)


def save(doc: DesignDocument, layout_ref: str | None = None) -> bytes:
    """Serialize to canonical .sqd bytes.

    The layout itself is not embedded: layout_ref names the GDS sidecar the
    caller writes (save_document handles the pair). A document with a layout
    needs a reference.
    """
    payload: dict = {"meta": {"name": doc.name, "version": doc.version}}
    if doc.topology is not None:
        payload["topology"] = _topology_to_json(doc.topology)
    if doc.circuit is not None:
        payload["circuit"] = _circuit_to_json(doc.circuit)
    if doc.layout is not None:
        if layout_ref is None:
            raise MissingSubEntity(
                "document has a layout; pass layout_ref for the GDS sidecar")
        payload["layout_ref"] = str(layout_ref)
    if doc.process_rules is not None:
        payload["process_rules"] = asdict(doc.process_rules)
    payload["provenance"] = doc.provenance_log
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()


def load(data: bytes, base_dir: str | Path = ".") -> DesignDocument:
    """Parse .sqd bytes; a layout_ref is resolved relative to base_dir."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise ParseError("design file is not UTF-8 text", offset=e.start) from e
    except json.JSONDecodeError as e:
        raise ParseError(f"bad design file: {e.msg}", offset=e.pos) from e
    if not isinstance(payload, dict):
        raise ParseError("design file root must be an object", path="$")
    meta = payload.get("meta")
    if not isinstance(meta, dict) or "name" not in meta or "version" not in meta:
        raise ParseError("missing or malformed meta section", path="meta")
    if meta["version"] != SCHEMA_VERSION:
        raise VersionMismatch(
            f"file is {meta['version']!r}, reader is {SCHEMA_VERSION!r}")

    doc = DesignDocument(meta["name"], meta["version"])
    try:
        if "topology" in payload:
            doc.topology = _topology_from_json(payload["topology"])
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed topology: {e}", path="topology") from e
    try:
        if "circuit" in payload:
            doc.circuit = _circuit_from_json(payload["circuit"])
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed circuit: {e}", path="circuit") from e
    try:
        if "process_rules" in payload:
            doc.process_rules = ProcessRules(**payload["process_rules"])
    except TypeError as e:
        raise ParseError(f"malformed process_rules: {e}",
                         path="process_rules") from e
    if "layout_ref" in payload:
        from .gdsio import layout_from_gds
        ref = Path(payload["layout_ref"])
        if not ref.is_absolute():
            ref = Path(base_dir) / ref
        try:
            doc.layout = layout_from_gds(ref)
        except FileNotFoundError as e:
            raise ParseError(f"layout sidecar {ref} not found",
                             path="layout_ref") from e
    doc.provenance_log = list(payload.get("provenance", []))
    validate_references(doc.topology, doc.circuit, doc.layout)
    return doc


def save_document(doc: DesignDocument, path: str | Path) -> Path:
    """Write <path> plus, when a layout is present, a .gds sidecar next to
    it; the file references the sidecar by bare name so the pair relocates
    together."""
    path = Path(path)
    ref = None
    if doc.layout is not None:
        from .gdsio import write_gds
        sidecar = path.with_suffix(".gds")
        write_gds(doc.layout, sidecar)
        ref = sidecar.name
    path.write_bytes(save(doc, layout_ref=ref))
    return path


def load_document(path: str | Path) -> DesignDocument:
    path = Path(path)
    return load(path.read_bytes(), base_dir=path.parent)
