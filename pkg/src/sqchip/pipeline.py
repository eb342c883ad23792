"""End-to-end chip generation: staged dispatches over a design document.

Each stage is a registered request handler (extract-process-inject), so a
full run leaves one provenance record per stage and any failure carries the
stage name. Identical configs produce byte-identical outputs; there is no
wall-clock or randomness anywhere in the flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import EquivalentCircuit, inverse_solve
from .document import (
    DesignDocument,
    ParameterBundle,
    RequestKey,
    dispatch,
    extract,
    inject,
    register,
)
from .errors import NoPath, NonPositiveInput, SqchipError, StageError, UnknownSelector
from .gdsio import write_gds
from .layout import allocate_frequencies, generate_readout_bus, place_qubits
from .maze import build_grid, resolve_target, route_all
from .pattern import allocate_pins, map_pins, route_pattern
from .process import (
    apply_rules,
    drc,
    get_process,
    insert_air_bridges,
    place_indium_columns,
)
from .routing import RoutingResult
from .topology import generate_grid, rows_bottom_up

STRATEGIES = ("pattern", "maze")


@dataclass(frozen=True)
class PipelineConfig:
    name: str = "chip"
    rows: int = 2
    cols: int = 2
    qubit_style: str = "xmon"
    pitch: float = 2000.0
    border: float = 500.0
    flip_chip: bool = False
    # equivalent circuit
    qubit_frequencies: tuple[float, ...] = (4.3e9, 4.8e9)
    qubit_capacitance: float = 65e-15
    coupling_strength: float = 5e6
    # readout
    readout_start: float = 6.535e9
    readout_stop: float = 7.246e9
    trace_width: float = 10.0
    trace_gap: float = 6.0
    eps_r: float = 11.45
    coupling_length: float = 200.0
    # routing
    strategy: str = "pattern"
    lane_pitch: float = 25.0
    maze_cell: float = 50.0
    maze_clearance: float = 20.0
    corner_penalty: float = 1.0
    cross_penalty: float = 2.0
    penalty_mode: str = "exact"
    # process
    process: str = "generic-10um"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise NonPositiveInput("grid dims must be at least 1x1")
        if self.strategy not in STRATEGIES:
            raise UnknownSelector(f"strategy {self.strategy!r}; "
                                  f"expected one of {STRATEGIES}")
        get_process(self.process)


@dataclass
class PipelineResult:
    document: DesignDocument
    gds_bytes: bytes
    drc_report: list
    routing: RoutingResult


# ---- stage handlers --------------------------------------------------------

K_TOPOLOGY = RequestKey("design-entity", "topology.generate-grid", ("m", "n"))
K_CIRCUIT = RequestKey("function", "circuit.solve",
                       ("coupling_strength", "frequencies",
                        "qubit_capacitance"))
K_PLACE = RequestKey("function", "layout.place-qubits",
                     ("border", "flip_chip", "name", "pitch", "qubit_style"))
K_READOUT = RequestKey("function", "layout.readout-bus",
                       ("coupling_length", "eps_r", "f_start", "f_stop",
                        "gap", "trace_width"))
K_ROUTE_PATTERN = RequestKey("function", "route.pattern",
                             ("lane_pitch", "trace_width"))
K_ROUTE_MAZE = RequestKey("function", "route.maze",
                          ("cell", "clearance", "corner_penalty",
                           "cross_penalty", "lane_pitch", "penalty_mode",
                           "trace_width"))
K_PROCESS = RequestKey("function", "process.map", ("process",))
K_BRIDGES = RequestKey("function", "process.air-bridges", ())


def _h_topology(doc, m, n):
    return inject(doc, ParameterBundle(doc.version,
                                       {"topology": generate_grid(m, n)}),
                  operation="topology.generate-grid")


def _h_circuit(doc, coupling_strength, frequencies, qubit_capacitance):
    topo = doc.topology
    targets = allocate_frequencies(topo, list(frequencies))
    couplings = {e: coupling_strength for e in sorted(topo.edges)}
    qubits, coupled = inverse_solve(targets, couplings,
                                    C_q=qubit_capacitance,
                                    require_distinct_neighbors=True,
                                    edges=topo.edges)
    bundle = ParameterBundle(doc.version,
                             {"circuit": EquivalentCircuit(qubits, coupled)})
    return inject(doc, bundle, operation="circuit.solve")


def _h_place(doc, border, flip_chip, name, pitch, qubit_style):
    layout = place_qubits(doc.topology, qubit_style, pitch, border, name)
    layout.flip_chip = flip_chip
    return inject(doc, ParameterBundle(doc.version, {"layout": layout}),
                  operation="layout.place-qubits")


def _h_readout(doc, coupling_length, eps_r, f_start, f_stop, gap, trace_width):
    bundle = extract(doc, "layout")
    layout = bundle.sections["layout"]
    for row in rows_bottom_up(doc.topology):
        generate_readout_bus(layout, row, f_start, f_stop,
                             w=trace_width, g=gap, eps_r=eps_r,
                             coupling_length=coupling_length)
    return inject(doc, bundle, operation="layout.readout-bus")


def _h_route_pattern(doc, lane_pitch, trace_width):
    bundle = extract(doc, "layout")
    layout = bundle.sections["layout"]
    allocate_pins(layout, doc.topology, lane_pitch=lane_pitch)
    route_pattern(layout, doc.topology, width=trace_width)
    return inject(doc, bundle, operation="route.pattern")


def _h_route_maze(doc, cell, clearance, corner_penalty, cross_penalty,
                  lane_pitch, penalty_mode, trace_width):
    bundle = extract(doc, "layout")
    layout = bundle.sections["layout"]
    allocate_pins(layout, doc.topology, lane_pitch=lane_pitch)
    targets = map_pins(layout.pins, doc.topology)
    grid = build_grid(layout, cell=cell, clearance=clearance)
    standoff = clearance + 2.0 * cell

    nets = []
    tails = {}
    for pin in sorted(layout.pins, key=lambda p: p.pin_id):
        pos, off = resolve_target(layout, targets[pin.pin_id], standoff)
        nets.append((pin.pin_id, grid.cell_at(*pin.position),
                     grid.cell_at(*off)))
        tails[pin.pin_id] = (pin.position, pos)
    result = route_all(grid, nets, k_corner=corner_penalty,
                       k_cross=cross_penalty, penalty_mode=penalty_mode,
                       layer=_route_layer(layout), width=trace_width)
    if result.failures:
        raise NoPath(f"{len(result.failures)} nets unroutable: "
                     f"{result.failures[:3]}")
    for p in result.paths:
        head, tail = tails[p.net]
        p.points = [head] + p.points + [tail]
        p.kind = "transmission" if p.net.startswith("tx_") else "control"
    layout.paths.extend(result.paths)
    return inject(doc, bundle, operation="route.maze")


def _route_layer(layout) -> int:
    from .components import LAYER_OPPOSITE, LAYER_ROUTING
    return LAYER_OPPOSITE if layout.flip_chip else LAYER_ROUTING


def _h_process(doc, process):
    rules = get_process(process)
    bundle = extract(doc, "layout")
    apply_rules(bundle.sections["layout"], rules)
    bundle.sections["process_rules"] = rules
    return inject(doc, bundle, operation="process.map")


def _h_bridges(doc):
    bundle = extract(doc, "layout")
    layout = bundle.sections["layout"]
    rules = doc.process_rules
    insert_air_bridges(layout, rules)
    if layout.flip_chip:
        place_indium_columns(layout, rules)
    return inject(doc, bundle, operation="process.air-bridges")


for _key, _handler in ((K_TOPOLOGY, _h_topology), (K_CIRCUIT, _h_circuit),
                       (K_PLACE, _h_place), (K_READOUT, _h_readout),
                       (K_ROUTE_PATTERN, _h_route_pattern),
                       (K_ROUTE_MAZE, _h_route_maze),
                       (K_PROCESS, _h_process), (K_BRIDGES, _h_bridges)):
    register(_key, _handler)


# ---- the pipeline ----------------------------------------------------------

def _stage_plan(cfg: PipelineConfig):
    if cfg.strategy == "pattern":
        route = (K_ROUTE_PATTERN, {"lane_pitch": cfg.lane_pitch,
                                   "trace_width": cfg.trace_width})
    else:
        route = (K_ROUTE_MAZE, {"cell": cfg.maze_cell,
                                "clearance": cfg.maze_clearance,
                                "corner_penalty": cfg.corner_penalty,
                                "cross_penalty": cfg.cross_penalty,
                                "lane_pitch": cfg.lane_pitch,
                                "penalty_mode": cfg.penalty_mode,
                                "trace_width": cfg.trace_width})
    return [
        ("topology", K_TOPOLOGY, {"m": cfg.rows, "n": cfg.cols}),
        ("params", K_CIRCUIT, {"coupling_strength": cfg.coupling_strength,
                               "frequencies": cfg.qubit_frequencies,
                               "qubit_capacitance": cfg.qubit_capacitance}),
        ("layout", K_PLACE, {"border": cfg.border,
                             "flip_chip": cfg.flip_chip,
                             "name": cfg.name, "pitch": cfg.pitch,
                             "qubit_style": cfg.qubit_style}),
        ("readout", K_READOUT, {"coupling_length": cfg.coupling_length,
                                "eps_r": cfg.eps_r,
                                "f_start": cfg.readout_start,
                                "f_stop": cfg.readout_stop,
                                "gap": cfg.trace_gap,
                                "trace_width": cfg.trace_width}),
        ("route", *route),
        ("procmap", K_PROCESS, {"process": cfg.process}),
        ("bridges", K_BRIDGES, {}),
    ]


def summarize_routing(layout, strategy: str) -> RoutingResult:
    result = RoutingResult(strategy)
    for p in layout.paths:
        if p.kind in ("control", "transmission"):
            result.paths.append(p)
            result.total_corners += p.corner_count
            result.total_crossings += p.crossing_count
    return result


def run_pipeline(config: PipelineConfig | None = None, **overrides
                 ) -> PipelineResult:
    """Generate a chip end to end; see PipelineConfig for the knobs.

    Fails fast: the first stage error aborts the run, wrapped in StageError
    with the stage name. The DRC report is returned, not raised; an empty
    report means the layout meets the selected process rules.
    """
    cfg = config if config is not None else PipelineConfig(**overrides)
    doc = DesignDocument(cfg.name)
    for stage, key, args in _stage_plan(cfg):
        try:
            doc = dispatch(key, doc, **args)
        except StageError:
            raise
        except SqchipError as exc:
            raise StageError(stage, exc) from exc

    try:
        report = drc(doc.layout, doc.process_rules)
        doc = inject(doc, ParameterBundle(doc.version, {}),
                     operation=f"drc:{len(report)}-violations")
    except SqchipError as exc:
        raise StageError("drc", exc) from exc

    try:
        gds = write_gds(doc.layout)
        doc = inject(doc, ParameterBundle(doc.version, {}),
                     operation="gds.export")
    except SqchipError as exc:
        raise StageError("gds", exc) from exc

    return PipelineResult(doc, gds, report,
                          summarize_routing(doc.layout, cfg.strategy))
