"""End-to-end pipeline tests on small grids.

The heavyweight 8x8 run lives in the acceptance suite; these stay at 2x2 to
keep the loop fast.
"""

from __future__ import annotations

from types import SimpleNamespace

import pytest

from sqchip.errors import NonPositiveInput, PitchTooSmall, SpecInfeasible, StageError, UnknownSelector
from sqchip.pattern import total_pins
from sqchip.topology import generate_grid
from sqchip.pipeline import PipelineConfig, run_pipeline, summarize_routing
from sqchip.routing import RoutedPath


def test_pipeline_smoke_fills_every_sub_entity():
    result = run_pipeline(rows=2, cols=2)
    doc = result.document
    assert doc.topology is not None and doc.topology.grid_dims == (2, 2)
    assert set(doc.circuit.qubits) == set(doc.topology.qubits)
    assert doc.layout is not None
    assert doc.process_rules is not None
    assert result.gds_bytes[:4] == b"\x00\x06\x00\x02"   # HEADER record
    assert result.drc_report == []
    assert result.routing.strategy == "pattern"
    assert result.routing.nets_routed == total_pins(generate_grid(2, 2))
    assert result.routing.total_crossings == 0


def test_pipeline_provenance_names_every_stage():
    doc = run_pipeline(rows=2, cols=2).document
    assert [r["operation"] for r in doc.provenance_log] == [
        "topology.generate-grid",
        "circuit.solve",
        "layout.place-qubits",
        "layout.readout-bus",
        "route.pattern",
        "process.map",
        "process.air-bridges",
        "drc:0-violations",
        "gds.export",
    ]


def test_pipeline_failure_reports_the_stage():
    with pytest.raises(StageError) as err:
        run_pipeline(rows=2, cols=2, pitch=400.0)   # xmons need 500 um
    assert err.value.stage == "layout"
    assert isinstance(err.value.cause, PitchTooSmall)


def test_pipeline_output_is_deterministic():
    a = run_pipeline(rows=2, cols=2)
    b = run_pipeline(config=PipelineConfig(rows=2, cols=2))
    assert a.gds_bytes == b.gds_bytes
    assert len(a.gds_bytes) > 1000


def test_maze_pipeline_glues_tails_and_stays_clean():
    result = run_pipeline(rows=2, cols=2, strategy="maze")
    assert result.drc_report == []
    routed = {p.net: p for p in result.routing.paths}
    assert len(routed) == total_pins(generate_grid(2, 2))
    pins = {p.pin_id: p for p in result.document.layout.pins}
    for net, path in routed.items():
        assert path.cells is not None
        assert path.points[0] == pins[net].position
        expected = "transmission" if net.startswith("tx_") else "control"
        assert path.kind == expected


def test_flip_chip_run_places_indium_and_routes_opposite():
    from sqchip.components import LAYER_OPPOSITE

    result = run_pipeline(rows=2, cols=2, flip_chip=True)
    layout = result.document.layout
    assert any(c.kind == "indium" for c in layout.components)
    assert all(p.layer == LAYER_OPPOSITE for p in result.routing.paths)
    assert result.drc_report == []


def test_config_rejects_bad_knobs_up_front():
    with pytest.raises(NonPositiveInput):
        PipelineConfig(rows=0)
    with pytest.raises(UnknownSelector, match="steiner"):
        PipelineConfig(strategy="steiner")
    with pytest.raises(SpecInfeasible):
        PipelineConfig(process="exotic-2um")


def test_summarize_routing_skips_passive_geometry():
    paths = [
        RoutedPath("tx_0", "transmission", 2, [(0, 0), (1, 0)], 10.0,
                   corner_count=2, crossing_count=1),
        RoutedPath("ctl_q0", "control", 2, [(0, 0), (0, 1)], 10.0,
                   corner_count=3, crossing_count=0),
        RoutedPath("bus_q0", "feedline", 1, [(0, 0), (5, 0)], 10.0,
                   corner_count=9, crossing_count=9),
    ]
    summary = summarize_routing(SimpleNamespace(paths=paths), "pattern")
    assert summary.nets_routed == 2
    assert summary.total_corners == 5
    assert summary.total_crossings == 1
