"""Report assembly: plain dicts for JSON, Jinja2 templates for text and DOT."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from jinja2 import Environment, FileSystemLoader

from .exponents import format_exp
from .ingest import CrossValidationReport, NumericEstimate
from .linkmodel import link_analysis
from .models import LinkModel
from .pizza import Multipizza, Pizza
from .snk import format_snk
from .surgery import SurgeryOutcome
from .zones import (
    SurfaceClass,
    Zone,
    abnormal_set,
    contact_clusters,
    describe_spectrum,
    multiplicity,
    nodal_zones,
    nodes,
    recognize,
    segments,
)

_env = Environment(
    loader=FileSystemLoader(str(Path(__file__).parent / "templates")),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def render(template: str, **ctx: Any) -> str:
    return _env.get_template(template).render(**ctx)


def _zone_entry(z: Zone) -> Dict[str, Any]:
    return {
        "interval": z.interval,
        "multiplicity": z.multiplicity,
        "order": format_exp(z.order),
        "arcs": list(z.arcs),
    }


# ---------------------------
# analyze
# ---------------------------

def analysis_report(model: LinkModel) -> Dict[str, Any]:
    rec = recognize(model)
    out: Dict[str, Any] = {
        "class": rec.surface_class.value,
        "diagnosis": rec.diagnosis,
        "beta": format_exp(model.beta),
        "topology": model.topology.value,
        "pancakes": [pc.id for pc in model.pancakes],
        "segments": [],
        "nodal_zones": [],
        "nodes": [],
        "multiplicities": {},
        "abnormal": [],
    }
    if rec.surface_class == SurfaceClass.OTHER and rec.diagnosis.startswith("invalid model"):
        return out
    out["multiplicities"] = {a: multiplicity(model, a) for a in model.arc_order()}
    out["abnormal"] = [z.interval for z in abnormal_set(model)]
    if rec.surface_class != SurfaceClass.OTHER:
        out["segments"] = [_zone_entry(z) for z in segments(model)]
        out["nodal_zones"] = [_zone_entry(z) for z in nodal_zones(model)]
        out["nodes"] = [
            {"members": list(n.members), "spectrum": [format_exp(q) for q in sorted(n.spectrum)]}
            for n in nodes(model)
        ]
    return out


def analysis_text(report: Dict[str, Any]) -> str:
    return render("analysis.txt.j2", r=report)


# ---------------------------
# render
# ---------------------------

def link_dot(model: LinkModel) -> str:
    """The link as a path or cycle of pancake intervals, contact clusters shaded."""
    link_analysis(model)
    arcs = model.arc_order()
    edges: List[Dict[str, str]] = []
    for pid, u, v, e in model.intervals():
        edges.append({"u": u, "v": v, "label": f"{pid} {format_exp(e)}"})
    clusters = [
        {"arcs": list(c.arcs), "label": describe_spectrum(c.spectrum)}
        for c in contact_clusters(model)
    ]
    return render("link.dot.j2", arcs=arcs, edges=edges, clusters=clusters)


# ---------------------------
# pizza
# ---------------------------

def pizza_report(pizza: Pizza) -> Dict[str, Any]:
    return {
        "pancake": pizza.pancake,
        "target": pizza.target,
        "minimal": pizza.minimal,
        "slices": [
            {
                "start": s.start.label,
                "end": s.end.label,
                "Q": s.q_text,
                "a": s.a,
                "b": format_exp(s.b),
                "supporting_end": s.supporting_end,
            }
            for s in pizza.slices
        ],
    }


def multipizza_report(mp: Multipizza) -> Dict[str, Any]:
    return {
        "pancake": mp.pancake,
        "slices": [
            {
                "start": s.start.label,
                "end": s.end.label,
                "orders": [{"target": k, "start": format_exp(a), "end": format_exp(b)} for k, a, b in s.orders],
            }
            for s in mp.slices
        ],
    }


def pizza_text(report: Dict[str, Any]) -> str:
    if "target" in report:
        return render("pizza.txt.j2", pizza=report)
    return render("pizza.txt.j2", multipizza=report)


# ---------------------------
# surgery
# ---------------------------

def verdict_line(outcome: SurgeryOutcome) -> str:
    return f"criterion={str(outcome.criterion).lower()} recognized={outcome.recognition.surface_class.value}"


def surgery_report(outcome: SurgeryOutcome) -> Dict[str, Any]:
    return {
        "surgery": outcome.spec.kind.value,
        "k": outcome.spec.k,
        "alpha": None if outcome.spec.alpha is None else format_exp(outcome.spec.alpha),
        "criterion": outcome.criterion,
        "recognized": outcome.recognition.surface_class.value,
        "diagnosis": outcome.recognition.diagnosis,
        "model": format_snk(outcome.result),
    }


def surgery_text(outcome: SurgeryOutcome) -> str:
    return format_snk(outcome.result) + verdict_line(outcome) + "\n"


# ---------------------------
# oracle
# ---------------------------

def _slope(x: float) -> str:
    return "inf" if x == float("inf") else f"{x:.4f}"


def estimates_report(estimates: Sequence[NumericEstimate]) -> Dict[str, Any]:
    return {
        "estimates": [
            {"a": e.pair[0], "b": e.pair[1], "slope": _slope(e.slope), "residual": f"{e.residual:.2e}"}
            for e in estimates
        ],
        "ok": None,
        "tolerance": None,
    }


def cross_validation_report(report: CrossValidationReport) -> Dict[str, Any]:
    return {
        "estimates": [
            {
                "a": p.a,
                "b": p.b,
                "slope": _slope(p.numeric),
                "residual": f"{p.residual:.2e}",
                "symbolic": p.symbolic,
                "ok": p.ok,
            }
            for p in report.pairs
        ],
        "ok": report.ok,
        "tolerance": report.tolerance,
    }


def oracle_text(report: Dict[str, Any]) -> str:
    return render("oracle.txt.j2", **report)


def validation_text(violations: Optional[Sequence[str]]) -> str:
    if not violations:
        return "ok\n"
    return "".join(f"violation: {v}\n" for v in violations)
