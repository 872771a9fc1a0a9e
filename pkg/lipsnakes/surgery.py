"""Removing a segment, and cutting a Hölder triangle out of a nodal zone.

Pancake X_k of an intrinsic decomposition runs from gamma_{k-1} to gamma_k;
gamma_k is the last arc of X_k and indices wrap, so gamma_0 = gamma_p.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from .errors import SnakeError, SurgeryError
from .exponents import ExpQ, format_exp
from .linkmodel import link_analysis, require_valid
from .models import ContactEdge, LinkModel, PancakeSpec, Topology
from .zones import Recognition, SurfaceClass, abnormal_flags, nodal_zones, nodes, recognize

log = logging.getLogger(__name__)


class SurgeryKind(str, Enum):
    REMOVE_SEGMENT = "remove_segment"
    CUT_NODAL = "cut_nodal"


@dataclass(frozen=True)
class SurgerySpec:
    kind: SurgeryKind
    k: int
    alpha: Optional[ExpQ] = None

    def describe(self) -> str:
        if self.kind == SurgeryKind.CUT_NODAL:
            return f"cut nodal zone {self.k} at alpha={format_exp(self.alpha)}"
        return f"remove segment {self.k}"


@dataclass(frozen=True)
class SurgeryOutcome:
    spec: SurgerySpec
    decomposition: LinkModel
    result: LinkModel
    criterion: bool
    recognition: Recognition

    @property
    def agrees(self) -> bool:
        return self.criterion == (self.recognition.surface_class == SurfaceClass.SNAKE)


# ---------------------------
# Intrinsic decomposition
# ---------------------------

def _cyclic_intervals(model: LinkModel) -> List[Tuple[str, str, ExpQ]]:
    return [(u, v, e) for _, u, v, e in model.intervals()]


def intrinsic_decomposition(model: LinkModel) -> LinkModel:
    """Re-pancake a circular snake so its boundary arcs are one marked arc per nodal zone."""
    rec = recognize(model)
    if rec.surface_class != SurfaceClass.CIRCULAR_SNAKE:
        raise SurgeryError(f"intrinsic decompositions exist for circular snakes only: {rec.diagnosis}")
    if len(nodes(model)) < 2:
        raise SurgeryError("a circular snake needs at least two nodes")

    zones = nodal_zones(model)
    gluing = model.gluing_arcs()
    marked = [z.arcs for z in zones]
    if all(len([a for a in arcs if a in gluing]) == 1 for arcs in marked) and all(
        any(a in arcs for arcs in marked) for a in gluing
    ):
        return model

    chosen: List[str] = []
    for z in zones:
        if not z.arcs:
            raise SurgeryError(f"nodal zone {z.interval} holds no marked arc")
        chosen.append(z.arcs[0])
    order = {a: i for i, a in enumerate(model.arc_order())}
    chosen.sort(key=order.get)

    intervals = _cyclic_intervals(model)
    start = {u: i for i, (u, _, _) in enumerate(intervals)}
    pieces: List[Tuple[Tuple[str, ...], Tuple[ExpQ, ...]]] = []
    for idx, c in enumerate(chosen):
        stop = chosen[(idx + 1) % len(chosen)]
        arcs, exps = [c], []
        i = start[c]
        while True:
            u, v, e = intervals[i % len(intervals)]
            arcs.append(v)
            exps.append(e)
            i += 1
            if v == stop:
                break
        pieces.append((tuple(arcs), tuple(exps)))
    # X_k ends at gamma_k, so the pancake ending at the first chosen arc comes first
    pieces = pieces[-1:] + pieces[:-1]
    pancakes = [PancakeSpec(f"X{i + 1}", arcs, exps) for i, (arcs, exps) in enumerate(pieces)]
    out = LinkModel(model.beta, model.topology, tuple(pancakes), model.contacts, model.singular_arcs)
    log.info("intrinsic decomposition: boundary arcs %s", ", ".join(chosen))
    return out


def _working_model(model: LinkModel) -> LinkModel:
    if recognize(model).surface_class == SurfaceClass.CIRCULAR_SNAKE:
        return intrinsic_decomposition(model)
    return model


def _check_index(model: LinkModel, k: int) -> None:
    if not model.circular:
        raise SurgeryError("surgery needs a circular model")
    if not 1 <= k <= model.p:
        raise SurgeryError(f"index {k} out of range 1..{model.p}")


def gamma(model: LinkModel, k: int) -> str:
    """gamma_k, the last arc of X_k, indices taken mod p."""
    return model.pancakes[(k - 1) % model.p].last


def _restrict(model: LinkModel, pancakes: List[PancakeSpec], contacts: List[ContactEdge], topology: Topology) -> LinkModel:
    arcs: Set[str] = {a for pc in pancakes for a in pc.arcs}
    kept = [c for c in contacts if c.a in arcs and c.b in arcs]
    singular = frozenset(a for a in model.singular_arcs if a in arcs)
    return LinkModel(model.beta, topology, tuple(pancakes), tuple(kept), singular)


# ---------------------------
# X(k)
# ---------------------------

def remove_segment(model: LinkModel, k: int) -> LinkModel:
    """X(k): the chain X_{k+1}, ..., X_p, X_1, ..., X_{k-1}."""
    _check_index(model, k)
    if model.p < 2:
        raise SurgeryError("removing the only pancake leaves nothing")
    p = model.p
    chain = [model.pancakes[(k + i) % p] for i in range(p - 1)]
    out = _restrict(model, chain, list(model.contacts), Topology.SEGMENT)
    log.info("removed %s: chain %s", model.pancakes[k - 1].id, " ".join(pc.id for pc in chain))
    return out


# ---------------------------
# X_{alpha,k}
# ---------------------------

def cut_nodal(model: LinkModel, k: int, alpha: ExpQ) -> LinkModel:
    """X_{alpha,k}: remove an alpha-triangle around gamma_k, leaving boundary arcs gamma_k- and gamma_k+."""
    _check_index(model, k)
    if not alpha > model.beta:
        raise SurgeryError(f"alpha={format_exp(alpha)} must exceed beta={format_exp(model.beta)}")
    p = model.p
    g = gamma(model, k)
    minus, plus = f"{g}-", f"{g}+"
    before, after = model.pancakes[k - 1], model.pancakes[k % p]
    if p == 1:
        raise SurgeryError("cutting needs at least two pancakes")

    # walk back from gamma_k along X_k while intervals are thinner than alpha
    arcs, exps = list(before.arcs), list(before.internal_exponents)
    i = len(exps) - 1
    while i >= 0 and exps[i] > alpha:
        i -= 1
    if i < 0:
        raise SurgeryError(f"pancake {before.id} lies inside the alpha-horn of {g}")
    removed = set(arcs[i + 1:])
    left = PancakeSpec(before.id, tuple(arcs[: i + 1] + [minus]), tuple(exps[: i + 1]))

    arcs, exps = list(after.arcs), list(after.internal_exponents)
    j = 0
    while j < len(exps) and exps[j] > alpha:
        j += 1
    if j == len(exps):
        raise SurgeryError(f"pancake {after.id} lies inside the alpha-horn of {g}")
    removed |= set(arcs[: j + 1])
    right = PancakeSpec(after.id, tuple([plus] + arcs[j + 1:]), tuple(exps[j:]))

    chain = [right] + [model.pancakes[(k + i) % p] for i in range(1, p - 1)] + [left]

    best: Dict[Tuple[str, str], ExpQ] = {}

    def attach(a: str, b: str, q: ExpQ) -> None:
        key = (a, b) if a <= b else (b, a)
        best[key] = max(best.get(key, q), q)

    attach(minus, plus, alpha)
    for c in model.contacts:
        a_gone, b_gone = c.a in removed, c.b in removed
        if a_gone and b_gone:
            continue
        if a_gone or b_gone:
            other = c.b if a_gone else c.a
            for new in (minus, plus):
                attach(new, other, min(c.q, alpha))
        else:
            attach(c.a, c.b, c.q)
    contacts = [ContactEdge(a, b, q) for (a, b), q in best.items()]
    draft = _restrict(model, chain, contacts, Topology.SEGMENT)

    # a re-attached contact may not rise above inner order on the new chain
    an = link_analysis(draft)
    kept = [c for c in draft.contacts if c.q > an.inner_tord(c.a, c.b)]
    for c in draft.contacts:
        if c not in kept:
            log.debug("dropped re-attached contact %s %s q=%s: not above inner order", c.a, c.b, format_exp(c.q))
    out = LinkModel(draft.beta, draft.topology, draft.pancakes, tuple(kept), draft.singular_arcs)
    log.info("cut %s at alpha=%s: removed %s", g, format_exp(alpha), ", ".join(sorted(removed)))
    return out


# ---------------------------
# Criteria
# ---------------------------

def _all_abnormal(model: LinkModel, positions: List[int]) -> bool:
    flags = abnormal_flags(model)
    return all(flags[i] for i in positions)


def _ball_positions(model: LinkModel, arc: str) -> List[int]:
    an = link_analysis(model)
    c = an.resolve(arc)
    return [i for i in range(len(an.graph)) if an.inner[c][i] > an.beta_rank]


def criterion_remove_segment(model: LinkModel, k: int) -> bool:
    """X(k) is a snake iff the nodal zones at gamma_{k+1} and gamma_{k-2} hold no normal arc of X(k)."""
    work = _working_model(model)
    surgered = remove_segment(work, k)
    if not _valid(surgered):
        return False
    zones = _ball_positions(surgered, gamma(work, k + 1)) + _ball_positions(surgered, gamma(work, k - 2))
    return _all_abnormal(surgered, zones)


def criterion_cut_nodal(model: LinkModel, k: int, alpha: ExpQ) -> bool:
    """X_{alpha,k} is a snake iff the generic arcs of the two cut pancakes are abnormal in it."""
    work = _working_model(model)
    surgered = cut_nodal(work, k, alpha)
    if not _valid(surgered):
        return False
    an = link_analysis(surgered)
    left, right = work.pancakes[k - 1].id, work.pancakes[k % work.p].id
    return _all_abnormal(surgered, an.pancake_generic(left) + an.pancake_generic(right))


def _valid(model: LinkModel) -> bool:
    try:
        require_valid(model)
    except SnakeError as e:
        log.warning("surgered model is not valid: %s", e)
        return False
    return True


def perform(model: LinkModel, spec: SurgerySpec) -> SurgeryOutcome:
    work = _working_model(model)
    if spec.kind == SurgeryKind.REMOVE_SEGMENT:
        result = remove_segment(work, spec.k)
        verdict = criterion_remove_segment(work, spec.k)
    else:
        if spec.alpha is None:
            raise SurgeryError("cut_nodal needs alpha")
        result = cut_nodal(work, spec.k, spec.alpha)
        verdict = criterion_cut_nodal(work, spec.k, spec.alpha)
    rec = recognize(result)
    log.info("%s: criterion=%s recognized=%s", spec.describe(), verdict, rec.surface_class.value)
    return SurgeryOutcome(spec, work, result, verdict, rec)
