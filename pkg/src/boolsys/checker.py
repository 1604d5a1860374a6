"""End-to-end verification of Boolean systems for safeness and high-liveness.

Pipeline: validate guards, check the skeleton T-system, unfold it, colour
the prefix, build the successor graph of base markings, look for
synchronization deadlocks and finally check liveness of the high bindings
against every maximal strong component of the successor graph.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from boolsys.boolnet import BooleanSystem, bindings_of, skeleton_of, validate_net
from boolsys.colouring import (
    BaseMarking, ColouredPrefix, SuccessorGraph, check, colour_prefix, dead_formula, deadlock_patterns,
    reach_formula, successor_graph,
)
from boolsys.petri import NetError, is_strongly_connected
from boolsys.tsystem import check_skeleton
from boolsys.unfolding import unfold_complete

MODES = ("optimized", "exhaustive")
SCHEMA = "boolsys-report/1"


@dataclass
class DeadlockFinding:
    transition: str
    type: str
    arc_vars: list[str]
    event: str
    base: str
    pattern: dict[str, bool]

    def to_dict(self):
        return {"transition": self.transition, "type": self.type, "arc_vars": self.arc_vars,
                "event": self.event, "base_marking": self.base, "pattern": self.pattern}


@dataclass
class LivenessFinding:
    transition: str
    type: str
    arc_vars: list[str]
    binding: dict[str, bool]
    component: int  # 1-based index of a maximal component lacking a witness

    def to_dict(self):
        return {"transition": self.transition, "type": self.type, "arc_vars": self.arc_vars,
                "binding": self.binding, "component": self.component}


class UsageError(RuntimeError):
    pass


# --------------------------------------------------------------------------

def check_deadlocks(cp: ColouredPrefix, g: SuccessorGraph) -> list[DeadlockFinding]:
    """One finding per (reachable base marking, closing event) whose Dead formula is satisfiable."""
    bn = cp.bs.bnet
    findings = []
    events = []
    for e in cp.on.events:
        t = cp.cov[e]
        lt = bn.types.get(t)
        if len(bn.in_vars(t)) < 2 or (lt is not None and not lt.is_closing):
            continue
        if deadlock_patterns(bn, t):
            events.append(e)
    for base in g.vertices:
        for e in events:
            model = check(dead_formula(cp, base, e), cp)
            if model is None:
                continue
            t = cp.cov[e]
            pattern = {bn.var(cp.cov[c]): model[cp.cond_vars[c]] for c in cp.on.event_pre[e]}
            pattern = {v: pattern[v] for v in bn.in_vars(t)}
            findings.append(DeadlockFinding(t, bn.type_label(t), bn.report_vars(t), e, cp.base_label(base), pattern))
    return findings


def _patterns_to_check(cp: ColouredPrefix, t: str, mode: str) -> list[dict[str, bool]]:
    """High bindings of ``t`` whose liveness has to be established in the given mode."""
    bn = cp.bs.bnet
    high = [b.as_dict() for b in bindings_of(bn, t) if b.is_high]
    lt = bn.types.get(t)
    if mode == "exhaustive" or lt is None:
        return high
    if lt.is_unary or lt.is_opening or lt.kind in ("AND", "XOR"):
        return []
    x, y, _ = bn.roles[t]
    wanted = {
        "AND_XOR": [(True, False)],
        "XOR_AND": [(False, True)],
        "OR": [(True, True), (True, False), (False, True)],
    }[lt.kind]
    return [b for b in high if (b[x], b[y]) in wanted]


def check_high_liveness(cp: ColouredPrefix, g: SuccessorGraph, mode: str = "optimized",
                        deadlocks: Optional[list] = None) -> list[LivenessFinding]:
    """Findings for high bindings that are not enabled from any base marking of some maximal component."""
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}; expected one of {MODES}")
    if deadlocks:
        raise UsageError("high-liveness is only decided for systems free of synchronization deadlocks")
    bn = cp.bs.bnet
    cache: dict = {}
    findings = []

    def witnessed(base: BaseMarking, t: str, inputs: tuple) -> bool:
        for e in cp.events_of(t):
            key = (base, e, inputs)
            if key not in cache:
                pre = cp.on.event_pre[e]
                target = {c: dict(inputs)[bn.var(cp.cov[c])] for c in pre}
                cache[key] = check(reach_formula(cp, base, target), cp) is not None
            if cache[key]:
                return True
        return False

    maximal = sorted(g.maximal)
    for t in bn.transitions:
        for b in _patterns_to_check(cp, t, mode):
            inputs = tuple((v, b[v]) for v in bn.in_vars(t))
            for k in maximal:
                if not any(witnessed(base, t, inputs) for base in g.components[k]):
                    order = bn.binding_vars(t)
                    findings.append(LivenessFinding(t, bn.type_label(t), bn.report_vars(t),
                                                    {v: b[v] for v in order}, k + 1))
                    break
    return findings


# --------------------------------------------------------------------------

@dataclass
class VerificationReport:
    name: str = ""
    mode: str = "optimized"
    overall: str = "invalid"
    errors: list[str] = field(default_factory=list)
    skeleton: dict = field(default_factory=dict)
    prefix: dict = field(default_factory=dict)
    components: list[dict] = field(default_factory=list)
    deadlocks: list[DeadlockFinding] = field(default_factory=list)
    non_high_live: list[LivenessFinding] = field(default_factory=list)
    liveness_checked: bool = False
    seconds: float = 0.0

    @property
    def well_behaved(self) -> bool:
        return self.overall == "well_behaved"

    @property
    def exit_code(self) -> int:
        return {"well_behaved": 0, "ill_behaved": 1}.get(self.overall, 2)

    def deadlock_transitions(self) -> list[DeadlockFinding]:
        """First finding per transition, in order of discovery."""
        seen, out = set(), []
        for f in self.deadlocks:
            if f.transition not in seen:
                seen.add(f.transition)
                out.append(f)
        return out

    def non_live_transitions(self) -> list[LivenessFinding]:
        seen, out = set(), []
        for f in self.non_high_live:
            if f.transition not in seen:
                seen.add(f.transition)
                out.append(f)
        return out

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "name": self.name,
            "mode": self.mode,
            "overall": self.overall,
            "errors": self.errors,
            "skeleton": self.skeleton,
            "prefix": self.prefix,
            "successor_graph": {"component_count": len(self.components), "components": self.components},
            "deadlock_transitions": [f.to_dict() for f in self.deadlocks],
            "liveness_checked": self.liveness_checked,
            "non_high_live": [f.to_dict() for f in self.non_high_live],
        }

    def render_text(self) -> str:
        lines = []
        if self.name:
            lines.append(self.name)
        if self.overall == "invalid":
            lines.append("ERROR, invalid Boolean system:")
            lines += self.errors
            return "\n".join(lines) + "\n"
        if self.overall == "skeleton_failure":
            lines.append("ERROR, skeleton is not live and safe:")
            lines += self.errors
            return "\n".join(lines) + "\n"
        dl = self.deadlock_transitions()
        if dl:
            lines.append("ERROR, deadlock transition(s):")
            for f in dl:
                lines.append(_transition_line(f.type, f.arc_vars))
        else:
            lines.append("OK, no deadlock")
        lines.append(f"Successor graph: {len(self.components)} strong component(s):")
        for c in self.components:
            tags = [x for x, flag in (("Minimal", c["minimal"]), ("Maximal", c["maximal"])) if flag]
            head = " - ".join(tags + [f"Component {c['index']} with {len(c['base_markings'])} node(s):"])
            lines.append(head)
            marks = c["base_markings"]
            for i in range(0, len(marks), 2):
                lines.append("".join(m + " , " for m in marks[i:i + 2]).rstrip())
        if not self.liveness_checked:
            lines.append("High-liveness not checked: system has synchronization deadlocks")
        elif self.non_high_live:
            lines.append("ERROR, non high-live transition(s):")
            for f in self.non_live_transitions():
                lines.append(_transition_line(f.type, f.arc_vars))
        else:
            lines.append("OK, high-live")
        return "\n".join(lines) + "\n"


def _transition_line(label: str, arc_vars: list[str]) -> str:
    return f"Boolean transition of type: {label} with arc-variables: {', '.join(arc_vars)}"


def verify(bs: BooleanSystem, mode: str = "optimized") -> VerificationReport:
    """Run the whole pipeline; structural problems end up in the report instead of raising."""
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}; expected one of {MODES}")
    start = time.perf_counter()
    report = VerificationReport(name=bs.name, mode=mode)
    try:
        _run(bs, mode, report)
    except NetError as exc:
        report.overall = "invalid"
        report.errors.append(str(exc))
    report.seconds = time.perf_counter() - start
    return report


def _run(bs: BooleanSystem, mode: str, report: VerificationReport):
    bn = bs.bnet
    violations = validate_net(bn)
    if violations:
        report.overall = "invalid"
        report.errors = violations
        return
    if not is_strongly_connected(bn.net):
        report.overall = "skeleton_failure"
        report.skeleton = {"strongly_connected": False, "live": None, "safe": None}
        report.errors = ["the Boolean system is not strongly connected"]
        return
    ts = skeleton_of(bs)
    sk = check_skeleton(ts)
    report.skeleton = {
        "strongly_connected": True,
        "live": sk.live,
        "safe": sk.safe,
        "unmarked_circuit": list(sk.unmarked_circuit.nodes) if sk.unmarked_circuit else None,
        "unsafe_place": sk.unsafe_place,
        "unsafe_circuit": list(sk.unsafe_circuit.nodes) if sk.unsafe_circuit else None,
    }
    if not sk.ok:
        report.overall = "skeleton_failure"
        if not sk.live:
            report.errors.append(f"token-free circuit: {sk.unmarked_circuit}")
        if not sk.safe:
            report.errors.append(f"place {sk.unsafe_place} is not safe; its best circuit: {sk.unsafe_circuit}")
        return
    pfx = unfold_complete(ts)
    report.prefix = pfx.summary()
    cp = colour_prefix(pfx, bs)
    g = successor_graph(cp)
    for k, comp in enumerate(g.components):
        report.components.append({
            "index": k + 1,
            "minimal": k in g.minimal,
            "maximal": k in g.maximal,
            "base_markings": [cp.base_label(b) for b in comp],
        })
    report.deadlocks = check_deadlocks(cp, g)
    if not report.deadlocks:
        report.liveness_checked = True
        report.non_high_live = check_high_liveness(cp, g, mode)
    report.overall = "well_behaved" if not report.deadlocks and not report.non_high_live else "ill_behaved"


def analyse(bs: BooleanSystem):
    """The intermediate objects of the pipeline (prefix, coloured prefix, successor graph)."""
    ts = skeleton_of(bs)
    pfx = unfold_complete(ts)
    cp = colour_prefix(pfx, bs)
    return pfx, cp, successor_graph(cp)


__all__ = [
    "DeadlockFinding", "LivenessFinding", "MODES", "UsageError", "VerificationReport", "analyse",
    "check_deadlocks", "check_high_liveness", "verify",
]
