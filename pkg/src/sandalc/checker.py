"""Explicit-state verification of the composed system.

The woven automata run under interleaving semantics: one enabled transition
of one process per global step.  A globally deadlocked state gets a single
self-loop (stutter), so every maximal run is infinite and liveness questions
are well-posed.

Supported spec shapes are G(p), F(p), F(G(p)) and G(F(p)) with p
propositional.  Safety runs a BFS (shortest counterexample); liveness searches
for a counterexample lasso by depth-first cycle detection, nested for the
F(G(p)) shape.  Under weak process fairness a lasso only counts if every
process enabled somewhere on its loop also moves somewhere on the loop.
Because loop unrolling makes every process automaton acyclic, all product
cycles of lowered systems are stutter self-loops, where no process is enabled
and fairness holds vacuously; the searches continue past an inadmissible loop
but share visited-sets, which is complete for such self-loop cycles.

Counterexamples are replayable: applying the recorded labels from the initial
state reproduces the recorded states exactly.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from . import ir
from .ir import CompiledSystem, Transition
from .sema import (
    PAtom,
    PBin,
    PBool,
    PEnum,
    PNot,
    Prop,
    PTemporal,
    ResolvedSpec,
    Value,
)

DEFAULT_MAX_STATES = 10_000_000

STUTTER_LABEL = "STUTTER"
STUTTER_NAME = "(system)"


class StateLimitExceeded(Exception):
    def __init__(self, limit: int) -> None:
        super().__init__(f"reachable states exceed the configured bound of {limit}")
        self.limit = limit


class UnsupportedFormula(Exception):
    """Spec outside the G/F/FG/GF fragment; it can still be emitted as SMV."""


class ReplayError(Exception):
    pass


# ---------------------------------------------------------------------------
# Global states


@dataclass(frozen=True)
class ProcState:
    loc: int
    vars: tuple[Value, ...]


@dataclass(frozen=True)
class RvState:
    """Rendezvous channel: handshake flags and the one-slot value buffer."""

    ready: bool = False
    received: bool = False
    buf: tuple[Value, ...] | None = None


@dataclass(frozen=True)
class BufState:
    """Buffered channel: bounded FIFO of payload tuples."""

    queue: tuple[tuple[Value, ...], ...] = ()


ChanState = RvState | BufState


@dataclass(frozen=True)
class GlobalState:
    procs: tuple[ProcState, ...]
    chans: tuple[ChanState, ...]


def initial_state(cs: CompiledSystem) -> GlobalState:
    procs = tuple(ProcState(loc=a.entry, vars=a.initial_locals) for a in cs.automata)
    chans = tuple(
        BufState() if chan.type.is_buffered else RvState()
        for chan in cs.instance.channels
    )
    return GlobalState(procs=procs, chans=chans)


# ---------------------------------------------------------------------------
# Guard evaluation and action application


def _eval(cs: CompiledSystem, e: ir.IrExpr, vars_: tuple, chans: tuple):
    if isinstance(e, ir.EBool):
        return e.value
    if isinstance(e, ir.EEnum):
        return e.ctor
    if isinstance(e, ir.EVar):
        return vars_[e.slot]
    if isinstance(e, ir.ENot):
        return not _eval(cs, e.sub, vars_, chans)
    if isinstance(e, ir.EBin):
        left = _eval(cs, e.left, vars_, chans)
        right = _eval(cs, e.right, vars_, chans)
        if e.op == "&&":
            return left and right
        if e.op == "||":
            return left or right
        if e.op == "->":
            return (not left) or right
        if e.op == "==":
            return left == right
        return left != right  # !=
    if isinstance(e, ir.EChanReady):
        return chans[e.chan].ready
    if isinstance(e, ir.EChanReceived):
        return chans[e.chan].received
    if isinstance(e, ir.EChanBufItem):
        return chans[e.chan].buf[e.index]
    if isinstance(e, ir.EChanNotFull):
        cap = cs.instance.channels[e.chan].type.capacity
        return len(chans[e.chan].queue) < cap
    if isinstance(e, ir.EChanNotEmpty):
        return len(chans[e.chan].queue) > 0
    assert isinstance(e, ir.EChanHeadItem)
    return chans[e.chan].queue[0][e.index]


def _apply(
    cs: CompiledSystem, t: Transition, proc_index: int, state: GlobalState
) -> GlobalState:
    vars_ = list(state.procs[proc_index].vars)
    chans = list(state.chans)
    for action in t.actions:
        if isinstance(action, ir.ASetVar):
            vars_[action.slot] = _eval(cs, action.value, tuple(vars_), tuple(chans))
        elif isinstance(action, ir.ABeginSend):
            payload = tuple(
                _eval(cs, v, tuple(vars_), tuple(chans)) for v in action.payload
            )
            chans[action.chan] = RvState(ready=True, received=False, buf=payload)
        elif isinstance(action, ir.AFinishSend):
            chans[action.chan] = RvState()
        elif isinstance(action, ir.AMarkReceived):
            old = chans[action.chan]
            chans[action.chan] = RvState(ready=old.ready, received=True, buf=old.buf)
        elif isinstance(action, ir.APush):
            payload = tuple(
                _eval(cs, v, tuple(vars_), tuple(chans)) for v in action.payload
            )
            old = chans[action.chan]
            chans[action.chan] = BufState(queue=old.queue + (payload,))
        else:
            assert isinstance(action, ir.APop)
            old = chans[action.chan]
            chans[action.chan] = BufState(queue=old.queue[1:])
    procs = list(state.procs)
    procs[proc_index] = ProcState(loc=t.dst, vars=tuple(vars_))
    return GlobalState(procs=tuple(procs), chans=tuple(chans))


Succ = tuple[int | None, str, GlobalState]


def successor_transitions(
    cs: CompiledSystem, state: GlobalState
) -> list[tuple[int, Transition, GlobalState]]:
    """Enabled process transitions in (process index, declaration) order."""
    out = []
    for i, automaton in enumerate(cs.automata):
        proc = state.procs[i]
        for t in automaton.by_src.get(proc.loc, ()):
            if _eval(cs, t.guard, proc.vars, state.chans):
                out.append((i, t, _apply(cs, t, i, state)))
    return out


def successors(cs: CompiledSystem, state: GlobalState) -> list[Succ]:
    """Enabled interleaving steps in (process index, declaration) order.

    A globally deadlocked state yields exactly one stutter successor so that
    every maximal run is infinite.
    """
    out: list[Succ] = [
        (i, t.label, nxt) for i, t, nxt in successor_transitions(cs, state)
    ]
    if not out and cs.automata:  # a system with no processes has no runs at all
        out.append((None, STUTTER_LABEL, state))
    return out


def enabled_processes(cs: CompiledSystem, state: GlobalState) -> set[int]:
    enabled = set()
    for i, automaton in enumerate(cs.automata):
        proc = state.procs[i]
        for t in automaton.by_src.get(proc.loc, ()):
            if _eval(cs, t.guard, proc.vars, state.chans):
                enabled.add(i)
                break
    return enabled


# ---------------------------------------------------------------------------
# Propositional evaluation


def eval_prop(p: Prop, state: GlobalState) -> Value:
    """Evaluate a propositional formula; atoms read process-local variables.

    A variable of a shutdown process keeps (and reports) its last value.
    """
    if isinstance(p, PBool):
        return p.value
    if isinstance(p, PEnum):
        return p.ctor
    if isinstance(p, PAtom):
        return state.procs[p.proc].vars[p.slot]
    if isinstance(p, PNot):
        return not eval_prop(p.sub, state)
    if isinstance(p, PBin):
        left = eval_prop(p.left, state)
        right = eval_prop(p.right, state)
        if p.op == "&&":
            return left and right
        if p.op == "||":
            return left or right
        if p.op == "->":
            return (not left) or right
        if p.op == "==":
            return left == right
        return left != right
    raise UnsupportedFormula("temporal operator in propositional position")


# ---------------------------------------------------------------------------
# Spec patterns


def _has_temporal(p: Prop) -> bool:
    if isinstance(p, PTemporal):
        return True
    if isinstance(p, PNot):
        return _has_temporal(p.sub)
    if isinstance(p, PBin):
        return _has_temporal(p.left) or _has_temporal(p.right)
    return False


def extract_pattern(formula: Prop) -> tuple[str, Prop]:
    """Classify a formula as G / F / FG / GF over a propositional core."""
    ops: list[str] = []
    f = formula
    while isinstance(f, PTemporal):
        if not ops or ops[-1] != f.op:  # collapse GG -> G, FF -> F
            ops.append(f.op)
        f = f.sub
    if _has_temporal(f):
        raise UnsupportedFormula("temporal operators nested inside the formula body")
    key = "".join(ops)
    if key in ("G", "F", "FG", "GF"):
        return key, f
    raise UnsupportedFormula(
        f"formula shape '{key or 'propositional'}' outside the G/F/FG/GF fragment"
    )


# ---------------------------------------------------------------------------
# Verdicts


class Result(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class Step:
    proc: int | None  # None for the stutter step
    proc_name: str
    label: str
    state: GlobalState


@dataclass(frozen=True)
class Counterexample:
    initial: GlobalState
    prefix: tuple[Step, ...]
    loop: tuple[Step, ...] | None  # None: finite safety trace; else a lasso


@dataclass(frozen=True)
class Verdict:
    result: Result
    counterexample: Counterexample | None = None
    states_explored: int = 0

    @property
    def passed(self) -> bool:
        return self.result is Result.PASS


# ---------------------------------------------------------------------------
# Search plumbing


class _Search:
    """Caches the successor relation for the duration of one check."""

    def __init__(self, cs: CompiledSystem, max_states: int) -> None:
        self.cs = cs
        self.max_states = max_states
        self.cache: dict[GlobalState, tuple[Succ, ...]] = {}

    def succs(self, state: GlobalState) -> tuple[Succ, ...]:
        cached = self.cache.get(state)
        if cached is None:
            cached = tuple(successors(self.cs, state))
            self.cache[state] = cached
        return cached

    def step(self, succ: Succ) -> Step:
        proc, label, state = succ
        name = STUTTER_NAME if proc is None else self.cs.instance.processes[proc].name
        return Step(proc=proc, proc_name=name, label=label, state=state)

    def bfs(self, restrict=None):
        """Reachability with parent pointers, optionally restricted to a predicate.

        Returns (parents, init); parents maps state -> (previous state, step)
        and covers init even when init fails the predicate.
        """
        init = initial_state(self.cs)
        parents: dict[GlobalState, tuple[GlobalState, Succ] | None] = {init: None}
        if restrict is not None and not restrict(init):
            return parents, init
        frontier = deque([init])
        while frontier:
            state = frontier.popleft()
            for succ in self.succs(state):
                nxt = succ[2]
                if nxt in parents or (restrict is not None and not restrict(nxt)):
                    continue
                parents[nxt] = (state, succ)
                if len(parents) > self.max_states:
                    raise StateLimitExceeded(self.max_states)
                frontier.append(nxt)
        return parents, init

    def prefix_to(self, parents, state: GlobalState) -> tuple[Step, ...]:
        steps: list[Step] = []
        cur = state
        while parents[cur] is not None:
            prev, succ = parents[cur]
            steps.append(self.step(succ))
            cur = prev
        steps.reverse()
        return tuple(steps)

    def admissible(self, loop: list[Step], head: GlobalState, fairness: bool) -> bool:
        """Every process enabled at some loop state must step somewhere on it."""
        if not fairness:
            return True
        states = [head] + [step.state for step in loop[:-1]]
        enabled: set[int] = set()
        for s in states:
            enabled |= enabled_processes(self.cs, s)
        steppers = {step.proc for step in loop if step.proc is not None}
        return enabled <= steppers

    def find_cycle(self, roots, allowed, fairness: bool):
        """DFS over the `allowed` subgraph; returns (head, loop steps) or None."""
        visited: set[GlobalState] = set()
        for root in roots:
            if root in visited or not allowed(root):
                continue
            visited.add(root)
            on_stack: dict[GlobalState, int] = {root: 0}
            path: list[Step] = []
            stack = [(root, iter(self.succs(root)))]
            while stack:
                state, it = stack[-1]
                advanced = False
                for succ in it:
                    nxt = succ[2]
                    if not allowed(nxt):
                        continue
                    if nxt in on_stack:
                        loop = path[on_stack[nxt] :] + [self.step(succ)]
                        if self.admissible(loop, nxt, fairness):
                            return nxt, loop
                        continue
                    if nxt in visited:
                        continue
                    visited.add(nxt)
                    if len(visited) > self.max_states:
                        raise StateLimitExceeded(self.max_states)
                    on_stack[nxt] = len(path) + 1
                    path.append(self.step(succ))
                    stack.append((nxt, iter(self.succs(nxt))))
                    advanced = True
                    break
                if not advanced:
                    stack.pop()
                    del on_stack[state]
                    if path:
                        path.pop()
        return None

    def nested_cycle_search(self, init: GlobalState, accepting, fairness: bool):
        """Nested DFS: find a reachable cycle through an accepting state.

        Outer DFS explores the full graph; when an accepting state is about to
        be retired, an inner DFS looks for a way back onto the outer stack,
        which closes a cycle through that accepting state.
        """
        flagged: set[GlobalState] = set()
        visited: set[GlobalState] = {init}
        on_stack: dict[GlobalState, int] = {init: 0}
        path: list[Step] = []
        stack = [(init, iter(self.succs(init)))]
        while stack:
            state, it = stack[-1]
            advanced = False
            for succ in it:
                nxt = succ[2]
                if nxt in visited:
                    continue
                visited.add(nxt)
                if len(visited) > self.max_states:
                    raise StateLimitExceeded(self.max_states)
                on_stack[nxt] = len(path) + 1
                path.append(self.step(succ))
                stack.append((nxt, iter(self.succs(nxt))))
                advanced = True
                break
            if advanced:
                continue
            if accepting(state):
                found = self._inner_search(state, on_stack, path, flagged, fairness)
                if found is not None:
                    return found
            stack.pop()
            del on_stack[state]
            if path:
                path.pop()
        return None

    def _inner_search(self, seed, on_stack, outer_path, flagged, fairness):
        """Look for a path from `seed` back to the outer DFS stack."""
        if seed in flagged:
            return None
        flagged.add(seed)
        inner_path: list[Step] = []
        stack = [(seed, iter(self.succs(seed)))]
        while stack:
            state, it = stack[-1]
            advanced = False
            for succ in it:
                nxt = succ[2]
                if nxt in on_stack:
                    # Cycle: nxt ->(outer stack)-> seed ->(inner path)-> nxt.
                    loop = (
                        outer_path[on_stack[nxt] :]
                        + inner_path
                        + [self.step(succ)]
                    )
                    if self.admissible(loop, nxt, fairness):
                        return nxt, loop
                    continue
                if nxt in flagged:
                    continue
                flagged.add(nxt)
                inner_path.append(self.step(succ))
                stack.append((nxt, iter(self.succs(nxt))))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if inner_path:
                    inner_path.pop()
        return None


# ---------------------------------------------------------------------------
# Safety: G(p) by breadth-first reachability


def check_safety(
    cs: CompiledSystem, prop: Prop, max_states: int = DEFAULT_MAX_STATES
) -> Verdict:
    search = _Search(cs, max_states)
    init = initial_state(cs)
    if not eval_prop(prop, init):
        return Verdict(Result.FAIL, Counterexample(init, (), None), 1)
    parents: dict[GlobalState, tuple[GlobalState, Succ] | None] = {init: None}
    frontier = deque([init])
    while frontier:
        state = frontier.popleft()
        for succ in search.succs(state):
            nxt = succ[2]
            if nxt in parents:
                continue
            parents[nxt] = (state, succ)
            if len(parents) > max_states:
                raise StateLimitExceeded(max_states)
            if not eval_prop(prop, nxt):
                cex = Counterexample(init, search.prefix_to(parents, nxt), None)
                return Verdict(Result.FAIL, cex, len(parents))
            frontier.append(nxt)
    return Verdict(Result.PASS, None, len(parents))


# ---------------------------------------------------------------------------
# Liveness: F(p), FG(p), GF(p) by lasso search


def check_liveness(
    cs: CompiledSystem,
    pattern: str,
    prop: Prop,
    fairness: bool = True,
    max_states: int = DEFAULT_MAX_STATES,
) -> Verdict:
    """Search for an admissible counterexample lasso of the given pattern.

    F(p): a run never reaching p — prefix and loop entirely in !p states.
    FG(p): a run with infinitely many !p states — a loop through a !p state.
    GF(p): a run eventually avoiding p forever — a loop with no p state.
    """
    search = _Search(cs, max_states)
    notp = lambda s: not eval_prop(prop, s)
    if pattern == "F":
        parents, init = search.bfs(restrict=notp)
        if not notp(init):
            return Verdict(Result.PASS, None, 1)
        found = search.find_cycle(list(parents), notp, fairness)
    elif pattern == "GF":
        parents, init = search.bfs()
        roots = [s for s in parents if notp(s)]
        found = search.find_cycle(roots, notp, fairness)
    elif pattern == "FG":
        parents, init = search.bfs()
        found = search.nested_cycle_search(init, notp, fairness)
    else:
        raise UnsupportedFormula(f"not a liveness pattern: {pattern}")
    if found is None:
        return Verdict(Result.PASS, None, len(parents))
    head, loop = found
    cex = Counterexample(init, search.prefix_to(parents, head), tuple(loop))
    return Verdict(Result.FAIL, cex, len(parents))


def check_spec(
    cs: CompiledSystem,
    spec: ResolvedSpec,
    fairness: bool = True,
    max_states: int = DEFAULT_MAX_STATES,
) -> Verdict:
    """Dispatch a resolved spec to the safety or liveness checker."""
    pattern, prop = extract_pattern(spec.formula)
    if pattern == "G":
        return check_safety(cs, prop, max_states)
    return check_liveness(cs, pattern, prop, fairness, max_states)


# ---------------------------------------------------------------------------
# Replay and rendering


def replay(cs: CompiledSystem, cex: Counterexample) -> None:
    """Re-run a counterexample from the initial state; raises on any mismatch."""
    state = initial_state(cs)
    if state != cex.initial:
        raise ReplayError("recorded initial state differs")
    for k, step in enumerate(cex.prefix + (cex.loop or ())):
        for proc, label, nxt in successors(cs, state):
            if proc == step.proc and label == step.label and nxt == step.state:
                state = nxt
                break
        else:
            raise ReplayError(f"step {k + 1} ({step.label}) cannot be replayed")
    if cex.loop:
        loop_head = cex.prefix[-1].state if cex.prefix else cex.initial
        if state != loop_head:
            raise ReplayError("loop does not close back on its head state")


def _render_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def _state_fields(cs: CompiledSystem, state: GlobalState) -> dict[str, str]:
    fields: dict[str, str] = {}
    for proc, ps, automaton in zip(cs.instance.processes, state.procs, cs.automata):
        loc = "shutdown" if ps.loc == automaton.shutdown_loc else str(ps.loc)
        fields[f"{proc.name}.@loc"] = loc
        for slot, value in zip(automaton.locals, ps.vars):
            fields[f"{proc.name}.{slot.name}"] = _render_value(value)
    for chan, chan_state in zip(cs.instance.channels, state.chans):
        if isinstance(chan_state, RvState):
            fields[f"{chan.name}.ready"] = _render_value(chan_state.ready)
            fields[f"{chan.name}.received"] = _render_value(chan_state.received)
            buf = (
                "-"
                if chan_state.buf is None
                else "(" + ", ".join(_render_value(v) for v in chan_state.buf) + ")"
            )
            fields[f"{chan.name}.buffer"] = buf
        else:
            items = ", ".join(
                "(" + ", ".join(_render_value(v) for v in item) + ")"
                for item in chan_state.queue
            )
            fields[f"{chan.name}.queue"] = f"[{items}]"
    return fields


def format_trace(cs: CompiledSystem, cex: Counterexample) -> str:
    """Numbered steps with changed-variable diffs; lassos end in a LOOP line."""
    lines = ["counterexample:"]
    prev_fields = _state_fields(cs, cex.initial)
    lines.append("  initial: " + ", ".join(f"{k}={v}" for k, v in prev_fields.items()))
    steps = list(cex.prefix) + list(cex.loop or ())
    for k, step in enumerate(steps, start=1):
        marker = ""
        if cex.loop and k == len(cex.prefix) + 1:
            marker = " (loop starts)"
        lines.append(f"#{k} {step.proc_name}: {step.label}{marker}")
        fields = _state_fields(cs, step.state)
        for key, value in fields.items():
            if prev_fields[key] != value:
                lines.append(f"    {key} = {value}")
        prev_fields = fields
    if cex.loop:
        lines.append(f"LOOP back to step #{len(cex.prefix)}")
    return "\n".join(lines) + "\n"
