"""Emission of the woven system as a self-contained SMV module text.

One module per channel and per process instance holds that component's state
variables; main instantiates everything and owns the whole transition
relation as a single TRANS disjunction.  A bookkeeping variable `mover`
records which process stepped, which both realizes the interleaving scheduler
(its next value is the nondeterministic selection) and supports the per
process JUSTICE constraints emitted when fairness is on.  A deadlocked state
takes the mover = m_none disjunct, which freezes every variable, mirroring
the built-in checker's stutter rule.

Faults are already present in the woven automata, so the output needs no
separate fault handling.  Emission is byte-deterministic for a given system.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ir
from .sema import (
    BoolType,
    EnumType,
    PAtom,
    PBin,
    PBool,
    PEnum,
    PNot,
    Prop,
    PTemporal,
    SystemInstance,
    Value,
)


class EmitError(Exception):
    pass


_RESERVED = frozenset(
    """
    MODULE DEFINE MDEFINE CONSTANTS VAR IVAR FROZENVAR INIT TRANS INVAR SPEC
    CTLSPEC LTLSPEC PSLSPEC COMPUTE NAME INVARSPEC FAIRNESS JUSTICE COMPASSION
    ISA ASSIGN CONSTRAINT SIMPWFF CTLWFF LTLWFF PSLWFF COMPWFF IN MIN MAX
    MIRROR PRED PREDICATES process array of boolean integer real word word1
    bool signed unsigned extend resize sizeof uwconst swconst init self TRUE
    FALSE case esac union in xor xnor nand nor next mod abs max min
    A E F G X U V S T O H Y Z AX AG AF EX EG EF
    """.split()
)


class _Sanitizer:
    """Deterministic identifier sanitization with collision suffixes."""

    def __init__(self) -> None:
        self.used: set[str] = set()
        self.mapping: dict[str, str] = {}

    def name(self, original: str) -> str:
        if original in self.mapping:
            return self.mapping[original]
        candidate = self.fresh(original)
        self.mapping[original] = candidate
        return candidate

    def fresh(self, original: str) -> str:
        """Allocate a unique name without consulting the memo (for names the
        emitter invents itself, which must never alias a user name)."""
        base = "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in original)
        if not base or base[0].isdigit():
            base = "v_" + base
        candidate = base
        n = 1
        while candidate in _RESERVED or candidate in self.used:
            n += 1
            candidate = f"{base}_{n}"
            if n > 1000:
                raise EmitError(f"cannot sanitize identifier '{original}'")
        self.used.add(candidate)
        return candidate


@dataclass(frozen=True)
class SmvDocument:
    channel_modules: tuple[tuple[str, str], ...]  # (module name, module text)
    process_modules: tuple[tuple[str, str], ...]
    main_module: str
    spec_lines: tuple[str, ...]

    def render(self) -> str:
        parts = [text for _, text in self.channel_modules]
        parts += [text for _, text in self.process_modules]
        parts.append(self.main_module)
        return "\n".join(parts)


class _Emitter:
    def __init__(self, system: SystemInstance, automata, fairness: bool) -> None:
        self.system = system
        self.automata = automata
        self.fairness = fairness
        self.ctor_names = _Sanitizer()
        self.instance_names = _Sanitizer()
        # Enum constructors first: they are global symbolic constants.
        for enum in system.checked.enums.values():
            for ctor in enum.constructors:
                self.ctor_names.name(ctor)
        self.chan_ids = [self.instance_names.name(c.name) for c in system.channels]
        self.proc_ids = [self.instance_names.name(p.name) for p in system.processes]
        self.var_ids: list[dict[int, str]] = []
        for automaton in automata:
            names = _Sanitizer()
            names.used.add("loc")
            self.var_ids.append(
                {slot: names.name(info.name) for slot, info in enumerate(automaton.locals)}
            )
        # Bookkeeping names in main share a namespace with the instances;
        # scheduler symbols share the symbolic-constant namespace with the
        # enum constructors.
        aux = self.instance_names
        self.mover_var = aux.fresh("mover")
        self.any_enabled = aux.fresh("any_enabled")
        self.frame_ids = {cid: aux.fresh(f"frame_{cid}") for cid in self.chan_ids}
        self.frame_ids.update({pid: aux.fresh(f"frame_{pid}") for pid in self.proc_ids})
        self.enabled_ids = {pid: aux.fresh(f"enabled_{pid}") for pid in self.proc_ids}
        self.en_ids = {
            (proc, k): aux.fresh(f"en_{self.proc_ids[proc]}_{k}")
            for proc, automaton in enumerate(automata)
            for k in range(len(automaton.transitions))
        }
        self.mover_syms = {
            pid: self.ctor_names.fresh(f"m_{pid}") for pid in self.proc_ids
        }
        self.mover_none = self.ctor_names.fresh("m_none")

    # -- small renderers

    def value_type(self, ty) -> str:
        if isinstance(ty, BoolType):
            return "boolean"
        assert isinstance(ty, EnumType)
        ctors = ", ".join(self.ctor_names.name(c) for c in ty.constructors)
        return "{" + ctors + "}"

    def literal(self, value: Value) -> str:
        if isinstance(value, bool):
            return "TRUE" if value else "FALSE"
        return self.ctor_names.name(value)

    def zero_literal(self, ty) -> str:
        if isinstance(ty, BoolType):
            return "FALSE"
        return self.ctor_names.name(ty.constructors[0])

    def loc_symbol(self, proc: int, loc: int) -> str:
        if self.automata[proc].shutdown_loc == loc:
            return "shutdown"
        return f"l{loc}"

    def expr(self, e: ir.IrExpr, proc: int) -> str:
        """Render a guard or value expression against main-scope names."""
        if isinstance(e, ir.EBool):
            return "TRUE" if e.value else "FALSE"
        if isinstance(e, ir.EEnum):
            return self.ctor_names.name(e.ctor)
        if isinstance(e, ir.EVar):
            return f"{self.proc_ids[proc]}.{self.var_ids[proc][e.slot]}"
        if isinstance(e, ir.ENot):
            return f"!{self.expr(e.sub, proc)}"
        if isinstance(e, ir.EBin):
            op = {"&&": "&", "||": "|", "->": "->", "==": "=", "!=": "!="}[e.op]
            return f"({self.expr(e.left, proc)} {op} {self.expr(e.right, proc)})"
        if isinstance(e, ir.EChanReady):
            return f"{self.chan_ids[e.chan]}.ready"
        if isinstance(e, ir.EChanReceived):
            return f"{self.chan_ids[e.chan]}.received"
        if isinstance(e, ir.EChanBufItem):
            return f"{self.chan_ids[e.chan]}.v{e.index}"
        if isinstance(e, ir.EChanNotFull):
            cap = self.system.channels[e.chan].type.capacity
            return f"{self.chan_ids[e.chan]}.len < {cap}"
        if isinstance(e, ir.EChanNotEmpty):
            return f"{self.chan_ids[e.chan]}.len > 0"
        assert isinstance(e, ir.EChanHeadItem)
        return f"{self.chan_ids[e.chan]}.q0_{e.index}"

    def prop(self, p: Prop) -> str:
        if isinstance(p, PBool):
            return "TRUE" if p.value else "FALSE"
        if isinstance(p, PEnum):
            return self.ctor_names.name(p.ctor)
        if isinstance(p, PAtom):
            return f"{self.proc_ids[p.proc]}.{self.var_ids[p.proc][p.slot]}"
        if isinstance(p, PNot):
            return f"!({self.prop(p.sub)})"
        if isinstance(p, PTemporal):
            return f"{p.op} ({self.prop(p.sub)})"
        assert isinstance(p, PBin)
        op = {"&&": "&", "||": "|", "->": "->", "==": "=", "!=": "!="}[p.op]
        return f"({self.prop(p.left)} {op} {self.prop(p.right)})"

    # -- channel modules

    def channel_module(self, chan: int) -> tuple[str, str]:
        decl = self.system.channels[chan]
        name = f"chan_{self.chan_ids[chan]}"
        lines = [f"MODULE {name}", "  VAR"]
        inits = []
        if decl.type.is_buffered:
            cap = decl.type.capacity
            lines.append(f"    len : 0..{cap};")
            inits.append("len = 0")
            for i in range(cap):
                for j, ty in enumerate(decl.type.payload):
                    lines.append(f"    q{i}_{j} : {self.value_type(ty)};")
                    inits.append(f"q{i}_{j} = {self.zero_literal(ty)}")
        else:
            lines.append("    ready : boolean;")
            lines.append("    received : boolean;")
            inits.extend(["!ready", "!received"])
            for j, ty in enumerate(decl.type.payload):
                lines.append(f"    v{j} : {self.value_type(ty)};")
                inits.append(f"v{j} = {self.zero_literal(ty)}")
        lines.append("  INIT " + " & ".join(inits) + ";")
        return name, "\n".join(lines) + "\n"

    # -- process modules

    def process_module(self, proc: int) -> tuple[str, str]:
        automaton = self.automata[proc]
        name = f"proc_{self.proc_ids[proc]}"
        locs = ", ".join(self.loc_symbol(proc, loc) for loc in range(automaton.n_locations))
        lines = [f"MODULE {name}", "  VAR", f"    loc : {{{locs}}};"]
        inits = [f"loc = {self.loc_symbol(proc, automaton.entry)}"]
        for slot, info in enumerate(automaton.locals):
            lines.append(f"    {self.var_ids[proc][slot]} : {self.value_type(info.type)};")
            inits.append(f"{self.var_ids[proc][slot]} = {self.literal(info.zero)}")
        lines.append("  INIT " + " & ".join(inits) + ";")
        return name, "\n".join(lines) + "\n"

    # -- transition effects

    def _chan_fields(self, chan: int) -> list[str]:
        decl = self.system.channels[chan]
        cid = self.chan_ids[chan]
        if decl.type.is_buffered:
            fields = [f"{cid}.len"]
            for i in range(decl.type.capacity):
                for j in range(len(decl.type.payload)):
                    fields.append(f"{cid}.q{i}_{j}")
            return fields
        return [f"{cid}.ready", f"{cid}.received"] + [
            f"{cid}.v{j}" for j in range(len(decl.type.payload))
        ]

    def _proc_fields(self, proc: int) -> list[str]:
        pid = self.proc_ids[proc]
        return [f"{pid}.loc"] + [
            f"{pid}.{self.var_ids[proc][slot]}" for slot in range(len(self.automata[proc].locals))
        ]

    def _effects(self, proc: int, t: ir.Transition) -> tuple[dict[str, str], set[int]]:
        """Next-state value per written field, plus the set of touched channels."""
        writes: dict[str, str] = {f"{self.proc_ids[proc]}.loc": self.loc_symbol(proc, t.dst)}
        touched: set[int] = set()
        for action in t.actions:
            if isinstance(action, ir.ASetVar):
                field = f"{self.proc_ids[proc]}.{self.var_ids[proc][action.slot]}"
                writes[field] = self.expr(action.value, proc)
            elif isinstance(action, ir.ABeginSend):
                cid = self.chan_ids[action.chan]
                touched.add(action.chan)
                writes[f"{cid}.ready"] = "TRUE"
                for j, value in enumerate(action.payload):
                    writes[f"{cid}.v{j}"] = self.expr(value, proc)
            elif isinstance(action, ir.AFinishSend):
                decl = self.system.channels[action.chan]
                cid = self.chan_ids[action.chan]
                touched.add(action.chan)
                writes[f"{cid}.ready"] = "FALSE"
                writes[f"{cid}.received"] = "FALSE"
                for j, ty in enumerate(decl.type.payload):
                    writes[f"{cid}.v{j}"] = self.zero_literal(ty)
            elif isinstance(action, ir.AMarkReceived):
                touched.add(action.chan)
                writes[f"{self.chan_ids[action.chan]}.received"] = "TRUE"
            elif isinstance(action, ir.APush):
                decl = self.system.channels[action.chan]
                cid = self.chan_ids[action.chan]
                cap = decl.type.capacity
                touched.add(action.chan)
                writes[f"{cid}.len"] = f"{cid}.len + 1"
                for i in range(cap):
                    for j, value in enumerate(action.payload):
                        slot = f"{cid}.q{i}_{j}"
                        pushed = self.expr(value, proc)
                        writes[slot] = (
                            f"case {cid}.len = {i} : {pushed}; TRUE : {slot}; esac"
                        )
            else:
                assert isinstance(action, ir.APop)
                decl = self.system.channels[action.chan]
                cid = self.chan_ids[action.chan]
                cap = decl.type.capacity
                touched.add(action.chan)
                writes[f"{cid}.len"] = f"{cid}.len - 1"
                for i in range(cap):
                    for j, ty in enumerate(decl.type.payload):
                        slot = f"{cid}.q{i}_{j}"
                        if i + 1 < cap:
                            writes[slot] = f"{cid}.q{i + 1}_{j}"
                        else:
                            writes[slot] = self.zero_literal(ty)
        return writes, touched

    # -- main module

    def main_module(self, specs: tuple[str, ...]) -> str:
        lines = ["MODULE main", "  VAR"]
        for chan, cid in enumerate(self.chan_ids):
            lines.append(f"    {cid} : chan_{cid};")
        for proc, pid in enumerate(self.proc_ids):
            lines.append(f"    {pid} : proc_{pid};")
        movers = ", ".join(
            [self.mover_syms[pid] for pid in self.proc_ids] + [self.mover_none]
        )
        lines.append(f"    {self.mover_var} : {{{movers}}};")
        lines.append(f"  INIT {self.mover_var} = {self.mover_none};")

        lines.append("  DEFINE")
        for proc, automaton in enumerate(self.automata):
            pid = self.proc_ids[proc]
            for k, t in enumerate(automaton.transitions):
                src = self.loc_symbol(proc, t.src)
                guard = self.expr(t.guard, proc)
                lines.append(
                    f"    {self.en_ids[proc, k]} := {pid}.loc = {src} & {guard};"
                )
            enables = " | ".join(
                self.en_ids[proc, k] for k in range(len(automaton.transitions))
            )
            lines.append(f"    {self.enabled_ids[pid]} := {enables};")
        any_enabled = " | ".join(self.enabled_ids[pid] for pid in self.proc_ids) or "FALSE"
        lines.append(f"    {self.any_enabled} := {any_enabled};")
        for proc, pid in enumerate(self.proc_ids):
            keeps = " & ".join(f"next({f}) = {f}" for f in self._proc_fields(proc))
            lines.append(f"    {self.frame_ids[pid]} := {keeps};")
        for chan, cid in enumerate(self.chan_ids):
            keeps = " & ".join(f"next({f}) = {f}" for f in self._chan_fields(chan))
            lines.append(f"    {self.frame_ids[cid]} := {keeps};")

        disjuncts = []
        for proc, automaton in enumerate(self.automata):
            pid = self.proc_ids[proc]
            steps = []
            for k, t in enumerate(automaton.transitions):
                writes, touched = self._effects(proc, t)
                conj = [self.en_ids[proc, k]]
                for field in self._proc_fields(proc):
                    conj.append(f"next({field}) = {writes[field]}"
                                if field in writes else f"next({field}) = {field}")
                for chan, cid in enumerate(self.chan_ids):
                    if chan not in touched:
                        conj.append(self.frame_ids[cid])
                        continue
                    for field in self._chan_fields(chan):
                        conj.append(f"next({field}) = ({writes[field]})"
                                    if field in writes else f"next({field}) = {field}")
                steps.append("(" + " & ".join(conj) + ")")
            others = [self.frame_ids[q] for j, q in enumerate(self.proc_ids) if j != proc]
            move = " | ".join(steps) if steps else "FALSE"
            parts = [
                f"next({self.mover_var}) = {self.mover_syms[pid]}",
                f"({move})",
            ] + others
            disjuncts.append("      (" + " & ".join(parts) + ")")
        stutter = (
            [f"next({self.mover_var}) = {self.mover_none}", f"!{self.any_enabled}"]
            + [self.frame_ids[pid] for pid in self.proc_ids]
            + [self.frame_ids[cid] for cid in self.chan_ids]
        )
        disjuncts.append("      (" + " & ".join(stutter) + ")")
        lines.append("  TRANS")
        lines.append("\n    |\n".join(disjuncts) + ";")

        if self.fairness:
            for pid in self.proc_ids:
                lines.append(
                    f"  JUSTICE {self.mover_var} = {self.mover_syms[pid]}"
                    f" | !{self.enabled_ids[pid]};"
                )
        lines.extend(f"  {spec}" for spec in specs)
        return "\n".join(lines) + "\n"


def emit_smv(system: SystemInstance, automata, fairness: bool = True) -> SmvDocument:
    """Encode the woven system (faults included) as SMV module texts."""
    emitter = _Emitter(system, tuple(automata), fairness)
    channel_modules = tuple(
        emitter.channel_module(i) for i in range(len(system.channels))
    )
    process_modules = tuple(
        emitter.process_module(i) for i in range(len(system.processes))
    )
    specs = tuple(f"LTLSPEC {emitter.prop(spec.formula)};" for spec in system.ltl_specs)
    main = emitter.main_module(specs)
    return SmvDocument(
        channel_modules=channel_modules,
        process_modules=process_modules,
        main_module=main,
        spec_lines=specs,
    )
