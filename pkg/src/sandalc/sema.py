"""Name resolution, type checking and system instantiation.

resolve_and_check validates a ModelAST against the typing rules and records,
per template, how every name and declaration resolves.  instantiate then
closes the init-block into a SystemInstance: concrete channels, concrete
processes with their channel bindings, and ltl formulas with atoms resolved
to (process index, variable slot) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as ast
from .errors import ArityError, NameResolutionError, Pos, TypeCheckError

Value = bool | str  # runtime values: booleans and enum constructor names


# ---------------------------------------------------------------------------
# Semantic types


@dataclass(frozen=True)
class BoolType:
    def __str__(self) -> str:
        return "bool"


BOOL = BoolType()


@dataclass(frozen=True)
class EnumType:
    name: str
    constructors: tuple[str, ...]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ChannelType:
    payload: tuple[BoolType | EnumType, ...]
    capacity: int | None = None  # None: rendezvous

    @property
    def is_buffered(self) -> bool:
        return self.capacity is not None

    def __str__(self) -> str:
        cap = f" [{self.capacity}]" if self.capacity is not None else ""
        return f"channel{cap} {{ {', '.join(str(t) for t in self.payload)} }}"


@dataclass(frozen=True)
class ChannelArrayType:
    elem: ChannelType

    def __str__(self) -> str:
        return "[]" + str(self.elem)


ValueType = BoolType | EnumType


def zero_value(ty: ValueType) -> Value:
    """Initial value of a variable: false, or the first declared constructor."""
    if isinstance(ty, BoolType):
        return False
    return ty.constructors[0]


# ---------------------------------------------------------------------------
# Name bindings recorded for the lowering stage


@dataclass(frozen=True)
class LocalVar:
    slot: int
    type: ValueType


@dataclass(frozen=True)
class ChannelParam:
    name: str
    type: ChannelType


@dataclass(frozen=True)
class ChannelArrayParam:
    name: str
    type: ChannelArrayType


@dataclass(frozen=True)
class ValueParam:
    name: str
    type: ValueType


@dataclass(frozen=True)
class LoopChannel:
    for_id: int  # id() of the For node that binds this variable
    type: ChannelType


@dataclass(frozen=True)
class EnumConst:
    type: EnumType
    ctor: str


Binding = LocalVar | ChannelParam | ChannelArrayParam | ValueParam | LoopChannel | EnumConst


@dataclass(frozen=True)
class SlotInfo:
    name: str  # display name, disambiguated when shadowed
    src_name: str
    type: ValueType
    zero: Value


@dataclass
class TemplateInfo:
    """Symbol tables for one process template, keyed by AST node identity."""

    template: ast.ProcTemplate
    params: dict[str, Binding]
    slots: list[SlotInfo]
    body_level: dict[str, int]  # proc-body-level variable name -> slot
    resolutions: dict[int, Binding] = field(default_factory=dict)  # id(Name) -> binding
    decl_slots: dict[int, int] = field(default_factory=dict)  # id(VarDecl) -> slot
    target_slots: dict[int, tuple[int, ...]] = field(default_factory=dict)
    assign_slots: dict[int, int] = field(default_factory=dict)
    expr_types: dict[int, object] = field(default_factory=dict)  # id(Expr) -> type


@dataclass
class CheckedModel:
    ast: ast.ModelAST
    enums: dict[str, EnumType]
    constructors: dict[str, EnumType]
    templates: dict[str, TemplateInfo]


# ---------------------------------------------------------------------------
# Resolved LTL formulas


@dataclass(frozen=True)
class Prop:
    pass


@dataclass(frozen=True)
class PAtom(Prop):
    proc: int
    slot: int
    proc_name: str
    var_name: str
    type: ValueType

    def __str__(self) -> str:
        return f"{self.proc_name}.{self.var_name}"


@dataclass(frozen=True)
class PBool(Prop):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class PEnum(Prop):
    ctor: str

    def __str__(self) -> str:
        return self.ctor


@dataclass(frozen=True)
class PNot(Prop):
    sub: Prop

    def __str__(self) -> str:
        return f"!({self.sub})"


@dataclass(frozen=True)
class PBin(Prop):
    op: str  # && || -> == !=
    left: Prop
    right: Prop

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class PTemporal(Prop):
    op: str  # G | F
    sub: Prop

    def __str__(self) -> str:
        return f"{self.op} ({self.sub})"


# ---------------------------------------------------------------------------
# System instances


@dataclass(frozen=True)
class ChannelDecl:
    name: str
    type: ChannelType
    drop_fault: bool = False


@dataclass(frozen=True)
class ProcessDecl:
    name: str
    template: str
    chan_bindings: dict[str, int | tuple[int, ...]]
    const_bindings: dict[str, Value]
    shutdown_fault: bool = False


@dataclass(frozen=True)
class ResolvedSpec:
    formula: Prop
    text: str  # rendering of the original formula


@dataclass(frozen=True)
class SystemInstance:
    channels: tuple[ChannelDecl, ...]
    processes: tuple[ProcessDecl, ...]
    ltl_specs: tuple[ResolvedSpec, ...]
    checked: CheckedModel

    def template_info(self, proc: ProcessDecl) -> TemplateInfo:
        return self.checked.templates[proc.template]


# ---------------------------------------------------------------------------
# Type resolution helpers


def _value_type_from_node(node: ast.TypeNode, enums: dict[str, EnumType]) -> ValueType:
    if isinstance(node, ast.BoolTypeNode):
        return BOOL
    if isinstance(node, ast.NamedTypeNode):
        if node.name not in enums:
            raise NameResolutionError(f"unknown type '{node.name}'", node.pos)
        return enums[node.name]
    raise TypeCheckError("expected a value type (bool or a data type)", node.pos)


def _chan_type_from_node(node: ast.ChanTypeNode, enums: dict[str, EnumType]) -> ChannelType:
    payload = tuple(_value_type_from_node(t, enums) for t in node.payload)
    return ChannelType(payload=payload, capacity=node.capacity)


def _type_from_node(node: ast.TypeNode, enums: dict[str, EnumType]):
    if isinstance(node, ast.ChanTypeNode):
        return _chan_type_from_node(node, enums)
    if isinstance(node, ast.ChanArrayTypeNode):
        return ChannelArrayType(elem=_chan_type_from_node(node.elem, enums))
    return _value_type_from_node(node, enums)


# ---------------------------------------------------------------------------
# Template checking


class _TemplateChecker:
    def __init__(self, tmpl: ast.ProcTemplate, enums, constructors) -> None:
        self.enums = enums
        self.constructors = constructors
        params: dict[str, Binding] = {}
        for p in tmpl.params:
            ty = _type_from_node(p.type, enums)
            if isinstance(ty, ChannelType):
                params[p.name] = ChannelParam(p.name, ty)
            elif isinstance(ty, ChannelArrayType):
                params[p.name] = ChannelArrayParam(p.name, ty)
            else:
                params[p.name] = ValueParam(p.name, ty)
        self.info = TemplateInfo(
            template=tmpl, params=params, slots=[], body_level={}
        )
        self.scopes: list[dict[str, Binding]] = [dict(params)]
        self.slot_names: set[str] = set()

    def check(self) -> TemplateInfo:
        self._check_block(self.info.template.body, body_level=True)
        return self.info

    # -- scope helpers

    def _lookup(self, name: str, pos: Pos) -> Binding:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.constructors:
            enum = self.constructors[name]
            return EnumConst(type=enum, ctor=name)
        raise NameResolutionError(f"unknown name '{name}'", pos)

    def _declare(self, decl: ast.VarDecl, body_level: bool) -> None:
        scope = self.scopes[-1]
        if decl.name in scope:
            raise NameResolutionError(
                f"'{decl.name}' is already declared in this scope", decl.pos
            )
        ty = _value_type_from_node(decl.type, self.enums)
        slot = len(self.info.slots)
        display = decl.name
        n = 2
        while display in self.slot_names:
            display = f"{decl.name}_{n}"
            n += 1
        self.slot_names.add(display)
        self.info.slots.append(
            SlotInfo(name=display, src_name=decl.name, type=ty, zero=zero_value(ty))
        )
        self.info.decl_slots[id(decl)] = slot
        if body_level and decl.name not in self.info.body_level:
            self.info.body_level[decl.name] = slot
        scope[decl.name] = LocalVar(slot=slot, type=ty)

    # -- statements

    def _check_block(self, block: ast.Block, body_level: bool = False) -> None:
        self.scopes.append({})
        for stmt in block.stmts:
            self._check_stmt(stmt, body_level)
        self.scopes.pop()

    def _check_stmt(self, stmt: ast.Stmt, body_level: bool = False) -> None:
        if isinstance(stmt, ast.VarDecl):
            if stmt.init is not None:
                init_ty = self._check_rhs(stmt.init)
                decl_ty = _value_type_from_node(stmt.type, self.enums)
                if init_ty != decl_ty:
                    raise TypeCheckError(
                        f"initializer has type {init_ty}, variable is {decl_ty}", stmt.pos
                    )
            self._declare(stmt, body_level)
        elif isinstance(stmt, ast.Assign):
            binding = self._lookup(stmt.name, stmt.pos)
            if not isinstance(binding, LocalVar):
                raise TypeCheckError(f"'{stmt.name}' is not an assignable variable", stmt.pos)
            value_ty = self._check_rhs(stmt.value)
            if value_ty != binding.type:
                raise TypeCheckError(
                    f"cannot assign {value_ty} to '{stmt.name}' of type {binding.type}",
                    stmt.pos,
                )
            self.info.assign_slots[id(stmt)] = binding.slot
        elif isinstance(stmt, ast.Send):
            chan = self._check_channel(stmt.channel)
            if len(stmt.values) != len(chan.payload):
                raise ArityError(
                    f"send carries {len(stmt.values)} values, channel payload has "
                    f"{len(chan.payload)}",
                    stmt.pos,
                )
            for value, expected in zip(stmt.values, chan.payload):
                got = self._check_expr(value)
                if got != expected:
                    raise TypeCheckError(
                        f"cannot send {got} on a channel of {expected}", value.pos
                    )
        elif isinstance(stmt, ast.Recv):
            chan = self._check_channel(stmt.channel)
            self.info.target_slots[id(stmt)] = self._check_targets(
                stmt.targets, chan, stmt.pos
            )
        elif isinstance(stmt, ast.Peek):
            chan = self._check_channel(stmt.channel)
            if not chan.is_buffered:
                raise TypeCheckError("peek needs a buffered channel", stmt.pos)
            self.info.target_slots[id(stmt)] = self._check_targets(
                stmt.targets, chan, stmt.pos
            )
        elif isinstance(stmt, ast.If):
            if isinstance(stmt.cond, ast.RecvExpr):
                self._check_recv_expr(stmt.cond)
            else:
                cond_ty = self._check_expr(stmt.cond)
                if cond_ty != BOOL:
                    raise TypeCheckError(f"if condition must be bool, got {cond_ty}", stmt.pos)
            self._check_block(stmt.then)
            if stmt.els is not None:
                self._check_block(stmt.els)
        elif isinstance(stmt, ast.For):
            iter_ty = self._check_expr(stmt.iterable)
            if not isinstance(iter_ty, ChannelArrayType):
                raise TypeCheckError(
                    f"for iterates over a channel array, got {iter_ty}", stmt.pos
                )
            self.scopes.append({stmt.var: LoopChannel(for_id=id(stmt), type=iter_ty.elem)})
            self._check_block(stmt.body)
            self.scopes.pop()
        elif isinstance(stmt, ast.Choice):
            for block in stmt.blocks:
                self._check_block(block)
        elif isinstance(stmt, ast.ExprStmt):
            self._check_expr(stmt.expr)
        else:
            raise TypeCheckError(f"unsupported statement {stmt!r}", stmt.pos)

    def _check_targets(
        self, targets: tuple[str, ...], chan: ChannelType, pos: Pos
    ) -> tuple[int, ...]:
        if len(targets) != len(chan.payload):
            raise ArityError(
                f"{len(targets)} receive targets for a payload of {len(chan.payload)}", pos
            )
        slots = []
        for name, expected in zip(targets, chan.payload):
            binding = self._lookup(name, pos)
            if not isinstance(binding, LocalVar):
                raise TypeCheckError(f"receive target '{name}' is not a variable", pos)
            if binding.type != expected:
                raise TypeCheckError(
                    f"receive target '{name}' has type {binding.type}, payload is {expected}",
                    pos,
                )
            slots.append(binding.slot)
        return tuple(slots)

    def _check_rhs(self, expr: ast.Expr) -> ValueType:
        if isinstance(expr, ast.RecvExpr):
            return self._check_recv_expr(expr)
        ty = self._check_expr(expr)
        if not isinstance(ty, (BoolType, EnumType)):
            raise TypeCheckError(f"expected a value, got {ty}", expr.pos)
        return ty

    def _check_recv_expr(self, expr: ast.RecvExpr) -> ValueType:
        chan = self._check_channel(expr.channel)
        self.info.target_slots[id(expr)] = self._check_targets(
            expr.targets, chan, expr.pos
        )
        self.info.expr_types[id(expr)] = BOOL
        return BOOL

    def _check_channel(self, expr: ast.Expr) -> ChannelType:
        ty = self._check_expr(expr)
        if not isinstance(ty, ChannelType):
            raise TypeCheckError(f"expected a channel, got {ty}", expr.pos)
        return ty

    # -- expressions

    def _check_expr(self, expr: ast.Expr):
        ty = self._expr_type(expr)
        self.info.expr_types[id(expr)] = ty
        return ty

    def _expr_type(self, expr: ast.Expr):
        if isinstance(expr, ast.BoolLit):
            return BOOL
        if isinstance(expr, ast.Name):
            binding = self._lookup(expr.ident, expr.pos)
            self.info.resolutions[id(expr)] = binding
            if isinstance(binding, (LocalVar, ValueParam, EnumConst)):
                return binding.type
            if isinstance(binding, (ChannelParam, LoopChannel)):
                return binding.type
            return binding.type  # ChannelArrayParam
        if isinstance(expr, ast.Qualified):
            raise TypeCheckError(
                "instance-qualified names are only valid in ltl specs", expr.pos
            )
        if isinstance(expr, ast.Temporal):
            raise TypeCheckError("temporal operators are only valid in ltl specs", expr.pos)
        if isinstance(expr, ast.RecvExpr):
            raise TypeCheckError(
                f"{expr.form} may only appear as the right-hand side of an "
                "assignment or as an if condition",
                expr.pos,
            )
        if isinstance(expr, ast.ArrayLit):
            raise TypeCheckError(
                "array literals are only valid as process-instantiation arguments", expr.pos
            )
        if isinstance(expr, ast.Unary):
            sub = self._check_expr(expr.operand)
            if sub != BOOL:
                raise TypeCheckError(f"'!' needs a bool operand, got {sub}", expr.pos)
            return BOOL
        if isinstance(expr, ast.Binary):
            left = self._check_expr(expr.left)
            right = self._check_expr(expr.right)
            if expr.op in ("&&", "||", "->"):
                if left != BOOL or right != BOOL:
                    raise TypeCheckError(
                        f"'{expr.op}' needs bool operands, got {left} and {right}", expr.pos
                    )
                return BOOL
            # == / !=
            if not isinstance(left, (BoolType, EnumType)):
                raise TypeCheckError(f"cannot compare values of type {left}", expr.pos)
            if left != right:
                raise TypeCheckError(f"cannot compare {left} with {right}", expr.pos)
            return BOOL
        raise TypeCheckError(f"unsupported expression {expr!r}", expr.pos)


# ---------------------------------------------------------------------------
# Model-level checking


def resolve_and_check(model: ast.ModelAST) -> CheckedModel:
    """Resolve every identifier and type-check templates, init-block and specs."""
    enums: dict[str, EnumType] = {}
    constructors: dict[str, EnumType] = {}
    for decl in model.data_decls:
        if decl.name in enums:
            raise NameResolutionError(f"duplicate data type '{decl.name}'", decl.pos)
        seen: set[str] = set()
        for ctor in decl.constructors:
            if ctor in seen or ctor in constructors:
                raise NameResolutionError(
                    f"duplicate constructor '{ctor}' (constructor names are global)",
                    decl.pos,
                )
            seen.add(ctor)
        enum = EnumType(name=decl.name, constructors=decl.constructors)
        enums[decl.name] = enum
        for ctor in decl.constructors:
            constructors[ctor] = enum

    templates: dict[str, TemplateInfo] = {}
    for tmpl in model.proc_decls:
        if tmpl.name in templates:
            raise NameResolutionError(f"duplicate process template '{tmpl.name}'", tmpl.pos)
        templates[tmpl.name] = _TemplateChecker(tmpl, enums, constructors).check()

    checked = CheckedModel(
        ast=model, enums=enums, constructors=constructors, templates=templates
    )
    _check_init_block(checked)
    for spec in model.ltl_specs:
        _check_ltl(checked, spec)
    return checked


def _channel_entries(model: ast.ModelAST) -> dict[str, ast.InitEntry]:
    return {e.name: e for e in model.init_block if not e.is_process}


def _check_init_block(checked: CheckedModel) -> None:
    model = checked.ast
    names: set[str] = set()
    for entry in model.init_block:
        if entry.name in names:
            raise NameResolutionError(f"duplicate instance name '{entry.name}'", entry.pos)
        names.add(entry.name)

    chan_types: dict[str, ChannelType] = {}
    for name, entry in _channel_entries(model).items():
        chan_types[name] = _chan_type_from_node(entry.payload.type, checked.enums)

    for entry in model.init_block:
        if not entry.is_process:
            continue
        inst = entry.payload
        if inst.template not in checked.templates:
            raise NameResolutionError(
                f"unknown process template '{inst.template}'", entry.pos
            )
        info = checked.templates[inst.template]
        params = list(info.template.params)
        if len(inst.args) != len(params):
            raise ArityError(
                f"'{inst.template}' takes {len(params)} arguments, got {len(inst.args)}",
                entry.pos,
            )
        for arg, param in zip(inst.args, params):
            binding = info.params[param.name]
            _check_init_arg(checked, chan_types, arg, binding, entry.pos)


def _require_channel_name(
    chan_types: dict[str, ChannelType], arg: ast.Expr, expected: ChannelType
) -> str:
    if not isinstance(arg, ast.Name) or arg.ident not in chan_types:
        raise TypeCheckError("expected the name of a declared channel", arg.pos)
    actual = chan_types[arg.ident]
    if actual != expected:
        raise TypeCheckError(
            f"channel '{arg.ident}' has type {actual}, parameter needs {expected}", arg.pos
        )
    return arg.ident


def _check_init_arg(
    checked: CheckedModel,
    chan_types: dict[str, ChannelType],
    arg: ast.Expr,
    binding: Binding,
    pos: Pos,
) -> None:
    if isinstance(binding, ChannelParam):
        _require_channel_name(chan_types, arg, binding.type)
    elif isinstance(binding, ChannelArrayParam):
        if not isinstance(arg, ast.ArrayLit):
            raise TypeCheckError(
                "expected an array literal of channel names", getattr(arg, "pos", pos)
            )
        for elem in arg.elements:
            _require_channel_name(chan_types, elem, binding.type.elem)
    elif isinstance(binding, ValueParam):
        value_ty = _const_expr_type(checked, arg)
        if value_ty != binding.type:
            raise TypeCheckError(
                f"argument has type {value_ty}, parameter needs {binding.type}", arg.pos
            )
    else:  # pragma: no cover - params are always one of the above
        raise TypeCheckError("unsupported parameter kind", pos)


def _const_expr_type(checked: CheckedModel, arg: ast.Expr) -> ValueType:
    if isinstance(arg, ast.BoolLit):
        return BOOL
    if isinstance(arg, ast.Name) and arg.ident in checked.constructors:
        return checked.constructors[arg.ident]
    raise TypeCheckError(
        "value arguments must be literals or enum constructors", arg.pos
    )


def _const_expr_value(checked: CheckedModel, arg: ast.Expr) -> Value:
    if isinstance(arg, ast.BoolLit):
        return arg.value
    assert isinstance(arg, ast.Name)
    return arg.ident


def _check_ltl(checked: CheckedModel, spec: ast.LtlSpec) -> None:
    ty = _ltl_expr_type(checked, spec.formula)
    if ty != BOOL:
        raise TypeCheckError(f"ltl formula must be bool, got {ty}", spec.pos)


def _process_entries(model: ast.ModelAST) -> dict[str, ast.InitEntry]:
    return {e.name: e for e in model.init_block if e.is_process}


def _ltl_atom_type(checked: CheckedModel, expr: ast.Qualified) -> ValueType:
    entry = _process_entries(checked.ast).get(expr.instance)
    if entry is None:
        raise NameResolutionError(
            f"ltl atom references unknown process instance '{expr.instance}'", expr.pos
        )
    info = checked.templates[entry.payload.template]
    if expr.variable not in info.body_level:
        raise NameResolutionError(
            f"process '{expr.instance}' has no top-level variable '{expr.variable}'",
            expr.pos,
        )
    return info.slots[info.body_level[expr.variable]].type


def _ltl_expr_type(checked: CheckedModel, expr: ast.Expr):
    if isinstance(expr, ast.BoolLit):
        return BOOL
    if isinstance(expr, ast.Qualified):
        return _ltl_atom_type(checked, expr)
    if isinstance(expr, ast.Name):
        if expr.ident in checked.constructors:
            return checked.constructors[expr.ident]
        raise NameResolutionError(
            f"ltl atoms must be instance-qualified variables or constants; "
            f"unknown name '{expr.ident}'",
            expr.pos,
        )
    if isinstance(expr, ast.Temporal):
        sub = _ltl_expr_type(checked, expr.operand)
        if sub != BOOL:
            raise TypeCheckError(f"'{expr.op}' needs a bool formula, got {sub}", expr.pos)
        return BOOL
    if isinstance(expr, ast.Unary):
        sub = _ltl_expr_type(checked, expr.operand)
        if sub != BOOL:
            raise TypeCheckError(f"'!' needs a bool operand, got {sub}", expr.pos)
        return BOOL
    if isinstance(expr, ast.Binary):
        left = _ltl_expr_type(checked, expr.left)
        right = _ltl_expr_type(checked, expr.right)
        if expr.op in ("&&", "||", "->"):
            if left != BOOL or right != BOOL:
                raise TypeCheckError(
                    f"'{expr.op}' needs bool operands, got {left} and {right}", expr.pos
                )
            return BOOL
        if not isinstance(left, (BoolType, EnumType)) or left != right:
            raise TypeCheckError(f"cannot compare {left} with {right}", expr.pos)
        return BOOL
    raise TypeCheckError("unsupported expression in ltl formula", getattr(expr, "pos", Pos(0, 0)))


# ---------------------------------------------------------------------------
# Instantiation


def instantiate(checked: CheckedModel) -> SystemInstance:
    """Close the init-block into concrete channels, processes and specs."""
    model = checked.ast
    channels: list[ChannelDecl] = []
    chan_index: dict[str, int] = {}
    for entry in model.init_block:
        if entry.is_process:
            continue
        ty = _chan_type_from_node(entry.payload.type, checked.enums)
        chan_index[entry.name] = len(channels)
        channels.append(
            ChannelDecl(name=entry.name, type=ty, drop_fault="drop" in entry.markers)
        )

    processes: list[ProcessDecl] = []
    proc_index: dict[str, int] = {}
    for entry in model.init_block:
        if not entry.is_process:
            continue
        inst = entry.payload
        info = checked.templates[inst.template]
        chan_bindings: dict[str, int | tuple[int, ...]] = {}
        const_bindings: dict[str, Value] = {}
        for arg, param in zip(inst.args, info.template.params):
            binding = info.params[param.name]
            if isinstance(binding, ChannelParam):
                chan_bindings[param.name] = chan_index[arg.ident]
            elif isinstance(binding, ChannelArrayParam):
                chan_bindings[param.name] = tuple(
                    chan_index[e.ident] for e in arg.elements
                )
            else:
                const_bindings[param.name] = _const_expr_value(checked, arg)
        proc_index[entry.name] = len(processes)
        processes.append(
            ProcessDecl(
                name=entry.name,
                template=inst.template,
                chan_bindings=chan_bindings,
                const_bindings=const_bindings,
                shutdown_fault="shutdown" in entry.markers,
            )
        )

    specs = tuple(
        ResolvedSpec(
            formula=_resolve_ltl(checked, proc_index, spec.formula),
            text=_render_ltl(spec.formula),
        )
        for spec in model.ltl_specs
    )
    return SystemInstance(
        channels=tuple(channels),
        processes=tuple(processes),
        ltl_specs=specs,
        checked=checked,
    )


def _render_ltl(expr: ast.Expr) -> str:
    from .pretty import print_expr

    return print_expr(expr)


def _resolve_ltl(
    checked: CheckedModel, proc_index: dict[str, int], expr: ast.Expr
) -> Prop:
    if isinstance(expr, ast.BoolLit):
        return PBool(expr.value)
    if isinstance(expr, ast.Qualified):
        entry = _process_entries(checked.ast)[expr.instance]
        info = checked.templates[entry.payload.template]
        slot = info.body_level[expr.variable]
        return PAtom(
            proc=proc_index[expr.instance],
            slot=slot,
            proc_name=expr.instance,
            var_name=expr.variable,
            type=info.slots[slot].type,
        )
    if isinstance(expr, ast.Name):
        return PEnum(expr.ident)
    if isinstance(expr, ast.Temporal):
        return PTemporal(op=expr.op, sub=_resolve_ltl(checked, proc_index, expr.operand))
    if isinstance(expr, ast.Unary):
        return PNot(_resolve_ltl(checked, proc_index, expr.operand))
    assert isinstance(expr, ast.Binary)
    return PBin(
        op=expr.op,
        left=_resolve_ltl(checked, proc_index, expr.left),
        right=_resolve_ltl(checked, proc_index, expr.right),
    )
