"""Line-oriented text formats for LTSs, glue operators/expressions and SOS operators.

LTS::

    lts B1
    ports p q
    states 1 2 3
    trans 1 p 2

Glue (several ``glue`` blocks plus an ``expr`` line make an expression file)::

    glue G
    component 1 ports p q
    component 2 ports r
    interactions p; q; r; q,r
    priority q < r
    mode classical

SOS operator::

    operator O
    component 1 ports p q
    rule p neg 2:r

Component indices are 1-based in text and 0-based in the API.
"""

import re
from dataclasses import dataclass

from .glue import MODES, GlueOperator, Node, PriorityModel, Var
from .lts import (PORT_RE, Lts, LtsError, fmt_interaction, interaction_key, sorted_states,
                  state_name)
from .sos import SosOperator, SosRule

TOKEN_RE = re.compile(r"\S+")


class FormatError(ValueError):
    def __init__(self, msg, line=None, col=None, path=None):
        self.msg, self.line, self.col, self.path = msg, line, col, path
        super().__init__(self.location() + msg)

    def location(self):
        where = self.path or "<input>"
        if self.line is None:
            return f"{where}: "
        if self.col is None:
            return f"{where}:{self.line}: "
        return f"{where}:{self.line}:{self.col}: "


class ParseError(FormatError):
    """Malformed text."""


class FormatValidationError(FormatError):
    """Well-formed text describing an invalid object."""


@dataclass
class Tok:
    text: str
    line: int
    col: int


def _lines(text):
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [Tok(m.group(), n, m.start() + 1) for m in TOKEN_RE.finditer(body)]
        if toks:
            yield n, toks


def _port(tok: Tok):
    if not PORT_RE.match(tok.text):
        raise ParseError(f"bad port name {tok.text!r}", tok.line, tok.col)
    return tok.text


def _interaction(tok: Tok):
    names = tok.text.split(",")
    if not tok.text or any(not n or not PORT_RE.match(n) for n in names):
        raise ParseError(f"bad interaction {tok.text!r}", tok.line, tok.col)
    return frozenset(names)


def _index(tok: Tok):
    if not tok.text.isdigit() or int(tok.text) < 1:
        raise ParseError(f"expected a component number, got {tok.text!r}", tok.line, tok.col)
    return int(tok.text)


def _expect(toks, count, usage):
    if len(toks) != count:
        t = toks[min(len(toks), count) - 1] if toks else None
        raise ParseError(f"usage: {usage}", t.line if t else None, t.col if t else None)


# -- LTS -----------------------------------------------------------------------

def _located(parse):
    def wrapper(text, path=None):
        try:
            return parse(text, path)
        except FormatError as e:
            e.path = e.path or path
            e.args = (e.location() + e.msg,)
            raise
    wrapper.__name__, wrapper.__doc__ = parse.__name__, parse.__doc__
    return wrapper


@_located
def parse_lts(text: str, path=None) -> Lts:
    name, ports, states, trans = "", [], [], []
    for n, toks in _lines(text):
        head, args = toks[0].text, toks[1:]
        if head == "lts":
            _expect(toks, 2, "lts <name>")
            name = args[0].text
        elif head == "ports":
            ports.extend(_port(t) for t in args)
        elif head == "states":
            states.extend(t.text for t in args)
        elif head == "trans":
            _expect(toks, 4, "trans <src> <p1,p2,...> <dst>")
            trans.append((args[0], _interaction(args[1]), args[1], args[2]))
        else:
            raise ParseError(f"unknown directive {head!r}", n, 1)
    declared = set(states)
    for src, a, label, dst in trans:
        for t in (src, dst):
            if t.text not in declared:
                raise FormatValidationError(f"undeclared state {t.text!r}", t.line, t.col)
        missing = sorted(a - set(ports))
        if missing:
            raise FormatValidationError(f"undeclared port {missing[0]!r}",
                                        label.line, label.col)
    try:
        return Lts(states, ports, [(s.text, a, t.text) for s, a, _, t in trans], name=name)
    except LtsError as e:
        raise FormatValidationError(str(e))


def dump_lts(lts: Lts) -> str:
    out = [f"lts {lts.name or 'B'}",
           "ports " + " ".join(sorted(lts.ports)),
           "states " + " ".join(state_name(q) for q in sorted_states(lts.states))]
    for s, a, t in lts.sorted_transitions():
        out.append(f"trans {state_name(s)} {fmt_interaction(a)} {state_name(t)}")
    return "\n".join(out) + "\n"


# -- components shared by glue and operator files --------------------------------

def _component(toks, components):
    if len(toks) < 3 or toks[2].text != "ports":
        raise ParseError("usage: component <i> ports <p> ...", toks[0].line, toks[0].col)
    i = _index(toks[1])
    if i in components:
        raise FormatValidationError(f"component {i} declared twice", toks[1].line, toks[1].col)
    components[i] = frozenset(_port(t) for t in toks[3:])


def _partition(components, line):
    n = len(components)
    if sorted(components) != list(range(1, n + 1)):
        raise FormatValidationError("components must be numbered 1.." + str(n), line)
    return tuple(components[i] for i in range(1, n + 1))


def _dump_components(partition):
    return [f"component {i} ports " + " ".join(sorted(p)) if p else f"component {i} ports"
            for i, p in enumerate(partition, start=1)]


# -- glue ------------------------------------------------------------------------

class _GlueBlock:
    def __init__(self, name, line):
        self.name, self.line = name, line
        self.components, self.gamma, self.pairs, self.mode = {}, [], [], "classical"

    def build(self):
        partition = _partition(self.components, self.line)
        return GlueOperator(partition, frozenset(self.gamma),
                            PriorityModel(frozenset(self.pairs), self.mode), name=self.name)


def _glue_directive(block, toks):
    head = toks[0].text
    if head == "component":
        _component(toks, block.components)
    elif head == "interactions":
        rest = " ".join(t.text for t in toks[1:])
        col = toks[1].col if len(toks) > 1 else toks[0].col
        for chunk in rest.split(";"):
            chunk = chunk.strip()
            if chunk:
                if " " in chunk:
                    raise ParseError("interactions are separated by ';' and written "
                                     "without spaces", toks[0].line, col)
                block.gamma.append(_interaction(Tok(chunk, toks[0].line, col)))
    elif head == "priority":
        _expect(toks, 4, "priority <a> < <b>")
        if toks[2].text != "<":
            raise ParseError("expected '<'", toks[2].line, toks[2].col)
        block.pairs.append((_interaction(toks[1]), _interaction(toks[3])))
    elif head == "mode":
        _expect(toks, 2, "mode classical|relaxed|simultaneous")
        if toks[1].text not in MODES:
            raise ParseError(f"unknown mode {toks[1].text!r}", toks[1].line, toks[1].col)
        block.mode = toks[1].text
    else:
        return False
    return True


@_located
def parse_glue_file(text: str, path=None):
    """Glue blocks (by name, in order) and the optional expression."""
    blocks, expr_tok, current = [], None, None
    for n, toks in _lines(text):
        head = toks[0].text
        if head == "glue":
            _expect(toks, 2, "glue <name>")
            current = _GlueBlock(toks[1].text, n)
            if any(b.name == current.name for b in blocks):
                raise FormatValidationError(f"glue {current.name} defined twice", n)
            blocks.append(current)
        elif head == "expr":
            if expr_tok is not None:
                raise ParseError("only one expr line allowed", n, 1)
            expr_tok = (toks[0].line, " ".join(t.text for t in toks[1:]), toks)
        elif current is None and head in ("component", "interactions", "priority", "mode"):
            current = _GlueBlock("", n)
            blocks.append(current)
            _glue_directive(current, toks)
        elif current is None or not _glue_directive(current, toks):
            raise ParseError(f"unknown directive {head!r}", n, 1)
    glues = {b.name: b.build() for b in blocks}
    expr = _parse_expr(expr_tok, glues) if expr_tok else None
    return glues, expr


def parse_glue(text: str, path=None) -> GlueOperator:
    glues, expr = parse_glue_file(text, path)
    if len(glues) != 1 or expr is not None:
        raise FormatValidationError("expected exactly one glue block", path=path)
    return next(iter(glues.values()))


def parse_expression(text: str, path=None):
    glues, expr = parse_glue_file(text, path)
    if expr is None:
        if len(glues) == 1:
            op = next(iter(glues.values()))
            return Node(op, tuple(Var(f"Z{i + 1}") for i in range(op.arity)))
        raise FormatValidationError("missing expr line", path=path)
    return expr


def _parse_expr(expr_tok, glues):
    line, text, toks = expr_tok
    col0 = toks[1].col if len(toks) > 1 else 1
    atoms = [(m.group(), col0 + m.start()) for m in re.finditer(r"\(|\)|[^\s()]+", text)]
    pos = 0
    used = set()

    def atom():
        nonlocal pos
        if pos >= len(atoms):
            raise ParseError("unexpected end of expression", line)
        tok, col = atoms[pos]
        pos += 1
        if tok == "(":
            if pos >= len(atoms):
                raise ParseError("unexpected end of expression", line, col)
            name, ncol = atoms[pos]
            pos += 1
            if name not in glues:
                raise FormatValidationError(f"unknown glue {name!r}", line, ncol)
            if name in used:
                raise FormatValidationError(f"glue {name!r} used twice", line, ncol)
            used.add(name)
            children = []
            while pos < len(atoms) and atoms[pos][0] != ")":
                children.append(atom())
            if pos >= len(atoms):
                raise ParseError("missing ')'", line, col)
            pos += 1
            return Node(glues[name], tuple(children))
        if tok == ")":
            raise ParseError("unexpected ')'", line, col)
        if tok in glues:
            raise FormatValidationError(f"glue {tok!r} must be applied in parentheses",
                                        line, col)
        return Var(tok)

    expr = atom()
    if pos != len(atoms):
        raise ParseError("trailing tokens after expression", line, atoms[pos][1])
    return expr


def _dump_glue_block(op: GlueOperator, name=None):
    out = [f"glue {name or op.name or 'G'}"]
    out += _dump_components(op.partition)
    gamma = sorted(op.gamma, key=interaction_key)
    out.append("interactions " + "; ".join(fmt_interaction(a) for a in gamma)
               if gamma else "interactions")
    for a, b in sorted(op.pi.pairs, key=lambda p: (interaction_key(p[0]),
                                                   interaction_key(p[1]))):
        out.append(f"priority {fmt_interaction(a)} < {fmt_interaction(b)}")
    out.append(f"mode {op.mode}")
    return out


def dump_glue(op: GlueOperator) -> str:
    return "\n".join(_dump_glue_block(op)) + "\n"


def dump_expression(expr) -> str:
    """Node definitions, innermost first, then the ``expr`` line."""
    if isinstance(expr, Var):
        return f"expr {expr.name}\n"
    out = []
    names = {}
    for k, node in enumerate(expr.nodes()):
        name = node.op.name or f"G{k + 1}"
        while name in names.values():
            name += "_"
        names[id(node)] = name
        out += _dump_glue_block(node.op, name)
        out.append("")

    def render(e):
        if isinstance(e, Var):
            return e.name
        return "(" + " ".join([names[id(e)]] + [render(c) for c in e.children]) + ")"

    out.append("expr " + render(expr))
    return "\n".join(out) + "\n"


# -- SOS operators ---------------------------------------------------------------

@_located
def parse_operator(text: str, path=None) -> SosOperator:
    name, components, rules, first = "", {}, [], None
    for n, toks in _lines(text):
        head = toks[0].text
        first = first or n
        if head == "operator":
            _expect(toks, 2, "operator <name>")
            name = toks[1].text
        elif head == "component":
            _component(toks, components)
        elif head == "rule":
            rules.append(_rule(toks))
        else:
            raise ParseError(f"unknown directive {head!r}", n, 1)
    partition = _partition(components, first)
    for rule, toks in rules:
        for j, b in rule.negative:
            if j >= len(partition):
                raise FormatValidationError(f"premise on unknown component {j + 1}",
                                            toks[0].line)
    return SosOperator(partition, tuple(r for r, _ in rules), name=name)


def _rule(toks):
    if len(toks) < 2:
        raise ParseError("usage: rule <a> [neg <j>:<b> ...]", toks[0].line, toks[0].col)
    label = _interaction(toks[1])
    rest = toks[2:]
    if rest and rest[0].text != "neg":
        raise ParseError("expected 'neg'", rest[0].line, rest[0].col)
    if rest and len(rest) == 1:
        raise ParseError("'neg' needs at least one premise", rest[0].line, rest[0].col)
    premises = []
    for t in rest[1:]:
        j, sep, b = t.text.partition(":")
        if not sep:
            raise ParseError(f"premise {t.text!r} is not <j>:<b>", t.line, t.col)
        idx = _index(Tok(j, t.line, t.col))
        premises.append((idx - 1, _interaction(Tok(b, t.line, t.col + len(j) + 1))))
    return SosRule(label, frozenset(premises)), toks


def dump_operator(op: SosOperator) -> str:
    out = [f"operator {op.name or 'O'}"]
    out += _dump_components(op.partition)
    out += [f"rule {r}" for r in op.rules]
    return "\n".join(out) + "\n"
