"""Surface parser, desugarer and printer for the object language.

The surface syntax is a small Java-like statement language::

    class Node extends Object {
        Node next;
        Node last() {
            Node n = this.next;
            Node z = null;
            emit step;
            if (n == z) { return this; } else { return n.last(); }
        }
    }

Statement sequences desugar into let chains with fresh ``$``-variables,
locals into lets, and ``return e;`` simply ends the chain.  Allocation sites
may carry an explicit label (``new[l1] Node()``); unlabeled sites get
``file:line:col``.  Receiver annotations on calls and field accesses are
filled in from the declared static types during parsing.

``print_program`` renders a parsed program back to surface text such that
reparsing yields an equal Program.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, NamedTuple

from .fjast import (
    NULL_TYPE,
    OBJECT,
    Call,
    Cast,
    ClassDecl,
    Emit,
    Expr,
    FieldDecl,
    FjError,
    GetField,
    If,
    Let,
    MethodDecl,
    New,
    Null,
    Param,
    Pos,
    Program,
    SetField,
    Throw,
    TryCatch,
    Var,
)
from . import fjtypes

_KEYWORDS = {
    "class",
    "extends",
    "emit",
    "return",
    "if",
    "else",
    "throw",
    "try",
    "catch",
    "new",
    "null",
}

_PUNCT = ("==", "{", "}", "(", ")", "[", "]", ";", ",", ".", "=")


class Token(NamedTuple):
    kind: str  # "id", "punct", "label", "eof"
    val: str
    line: int
    col: int

    @property
    def pos(self) -> Pos:
        return Pos(self.line, self.col)


def _lex(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if c == "[":
            # labels may contain ':' and '.', so scan the bracket raw
            j = text.find("]", i)
            if j < 0:
                raise FjError("unterminated '['", Pos(line, col))
            inner = text[i + 1 : j].strip()
            toks.append(Token("punct", "[", line, col))
            if inner:
                toks.append(Token("label", inner, line, col + 1))
            toks.append(Token("punct", "]", line, col + (j - i)))
            col += j - i + 1
            i = j + 1
            continue
        matched = False
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                matched = True
                break
        if matched:
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("id", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise FjError(f"unexpected character {c!r}", Pos(line, col))
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parsing to raw (unannotated) syntax
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, toks: list[Token], filename: str):
        self.toks = toks
        self.i = 0
        self.filename = filename

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, val: str) -> Token:
        t = self.advance()
        if t.val != val:
            raise FjError(f"expected {val!r}, found {t.val or 'end of input'!r}", t.pos)
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.advance()
        if t.kind != "id" or t.val in _KEYWORDS:
            raise FjError(f"expected {what}, found {t.val or 'end of input'!r}", t.pos)
        return t

    # -- declarations -------------------------------------------------------

    def program(self) -> list[ClassDecl]:
        classes = []
        while self.peek().kind != "eof":
            classes.append(self.class_decl())
        return classes

    def class_decl(self) -> ClassDecl:
        kw = self.expect("class")
        name = self.ident("class name")
        parent = OBJECT
        if self.peek().val == "extends":
            self.advance()
            parent = self.ident("superclass name").val
        self.expect("{")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        while self.peek().val != "}":
            fields_or_method = self.member()
            if isinstance(fields_or_method, FieldDecl):
                fields.append(fields_or_method)
            else:
                methods.append(fields_or_method)
        self.expect("}")
        return ClassDecl(name.val, parent, tuple(fields), tuple(methods), pos=kw.pos)

    def member(self) -> FieldDecl | MethodDecl:
        cls = self.ident("member class")
        name = self.ident("member name")
        if self.peek().val == ";":
            self.advance()
            return FieldDecl(cls.val, name.val, pos=name.pos)
        self.expect("(")
        params: list[Param] = []
        if self.peek().val != ")":
            while True:
                pc = self.ident("parameter class")
                pn = self.ident("parameter name")
                params.append(Param(pc.val, pn.val))
                if self.peek().val != ",":
                    break
                self.advance()
        self.expect(")")
        body = self.block()
        return MethodDecl(cls.val, name.val, tuple(params), _desugar(body), pos=name.pos)

    # -- statements ---------------------------------------------------------

    def block(self) -> list[tuple]:
        self.expect("{")
        stmts = []
        while self.peek().val != "}":
            stmts.append(self.stmt())
        self.expect("}")
        return stmts

    def stmt(self) -> tuple:
        t = self.peek()
        if t.val == "emit":
            self.advance()
            ev = self.ident("event name")
            self.expect(";")
            return ("emit", ev.val, t.pos)
        if t.val == "return":
            self.advance()
            e = self.expr()
            self.expect(";")
            return ("return", e, t.pos)
        if t.val == "if":
            self.advance()
            self.expect("(")
            left = self.ident("variable")
            self.expect("==")
            right = self.ident("variable")
            self.expect(")")
            then = self.block()
            self.expect("else")
            els = self.block()
            return ("if", left.val, right.val, then, els, t.pos)
        if t.val == "throw":
            self.advance()
            e = self.expr()
            self.expect(";")
            return ("throw", e, t.pos)
        if t.val == "try":
            self.advance()
            body = self.block()
            self.expect("catch")
            self.expect("(")
            ec = self.ident("exception class")
            ev = self.ident("variable")
            self.expect(")")
            handler = self.block()
            return ("try", body, ec.val, ev.val, handler, t.pos)
        if t.kind == "id" and t.val not in _KEYWORDS and self.peek(1).kind == "id":
            cls = self.ident("class")
            var = self.ident("variable")
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return ("local", cls.val, var.val, e, t.pos)
        e = self.expr()
        self.expect(";")
        return ("expr", e, t.pos)

    # -- expressions --------------------------------------------------------

    def expr(self) -> Expr:
        t = self.peek()
        if t.val == "null":
            self.advance()
            return Null(pos=t.pos)
        if t.val == "new":
            self.advance()
            label = None
            if self.peek().val == "[":
                self.advance()
                lt = self.advance()
                if lt.kind != "label":
                    raise FjError("expected a label inside [ ]", lt.pos)
                label = lt.val
                self.expect("]")
            cls = self.ident("class name")
            self.expect("(")
            self.expect(")")
            if label is None:
                label = f"{self.filename}:{t.line}:{t.col}"
            return New(cls.val, label, pos=t.pos)
        if t.val == "(":
            self.advance()
            cls = self.ident("cast class")
            self.expect(")")
            inner = self.expr()
            return Cast(cls.val, inner, pos=t.pos)
        recv = self.ident("variable")
        if self.peek().val != ".":
            return Var(recv.val, pos=recv.pos)
        self.advance()
        member = self.ident("member name")
        if self.peek().val == "(":
            self.advance()
            args = []
            if self.peek().val != ")":
                while True:
                    args.append(self.ident("argument variable").val)
                    if self.peek().val != ",":
                        break
                    self.advance()
            self.expect(")")
            return Call(recv.val, "", member.val, tuple(args), pos=t.pos)
        if self.peek().val == "=":
            self.advance()
            value = self.ident("variable")
            return SetField(recv.val, "", member.val, value.val, pos=t.pos)
        return GetField(recv.val, "", member.val, pos=t.pos)


def _desugar(stmts: list[tuple]) -> Expr:
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"$t{counter[0] - 1}"

    def go(items: list[tuple]) -> Expr:
        if not items:
            return Null()
        head, rest = items[0], items[1:]
        tag = head[0]
        if tag == "local":
            _, cls, var, e, pos = head
            return Let(var, cls, e, go(rest), pos=pos)
        if tag == "return":
            _, e, pos = head
            if rest:
                raise FjError("unreachable statements after return", rest[0][-1])
            return e
        if tag == "emit":
            _, ev, pos = head
            node: Expr = Emit(ev, pos=pos)
        elif tag == "if":
            _, left, right, then, els, pos = head
            node = If(left, right, go(then), go(els), pos=pos)
        elif tag == "throw":
            _, e, pos = head
            node = Throw(e, pos=pos)
        elif tag == "try":
            _, body, ec, ev, handler, pos = head
            node = TryCatch(go(body), ec, ev, go(handler), pos=pos)
        else:
            assert tag == "expr"
            _, node, pos = head
        if not rest:
            return node
        return Let(fresh(), None, node, go(rest), pos=pos)

    return go(stmts)


# ---------------------------------------------------------------------------
# Annotation pass: fill receiver static classes, validate names
# ---------------------------------------------------------------------------


def _annotate(prog: Program, env: dict[str, str], e: Expr, alphabet) -> tuple[Expr, str]:
    if isinstance(e, Var):
        if e.name not in env:
            raise FjError(f"unbound variable {e.name}", e.pos)
        return e, env[e.name]
    if isinstance(e, Null):
        return e, NULL_TYPE
    if isinstance(e, New):
        if e.cls not in prog.by_name:
            raise FjError(f"cannot allocate undeclared class {e.cls}", e.pos)
        return e, e.cls
    if isinstance(e, Emit):
        if alphabet is not None and e.event not in alphabet:
            raise FjError(f"event {e.event} is not in the declared alphabet", e.pos)
        return e, NULL_TYPE
    if isinstance(e, Cast):
        if e.cls != OBJECT and e.cls not in prog.by_name:
            raise FjError(f"unknown cast class {e.cls}", e.pos)
        inner, _ = _annotate(prog, env, e.expr, alphabet)
        return dataclasses.replace(e, expr=inner), e.cls
    if isinstance(e, Let):
        init, t1 = _annotate(prog, env, e.init, alphabet)
        bound = e.decl if e.decl is not None else t1
        if e.decl is not None and e.decl not in prog.by_name and e.decl != OBJECT:
            raise FjError(f"unknown class {e.decl}", e.pos)
        env2 = dict(env)
        env2[e.var] = bound
        body, t2 = _annotate(prog, env2, e.body, alphabet)
        return dataclasses.replace(e, init=init, body=body), t2
    if isinstance(e, If):
        for v in (e.left, e.right):
            if v not in env:
                raise FjError(f"unbound variable {v}", e.pos)
        then, t1 = _annotate(prog, env, e.then, alphabet)
        els, t2 = _annotate(prog, env, e.els, alphabet)
        return dataclasses.replace(e, then=then, els=els), fjtypes.lub(prog, t1, t2)
    if isinstance(e, Call):
        ann = _receiver_class(prog, env, e.recv, e.pos)
        try:
            md, _ = fjtypes.method_lookup(prog, ann, e.method)
        except FjError:
            raise FjError(f"no method {e.method} on {ann}", e.pos) from None
        for a in e.args:
            if a not in env:
                raise FjError(f"unbound variable {a}", e.pos)
        return dataclasses.replace(e, recv_cls=ann), md.result
    if isinstance(e, GetField):
        ann = _receiver_class(prog, env, e.recv, e.pos)
        fc = fjtypes.field_class(prog, ann, e.fname)
        if fc is None:
            raise FjError(f"no field {e.fname} on {ann}", e.pos)
        return dataclasses.replace(e, recv_cls=ann), fc
    if isinstance(e, SetField):
        ann = _receiver_class(prog, env, e.recv, e.pos)
        fc = fjtypes.field_class(prog, ann, e.fname)
        if fc is None:
            raise FjError(f"no field {e.fname} on {ann}", e.pos)
        if e.value not in env:
            raise FjError(f"unbound variable {e.value}", e.pos)
        return dataclasses.replace(e, recv_cls=ann), env[e.value]
    if isinstance(e, Throw):
        inner, _ = _annotate(prog, env, e.expr, alphabet)
        return dataclasses.replace(e, expr=inner), NULL_TYPE
    if isinstance(e, TryCatch):
        body, t1 = _annotate(prog, env, e.body, alphabet)
        if e.exc_cls not in prog.by_name and e.exc_cls != OBJECT:
            raise FjError(f"unknown exception class {e.exc_cls}", e.pos)
        env2 = dict(env)
        env2[e.var] = e.exc_cls
        handler, t2 = _annotate(prog, env2, e.handler, alphabet)
        return (
            dataclasses.replace(e, body=body, handler=handler),
            fjtypes.lub(prog, t1, t2),
        )
    raise AssertionError(f"unhandled expression {e!r}")


def _receiver_class(prog: Program, env: dict[str, str], recv: str, pos) -> str:
    if recv not in env:
        raise FjError(f"unbound variable {recv}", pos)
    ann = env[recv]
    if ann not in prog.by_name:
        raise FjError(f"receiver {recv} has type {ann}, which has no members", pos)
    return ann


def parse_program(
    text: str, filename: str = "<input>", alphabet: Iterable[str] | None = None
) -> Program:
    """Parse surface text into a Program with annotated, desugared bodies.

    When ``alphabet`` is given, every emitted event must belong to it.
    """
    return parse_programs([(text, filename)], alphabet)


def parse_programs(
    sources: Iterable[tuple[str, str]], alphabet: Iterable[str] | None = None
) -> Program:
    """Parse several (text, filename) units into one Program; classes may
    refer to classes from any unit."""
    raw_classes = []
    for text, filename in sources:
        raw_classes.extend(_Parser(_lex(text), filename).program())
    prelim = Program(raw_classes)
    alpha = frozenset(alphabet) if alphabet is not None else None
    final_classes = []
    for c in prelim.classes:
        methods = []
        for md in c.methods:
            env = fjtypes.method_env(prelim, c.name, md)
            for p in md.params:
                if p.cls != OBJECT and p.cls not in prelim.by_name:
                    raise FjError(f"unknown parameter class {p.cls}", md.pos)
            body, _ = _annotate(prelim, env, md.body, alpha)
            methods.append(dataclasses.replace(md, body=body))
        final_classes.append(dataclasses.replace(c, methods=tuple(methods)))
    return Program(final_classes)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def print_program(prog: Program) -> str:
    out: list[str] = []
    for c in prog.classes:
        ext = f" extends {c.parent}" if c.parent != OBJECT else ""
        out.append(f"class {c.name}{ext} {{")
        for f in c.fields:
            out.append(f"  {f.cls} {f.name};")
        for m in c.methods:
            params = ", ".join(f"{p.cls} {p.name}" for p in m.params)
            out.append(f"  {m.result} {m.name}({params}) {{")
            out.extend(_render_body(m.body, "    "))
            out.append("  }")
        out.append("}")
        out.append("")
    return "\n".join(out)


def _render_body(e: Expr, ind: str) -> list[str]:
    lines: list[str] = []
    while isinstance(e, Let):
        if e.decl is not None:
            lines.append(f"{ind}{e.decl} {e.var} = {_render_expr(e.init)};")
        else:
            lines.extend(_render_stmt(e.init, ind))
        e = e.body
    # final expression
    if isinstance(e, Null):
        lines.append(f"{ind}return null;")
    elif isinstance(e, (Emit, If, Throw, TryCatch)):
        lines.extend(_render_stmt(e, ind))
    else:
        lines.append(f"{ind}return {_render_expr(e)};")
    return lines


def _render_stmt(e: Expr, ind: str) -> list[str]:
    if isinstance(e, Emit):
        return [f"{ind}emit {e.event};"]
    if isinstance(e, If):
        out = [f"{ind}if ({e.left} == {e.right}) {{"]
        out.extend(_render_body(e.then, ind + "  "))
        out.append(f"{ind}}} else {{")
        out.extend(_render_body(e.els, ind + "  "))
        out.append(f"{ind}}}")
        return out
    if isinstance(e, Throw):
        return [f"{ind}throw {_render_expr(e.expr)};"]
    if isinstance(e, TryCatch):
        out = [f"{ind}try {{"]
        out.extend(_render_body(e.body, ind + "  "))
        out.append(f"{ind}}} catch ({e.exc_cls} {e.var}) {{")
        out.extend(_render_body(e.handler, ind + "  "))
        out.append(f"{ind}}}")
        return out
    return [f"{ind}{_render_expr(e)};"]


def _render_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Null):
        return "null"
    if isinstance(e, New):
        return f"new[{e.label}] {e.cls}()"
    if isinstance(e, Cast):
        return f"({e.cls}) {_render_expr(e.expr)}"
    if isinstance(e, Call):
        return f"{e.recv}.{e.method}({', '.join(e.args)})"
    if isinstance(e, GetField):
        return f"{e.recv}.{e.fname}"
    if isinstance(e, SetField):
        return f"{e.recv}.{e.fname} = {e.value}"
    raise ValueError(f"expression cannot be rendered inline: {e!r}")
