#!/usr/bin/env python3
# Copyright 2026 The KubeFence Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Standalone renderer for the chart template subset.

Usage: render_reference.py CHART_DIR [VALUES_FILE] [RELEASE_NAME]

Written independently of the C++ engine so the two can be diffed.
"""

import os
import re
import sys

import yaml


class S:
    __slots__ = ("kind", "text", "quoted")

    def __init__(self, kind, text, quoted=False):
        self.kind, self.text, self.quoted = kind, text, quoted


class Seq:
    __slots__ = ("items", "flow")

    def __init__(self, items, flow=False):
        self.items, self.flow = items, flow


class Map:
    __slots__ = ("entries", "flow")

    def __init__(self, entries, flow=False):
        self.entries, self.flow = entries, flow

    def get(self, key):
        for k, v in self.entries:
            if k == key:
                return v
        return None


NULL = "null"
BOOL = "bool"
INT = "int"
FLOAT = "float"
STR = "str"

_INT = re.compile(r"0o[0-7]+|0x[0-9a-fA-F]+|[-+]?[0-9]+")
_FLOAT = re.compile(r"[-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?")
_INF = {".inf", ".Inf", ".INF"}
_NAN = {".nan", ".NaN", ".NAN"}


def infer(s):
    if s in ("", "~", "null", "Null", "NULL"):
        return NULL
    if s in ("true", "True", "TRUE", "false", "False", "FALSE"):
        return BOOL
    if _INT.fullmatch(s):
        return INT
    body = s[1:] if s[:1] in "+-" and s else s
    if s in _NAN or body in _INF:
        return FLOAT
    m = _FLOAT.fullmatch(s)
    if m and ("." in s or "e" in s or "E" in s):
        return FLOAT
    return STR


def plain(s):
    return S(infer(s), s)


def string(s):
    return S(STR, s, True)


def canonical_int(s):
    neg = False
    if s.startswith("0o"):
        v = int(s[2:], 8)
    elif s.startswith("0x"):
        v = int(s[2:], 16)
    else:
        neg = s.startswith("-")
        v = int(s.lstrip("+-"))
    if v >= 2**64:
        d = s.lstrip("+-").lstrip("0") or "0"
        return ("-" if neg and d != "0" else "") + d
    if v == 0:
        return "0"
    return ("-" if neg else "") + str(v)


def canonical(sc):
    if sc.kind == NULL:
        return "null"
    if sc.kind == BOOL:
        return "true" if sc.text in ("true", "True", "TRUE") else "false"
    if sc.kind == INT:
        return canonical_int(sc.text)
    if sc.kind == FLOAT:
        body = sc.text.lstrip("+-")
        if body in _NAN:
            return "nan"
        if body in _INF:
            return "-inf" if sc.text.startswith("-") else "inf"
        return "%.17g" % float(sc.text)
    return sc.text


# ---- loading


def convert(node):
    if isinstance(node, yaml.ScalarNode):
        if node.style is None:
            return plain(node.value)
        return S(STR, node.value, True)
    if isinstance(node, yaml.SequenceNode):
        return Seq([convert(n) for n in node.value], bool(node.flow_style))
    out = []
    for k, v in node.value:
        key = k.value
        val = convert(v)
        for i, (ek, _) in enumerate(out):
            if ek == key:
                out[i] = (key, val)
                break
        else:
            out.append((key, val))
    return Map(out, bool(node.flow_style))


def load_yaml(path):
    with open(path, encoding="utf-8") as f:
        node = yaml.compose(f.read())
    return S(NULL, "") if node is None else convert(node)


def coalesce(base, over):
    if isinstance(base, Map) and isinstance(over, Map):
        out = list(base.entries)
        for k, v in over.entries:
            for i, (ek, ev) in enumerate(out):
                if ek == k:
                    out[i] = (k, coalesce(ev, v))
                    break
            else:
                out.append((k, v))
        return Map(out, base.flow)
    return over


# ---- printing and emitting

_INDICATORS = "-?:,[]{}#&*!|>'\"%@`"
_TOKENS = ("bool", "int", "string", "IP", "[list]", "{dict}")


def is_null(n):
    return isinstance(n, S) and n.kind == NULL


def print_node(n):
    if isinstance(n, S):
        if n.kind == NULL:
            return ""
        if n.kind in (BOOL, INT):
            return canonical(n)
        return n.text
    if isinstance(n, Seq):
        return "[" + " ".join("<nil>" if is_null(i) else print_node(i) for i in n.items) + "]"
    parts = sorted(n.entries, key=lambda e: e[0].encode())
    return "map[" + " ".join(k + ":" + ("<nil>" if is_null(v) else print_node(v))
                             for k, v in parts) + "]"


def is_empty(v):
    if v is None:
        return True
    if isinstance(v, Seq):
        return not v.items
    if isinstance(v, Map):
        return not v.entries
    if v.kind == NULL:
        return True
    if v.kind == BOOL:
        return canonical(v) == "false"
    if v.kind == INT:
        return canonical(v) == "0"
    if v.kind == FLOAT:
        try:
            return float(v.text) == 0.0
        except ValueError:
            return False
    return v.text == ""


def _escape(s, extra):
    out = []
    for ch in s:
        c = ord(ch)
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch in extra:
            out.append(extra[ch])
        elif c < 0x20 or c == 0x7F:
            out.append("\\x%02x" % c)
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def go_quote(s):
    return _escape(s, {"\n": "\\n", "\r": "\\r", "\t": "\\t", "\a": "\\a",
                       "\b": "\\b", "\f": "\\f", "\v": "\\v"})


def dq(s):
    return _escape(s, {"\n": "\\n", "\t": "\\t", "\r": "\\r"})


def plain_safe(s, flow):
    if not s or s[0] in _INDICATORS or s[0] == " " or s[-1] == " ":
        return False
    if s[-1] == ":" or ": " in s or " #" in s:
        return False
    for ch in s:
        if ord(ch) < 0x20 or ord(ch) == 0x7F:
            return False
        if flow and ch in ",[]{}":
            return False
    return True


def scalar_text(sc, flow):
    if sc.kind != STR:
        return "null" if sc.kind == NULL or not sc.text else sc.text
    s = sc.text
    if s in _TOKENS:
        return dq(s) if sc.quoted else s
    if plain_safe(s, flow) and infer(s) == STR:
        return s
    return dq(s)


def key_text(k):
    return k if plain_safe(k, False) and infer(k) == STR else dq(k)


def collection_token(n):
    if not n.flow:
        return None
    if isinstance(n, Seq) and len(n.items) == 1:
        i = n.items[0]
        if isinstance(i, S) and not i.quoted and i.text == "list":
            return "[list]"
    if isinstance(n, Map) and len(n.entries) == 1:
        k, v = n.entries[0]
        if k == "dict" and is_null(v):
            return "{dict}"
    return None


def is_inline(n):
    if isinstance(n, S):
        return True
    if isinstance(n, Seq):
        if not n.items:
            return True
        if n.flow and all(isinstance(i, S) for i in n.items):
            return True
    else:
        if not n.entries:
            return True
        if n.flow and all(isinstance(v, S) for _, v in n.entries):
            return True
    return collection_token(n) is not None


def inline(n):
    if isinstance(n, S):
        return scalar_text(n, False)
    tok = collection_token(n)
    if tok:
        return tok
    if isinstance(n, Seq):
        return "[" + ", ".join(scalar_text(i, True) for i in n.items) + "]"
    parts = []
    for k, v in n.entries:
        kt = key_text(k) if plain_safe(k, True) else dq(k)
        parts.append(kt + ": " + scalar_text(v, True))
    return "{" + ", ".join(parts) + "}"


def emit(n, indent):
    pad = " " * indent
    if is_inline(n):
        return pad + inline(n)
    lines = []
    if isinstance(n, Map):
        for k, v in n.entries:
            head = pad + key_text(k) + ":"
            if is_inline(v):
                lines.append(head + " " + inline(v))
            elif isinstance(v, Map):
                lines.append(head + "\n" + emit(v, indent + 2))
            else:
                lines.append(head + "\n" + emit(v, indent))
        return "\n".join(lines)
    for item in n.items:
        if is_inline(item):
            lines.append(pad + "- " + inline(item))
        else:
            lines.append(pad + "- " + emit(item, indent + 2)[indent + 2:])
    return "\n".join(lines)


# ---- template parsing

FUNCS = {"default", "quote", "upper", "lower", "indent", "nindent", "toYaml",
         "trunc", "trimSuffix", "eq", "not", "and", "or", "include"}
SPACE = " \t\r\n"


class TemplateError(Exception):
    pass


def lex(body):
    toks = []
    i = 0
    while i < len(body):
        c = body[i]
        if c in SPACE:
            i += 1
        elif c in "|()":
            toks.append((c, None))
            i += 1
        elif c == '"':
            j = i + 1
            buf = []
            esc = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", '"': '"'}
            while True:
                if j >= len(body):
                    raise TemplateError("unterminated string")
                d = body[j]
                j += 1
                if d == '"':
                    break
                if d == "\\":
                    if j >= len(body) or body[j] not in esc:
                        raise TemplateError("bad escape")
                    buf.append(esc[body[j]])
                    j += 1
                else:
                    buf.append(d)
            toks.append(("str", "".join(buf)))
            i = j
        elif c == "`":
            j = body.find("`", i + 1)
            if j < 0:
                raise TemplateError("unterminated raw string")
            toks.append(("str", body[i + 1:j]))
            i = j + 1
        elif c in ".$":
            m = re.match(r"(\$)?((?:\.[A-Za-z0-9_]+)*)(\.)?", body[i:])
            root = m.group(1) is not None
            fields = [f for f in m.group(2).split(".") if f]
            if root and i + 1 < len(body) and re.match(r"\w", body[i + 1]):
                raise TemplateError("variables")
            toks.append(("field", (root, fields)))
            i += m.end()
        elif c.isdigit() or (c == "-" and i + 1 < len(body) and body[i + 1].isdigit()):
            m = re.match(r"-?[0-9.]+", body[i:])
            toks.append(("num", m.group(0)))
            i += m.end()
        elif c.isalpha() or c == "_":
            m = re.match(r"\w+", body[i:])
            toks.append(("ident", m.group(0)))
            i += m.end()
        else:
            raise TemplateError("unexpected character %r" % c)
    toks.append(("end", None))
    return toks


class Pipe:
    def __init__(self, toks, pos):
        self.toks, self.pos = toks, pos

    def peek(self):
        return self.toks[self.pos]

    def at_end(self):
        return self.peek()[0] == "end"

    def starts_operand(self):
        k, v = self.peek()
        if k in ("field", "str", "num", "("):
            return True
        return k == "ident" and (v in ("true", "false") or v in FUNCS)

    def pipeline(self):
        cmds = [self.command()]
        while self.peek()[0] == "|":
            self.pos += 1
            cmds.append(self.command())
        return cmds

    def command(self):
        k, v = self.peek()
        if k == "ident" and v not in ("true", "false"):
            self.pos += 1
            if v not in FUNCS:
                raise TemplateError("unsupported function " + v)
            args = []
            while self.starts_operand():
                args.append(self.operand())
            return (v, args)
        if not self.starts_operand():
            raise TemplateError("expected a value")
        arg = self.operand()
        if self.starts_operand():
            raise TemplateError("unexpected operand")
        return (None, [arg])

    def operand(self):
        k, v = self.toks[self.pos]
        self.pos += 1
        if k == "field":
            return ("field", v)
        if k == "str":
            return ("lit", string(v))
        if k == "num":
            return ("lit", plain(v))
        if k == "(":
            p = self.pipeline()
            if self.peek()[0] != ")":
                raise TemplateError("expected )")
            self.pos += 1
            return ("pipe", p)
        if k == "ident":
            if v in ("true", "false"):
                return ("lit", plain(v))
            return ("pipe", [(v, [])])
        raise TemplateError("expected an operand")


def find_close(t, i):
    while i + 1 < len(t):
        c = t[i]
        if c == '"':
            i += 1
            while i < len(t) and t[i] != '"':
                if t[i] == "\\":
                    i += 1
                i += 1
            i += 1
            continue
        if c == "`":
            e = t.find("`", i + 1)
            if e < 0:
                break
            i = e + 1
            continue
        if c == "}" and t[i + 1] == "}":
            return i
        i += 1
    raise TemplateError("unclosed action")


def parse(t):
    # frame: [kind, pipeline/name, body, else_body, in_else, chained]
    root = ["root", None, [], [], False, False]
    stack = [root]

    def cur():
        f = stack[-1]
        return f[3] if f[4] else f[2]

    def text(s):
        if not s:
            return
        lst = cur()
        if lst and lst[-1][0] == "text":
            lst[-1] = ("text", lst[-1][1] + s)
        else:
            lst.append(("text", s))

    i = 0
    trim_next = False
    while True:
        o = t.find("{{", i)
        lit = t[i:] if o < 0 else t[i:o]
        if trim_next:
            lit = lit.lstrip(SPACE)
            trim_next = False
        if o < 0:
            text(lit)
            break
        inner = o + 2
        if inner + 1 < len(t) and t[inner] == "-" and t[inner + 1] in SPACE:
            lit = lit.rstrip(SPACE)
            inner += 1
        text(lit)
        close = find_close(t, inner)
        end = close
        if close >= 2 and t[close - 1] == "-" and t[close - 2] in SPACE and close - 1 >= inner:
            trim_next = True
            end = close - 1
        action(t[inner:end], stack, cur)
        i = close + 2
    if len(stack) > 1:
        raise TemplateError("missing end")
    return root[2]


def action(body, stack, cur):
    s = body.strip(SPACE)
    if len(s) >= 4 and s.startswith("/*") and s.endswith("*/"):
        return
    toks = lex(body)
    if toks[0][0] == "end":
        raise TemplateError("empty action")
    k, kw = toks[0]
    if k == "ident":
        if kw in ("if", "range"):
            p = Pipe(toks, 1)
            pl = p.pipeline()
            if not p.at_end():
                raise TemplateError("trailing tokens")
            stack.append([kw, pl, [], [], False, False])
            return
        if kw == "else":
            f = stack[-1]
            if len(stack) == 1 or f[4] or f[0] not in ("if", "range"):
                raise TemplateError("unexpected else")
            f[4] = True
            if len(toks) > 2 and toks[1] == ("ident", "if"):
                p = Pipe(toks, 2)
                pl = p.pipeline()
                stack.append(["if", pl, [], [], False, True])
            return
        if kw == "end":
            while True:
                f = stack.pop()
                cur().append(tuple(f[:4]))
                if not f[5]:
                    break
            return
        if kw == "define":
            stack.append(["define", toks[1][1], [], [], False, False])
            return
        if kw == "template":
            p = Pipe(toks, 2)
            pl = None if p.at_end() else p.pipeline()
            cur().append(("template", toks[1][1], pl))
            return
        if kw in ("with", "block", "break", "continue"):
            raise TemplateError("unsupported " + kw)
    p = Pipe(toks, 0)
    pl = p.pipeline()
    if not p.at_end():
        raise TemplateError("trailing tokens")
    cur().append(("expr", pl))


def collect_defines(nodes, defines):
    for n in nodes:
        if n[0] == "define":
            if n[1] in defines:
                raise TemplateError("duplicate define " + n[1])
            defines[n[1]] = n[2]


# ---- evaluation


class Engine:
    def __init__(self, defines):
        self.defines = defines
        self.depth = 0

    def run(self, nodes, root, dot, out):
        for n in nodes:
            kind = n[0]
            if kind == "text":
                out.append(n[1])
            elif kind == "expr":
                v = self.eval(n[1], root, dot)
                if v is None:
                    raise TemplateError("unresolved reference")
                out.append(print_node(v))
            elif kind == "if":
                v = self.eval(n[1], root, dot)
                self.run(n[2] if not is_empty(v) else n[3], root, dot, out)
            elif kind == "range":
                self.range(n, root, dot, out)
            elif kind == "template":
                arg = None if n[2] is None else self.eval(n[2], root, dot)
                out.append(self.call_template(n[1], arg))

    def range(self, n, root, dot, out):
        coll = self.eval(n[1], root, dot)
        if coll is None or is_null(coll):
            self.run(n[3], root, dot, out)
            return
        if isinstance(coll, S):
            raise TemplateError("range over scalar")
        if isinstance(coll, Seq):
            items = coll.items
        else:
            items = [v for _, v in sorted(coll.entries, key=lambda e: e[0].encode())]
        if not items:
            self.run(n[3], root, dot, out)
        for item in items:
            self.run(n[2], root, item, out)

    def call_template(self, name, arg):
        if name not in self.defines:
            raise TemplateError("unknown template " + name)
        if self.depth >= 64:
            raise TemplateError("recursion")
        data = S(NULL, "") if arg is None else arg
        self.depth += 1
        out = []
        self.run(self.defines[name], data, data, out)
        self.depth -= 1
        return "".join(out)

    def operand(self, op, root, dot):
        kind, v = op
        if kind == "lit":
            return v
        if kind == "pipe":
            return self.eval(v, root, dot)
        from_root, fields = v
        cur = root if from_root else dot
        for f in fields:
            cur = cur.get(f) if isinstance(cur, Map) else None
        return cur

    def eval(self, pipeline, root, dot):
        piped = None
        first = True
        for fn, ops in pipeline:
            args = [self.operand(o, root, dot) for o in ops]
            if fn is None:
                if not first:
                    raise TemplateError("cannot pipe into a value")
                piped = args[0]
            else:
                if not first:
                    args.append(piped)
                piped = self.call(fn, args)
            first = False
        return piped

    def call(self, fn, args):
        txt = lambda v: "" if v is None else print_node(v)

        def need(n):
            if len(args) != n:
                raise TemplateError(fn + " arity")

        def to_int(v):
            try:
                return int(canonical(v))
            except (ValueError, AttributeError):
                raise TemplateError(fn + " expects an integer")

        if fn == "default":
            if len(args) == 1:
                return args[0]
            need(2)
            return args[1] if not is_empty(args[1]) else args[0]
        if fn == "quote":
            return string(" ".join(go_quote(txt(a)) for a in args if a is not None))
        if fn in ("upper", "lower"):
            need(1)
            s = txt(args[0])
            return string(s.upper() if fn == "upper" else s.lower())
        if fn == "trunc":
            need(2)
            n, s = to_int(args[0]), txt(args[1])
            if n >= 0 and len(s) > n:
                s = s[:n]
            if n < 0 and len(s) > -n:
                s = s[len(s) + n:]
            return string(s)
        if fn == "trimSuffix":
            need(2)
            suf, s = txt(args[0]), txt(args[1])
            if suf and s.endswith(suf):
                s = s[: len(s) - len(suf)]
            return string(s)
        if fn in ("indent", "nindent"):
            need(2)
            pad = " " * max(0, to_int(args[0]))
            s = pad + txt(args[1]).replace("\n", "\n" + pad)
            return string("\n" + s if fn == "nindent" else s)
        if fn == "toYaml":
            need(1)
            return string("null" if args[0] is None else emit(args[0], 0))
        if fn == "eq":
            if len(args) < 2:
                need(2)
            return plain("true" if any(equal(args[0], b) for b in args[1:]) else "false")
        if fn == "not":
            need(1)
            return plain("false" if not is_empty(args[0]) else "true")
        if fn in ("and", "or"):
            if not args:
                need(2)
            for a in args[:-1]:
                t = not is_empty(a)
                if (not t) if fn == "and" else t:
                    return a
            return args[-1]
        if fn == "include":
            if not args or len(args) > 2:
                need(2)
            if not isinstance(args[0], S):
                raise TemplateError("include expects a name")
            return string(self.call_template(args[0].text, args[1] if len(args) == 2 else None))
        raise TemplateError("unsupported function " + fn)


def same(a, b):
    if type(a) is not type(b):
        return False
    if isinstance(a, S):
        if a.kind != b.kind:
            return False
        return a.text == b.text if a.kind == STR else canonical(a) == canonical(b)
    if isinstance(a, Seq):
        return len(a.items) == len(b.items) and all(map(same, a.items, b.items))
    return len(a.entries) == len(b.entries) and all(
        ka == kb and same(va, vb) for (ka, va), (kb, vb) in zip(a.entries, b.entries))


def equal(a, b):
    if a is None or b is None:
        return a is None and b is None
    if not isinstance(a, S) or not isinstance(b, S):
        return same(a, b)
    if (a.kind == STR) != (b.kind == STR):
        return False
    return print_node(a) == print_node(b)


# ---- stream assembly

ORDER = ["Namespace", "NetworkPolicy", "ResourceQuota", "LimitRange",
         "PodSecurityPolicy", "PodDisruptionBudget", "ServiceAccount", "Secret",
         "SecretList", "ConfigMap", "StorageClass", "PersistentVolume",
         "PersistentVolumeClaim", "CustomResourceDefinition", "ClusterRole",
         "ClusterRoleList", "ClusterRoleBinding", "ClusterRoleBindingList", "Role",
         "RoleList", "RoleBinding", "RoleBindingList", "Service", "DaemonSet", "Pod",
         "ReplicationController", "ReplicaSet", "Deployment",
         "HorizontalPodAutoscaler", "StatefulSet", "Job", "CronJob", "IngressClass",
         "Ingress", "APIService"]


def kind_of(doc):
    for line in doc.split("\n"):
        if line.startswith("kind:"):
            v = line[5:].lstrip(" \t").rstrip(" \r")
            if len(v) >= 2 and v[0] in "\"'" and v[-1] == v[0]:
                v = v[1:-1]
            return v
    return ""


def split_docs(text):
    docs, cur = [], []
    for line in text.split("\n"):
        if line.startswith("---") and not line[3:].strip(SPACE):
            docs.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    docs.append("\n".join(cur))
    return docs


def main(argv):
    if len(argv) < 2:
        sys.stderr.write("usage: render_reference.py CHART_DIR [VALUES] [RELEASE]\n")
        return 2
    chart_dir = argv[1]
    release = argv[3] if len(argv) > 3 else "release-name"
    meta = load_yaml(os.path.join(chart_dir, "Chart.yaml"))
    chart_name = meta.get("name").text
    values_path = os.path.join(chart_dir, "values.yaml")
    values = load_yaml(values_path) if os.path.exists(values_path) else Map([])
    if len(argv) > 2 and argv[2]:
        values = coalesce(values, load_yaml(argv[2]))
    if not isinstance(values, Map):
        values = Map([])

    tdir = os.path.join(chart_dir, "templates")
    names = sorted(n for n in os.listdir(tdir)
                   if os.path.isfile(os.path.join(tdir, n))
                   and os.path.splitext(n)[1] in (".yaml", ".yml", ".tpl"))
    defines, files = {}, []
    for n in names:
        with open(os.path.join(tdir, n), encoding="utf-8") as f:
            ast = parse(f.read())
        collect_defines(ast, defines)
        if not (n.startswith("_") or n.endswith(".tpl")):
            files.append((n, ast))

    root = Map([("Values", values),
                ("Release", Map([("Name", string(release)), ("Service", string("Helm"))])),
                ("Chart", Map([("Name", string(chart_name))]))])
    engine = Engine(defines)
    docs = []
    for n, ast in files:
        out = []
        engine.run(ast, root, root, out)
        for d in split_docs("".join(out)):
            d = d.strip(SPACE)
            if d:
                k = kind_of(d)
                rank = ORDER.index(k) if k in ORDER else len(ORDER)
                docs.append(((rank, k if rank == len(ORDER) else ""), n, d))
    docs.sort(key=lambda e: e[0])
    sys.stdout.write("".join("---\n# Source: %s/templates/%s\n%s\n" % (chart_name, n, d)
                             for _, n, d in docs))
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main(sys.argv))
    except TemplateError as e:
        sys.stderr.write("render_reference: %s\n" % e)
        sys.exit(1)
