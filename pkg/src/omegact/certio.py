"""Text format for proof certificates.

A certificate file is one nested parenthesized node:

    (rule TAG (seq "SEQUENT") CLAUSE...)

with rule-specific clauses:

    (pos N) (choice N) (pi N) (xi N|rest) (split N) (blocks N...)
    (bounds N...) (pattern N...) (hyp N)
    (premises NODE...)
    (schema PARAM (instances NODE...))        explicit schema instances
    (schema PARAM (template NODE))            schema template
    (vdash VD...)                             block derivations, in split order

    VD := (vd (seq "SEQUENT") (hyps "SEQUENT"...)
              [(family "SEQUENT with one @{...} segment")]
              (derivation NODE))

Inside template sequents and family declarations, ``@{F1, F2}`` marks
the segment repeated once per unit of the schema parameter; a template
star-right node may use ``(blocks N... rep N...)`` and a
``(rep-premise NODE)`` clause for its per-repetition premise.
"""

from __future__ import annotations

from .kernel import (
    AX,
    HYP,
    JOIN_R,
    L_OMEGA,
    MEET_L,
    OMEGA_L,
    OMEGA_R,
    OVER_L,
    PROD_R,
    STAR_L,
    STAR_R,
    UNDER_L,
    ALL_RULES,
    PeriodicSplit,
    PremiseSchema,
    ProofNode,
    RepBlocks,
    SequentFamily,
    TemplateNode,
    VdashDerivation,
)
from omegact import syntax
from .syntax import ParseError, Sequent, print_formula, print_sequent


class CertFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# S-expressions


def _sexp_tokens(text: str):
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == '"':
            j = text.index('"', i + 1)
            yield ("str", text[i + 1 : j])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in '()"':
                j += 1
            yield ("atom", text[i:j])
            i = j


def _parse_sexp(text: str):
    stack = [[]]
    for tok in _sexp_tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise CertFormatError("unbalanced parentheses")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise CertFormatError("unbalanced parentheses")
    if len(stack[0]) != 1 or not isinstance(stack[0][0], list):
        raise CertFormatError("expected exactly one top-level node")
    return stack[0][0]


def _head(sx) -> str:
    if not isinstance(sx, list) or not sx or sx[0][0] != "atom":
        raise CertFormatError(f"expected a clause, got {sx!r}")
    return sx[0][1]


def _atom(x) -> str:
    if not isinstance(x, tuple) or x[0] != "atom":
        raise CertFormatError(f"expected an atom, got {x!r}")
    return x[1]


def _string(x) -> str:
    if not isinstance(x, tuple) or x[0] != "str":
        raise CertFormatError(f"expected a quoted string, got {x!r}")
    return x[1]


def _int(x) -> int:
    try:
        return int(_atom(x))
    except ValueError:
        raise CertFormatError(f"expected an integer, got {x!r}") from None


# ---------------------------------------------------------------------------
# Sequents with an optional @-segment (for families and templates)


def _parse_family(text: str) -> SequentFamily:
    at = text.find("@{")
    if at < 0:
        raise CertFormatError("family sequent needs one @{...} segment")
    close = text.find("}", at)
    if close < 0:
        raise CertFormatError("unterminated @{...} segment")
    block_src = text[at + 2 : close]
    block = tuple(syntax.parse_formula(part) for part in block_src.split(",") if part.strip())
    before = text[:at].strip().rstrip(",").strip()
    after = text[close + 1 :].strip().lstrip(",").strip()
    pre = tuple(syntax.parse_formula(part) for part in _split_items(before))
    rest = syntax.parse_sequent(after)
    return SequentFamily(
        pre=pre,
        block=block,
        succ=rest.succ,
        post_prefix=rest.ante.prefix,
        post_period=rest.ante.period,
        post_tail=rest.tail,
    )


def _split_items(src: str) -> list[str]:
    """Split a comma-separated formula list, respecting parentheses."""
    items, depth, current = [], 0, []
    for ch in src:
        if ch == "," and depth == 0:
            item = "".join(current).strip()
            if item:
                items.append(item)
            current = []
        else:
            depth += ch in "({"
            depth -= ch in ")}"
            current.append(ch)
    last = "".join(current).strip()
    if last:
        items.append(last)
    return items


def _print_family(f: SequentFamily) -> str:
    parts = [print_formula(g) for g in f.pre]
    parts.append("@{" + ", ".join(print_formula(g) for g in f.block) + "}")
    rest = Sequent(syntax.UpSequence(f.post_prefix, f.post_period), f.post_tail, f.succ)
    rest_text = print_sequent(rest)
    if rest_text.startswith("|- "):
        return ", ".join(parts) + " " + rest_text
    return ", ".join(parts) + ", " + rest_text


# ---------------------------------------------------------------------------
# Nodes


def _clauses(sx) -> dict[str, list]:
    out: dict[str, list] = {}
    for clause in sx:
        h = _head(clause)
        if h in out:
            raise CertFormatError(f"duplicate clause {h}")
        out[h] = clause[1:]
    return out


def _node_from_sexp(sx, template: bool):
    if _head(sx) != "rule":
        raise CertFormatError("node must start with (rule ...)")
    if len(sx) < 3:
        raise CertFormatError("node needs a tag and a sequent")
    tag = _atom(sx[1])
    if tag not in ALL_RULES:
        raise CertFormatError(f"unknown rule tag {tag}")
    seq_clause = sx[2]
    if _head(seq_clause) != "seq" or len(seq_clause) != 2:
        raise CertFormatError("expected (seq \"...\") after the rule tag")
    seq_text = _string(seq_clause[1])
    rest = _clauses(sx[3:])

    conclusion: Sequent | SequentFamily
    if template and "@{" in seq_text:
        conclusion = _parse_family(seq_text)
    else:
        try:
            conclusion = syntax.parse_sequent(seq_text)
        except ParseError as e:
            raise CertFormatError(f"bad sequent {seq_text!r}: {e}") from None

    aux = _aux_from_clauses(tag, rest, template)
    premises = tuple(
        _node_from_sexp(child, template) for child in rest.pop("premises", [])
    )
    rep_premise = None
    if "rep-premise" in rest:
        if not template:
            raise CertFormatError("rep-premise is only allowed inside templates")
        (rp,) = rest.pop("rep-premise")
        rep_premise = _node_from_sexp(rp, True)

    schema = None
    if "schema" in rest:
        if template:
            raise CertFormatError("nested schemas are not supported")
        schema = _schema_from_clause(rest.pop("schema"))

    vdash = ()
    if "vdash" in rest:
        if template:
            raise CertFormatError("block derivations are not allowed inside templates")
        vdash = tuple(_vd_from_sexp(v) for v in rest.pop("vdash"))

    if rest:
        raise CertFormatError(f"unexpected clauses: {sorted(rest)}")
    if template:
        return TemplateNode(tag, conclusion, premises, rep_premise, aux)
    if isinstance(conclusion, SequentFamily):
        raise CertFormatError("@-segments are only allowed inside templates")
    return ProofNode(tag, conclusion, premises, aux, schema, vdash)


def _aux_from_clauses(tag: str, rest: dict, template: bool):
    def take_int(name):
        vals = rest.pop(name, None)
        if vals is None:
            return None
        if len(vals) != 1:
            raise CertFormatError(f"({name} ...) takes one integer")
        return _int(vals[0])

    if tag in ("prod_l", "join_l", "star_l", "omega_l"):
        pos = take_int("pos")
        if pos is None:
            raise CertFormatError(f"{tag} needs a (pos N) clause")
        return pos
    if tag == MEET_L:
        pos, choice = take_int("pos"), take_int("choice")
        if pos is None or choice is None:
            raise CertFormatError("meet_l needs (pos N) and (choice N)")
        return (pos, choice)
    if tag == UNDER_L:
        pi, pos = take_int("pi"), take_int("pos")
        if pi is None or pos is None:
            raise CertFormatError("under_l needs (pi N) and (pos N)")
        return (pi, pos)
    if tag == OVER_L:
        pos = take_int("pos")
        vals = rest.pop("xi", None)
        if pos is None or vals is None or len(vals) != 1:
            raise CertFormatError("over_l needs (pos N) and (xi N|rest)")
        xi = None if _atom(vals[0]) == "rest" else int(_atom(vals[0]))
        return (pos, xi)
    if tag == PROD_R:
        split = take_int("split")
        if split is None:
            raise CertFormatError("prod_r needs (split N)")
        return split
    if tag == JOIN_R:
        choice = take_int("choice")
        if choice is None:
            raise CertFormatError("join_r needs (choice N)")
        return choice
    if tag == STAR_R:
        vals = rest.pop("blocks", None)
        if vals is None:
            raise CertFormatError("star_r needs (blocks N...)")
        atoms = [_atom(v) for v in vals]
        if "rep" in atoms:
            if not template:
                raise CertFormatError("rep block groups are only allowed inside templates")
            cut = atoms.index("rep")
            return RepBlocks(tuple(int(a) for a in atoms[:cut]), tuple(int(a) for a in atoms[cut + 1 :]))
        return tuple(int(a) for a in atoms)
    if tag in (OMEGA_R, L_OMEGA):
        bounds = rest.pop("bounds", [])
        pattern = rest.pop("pattern", None)
        if pattern is None:
            raise CertFormatError(f"{tag} needs a (pattern N...) clause")
        return PeriodicSplit(tuple(_int(v) for v in bounds), tuple(_int(v) for v in pattern))
    if tag == HYP:
        idx = take_int("hyp")
        if idx is None:
            raise CertFormatError("hyp needs a (hyp N) clause")
        return idx
    return None


def _schema_from_clause(vals) -> PremiseSchema:
    if len(vals) != 2:
        raise CertFormatError("(schema PARAM BODY) takes a parameter and one body")
    param = _atom(vals[0])
    body = vals[1]
    h = _head(body)
    if h == "instances":
        return PremiseSchema(param, instances=tuple(_node_from_sexp(c, False) for c in body[1:]))
    if h == "template":
        if len(body) != 2:
            raise CertFormatError("(template NODE) takes one node")
        return PremiseSchema(param, template=_node_from_sexp(body[1], True))
    raise CertFormatError(f"unknown schema body {h}")


def _vd_from_sexp(sx) -> VdashDerivation:
    if _head(sx) != "vd":
        raise CertFormatError("block derivation must start with (vd ...)")
    rest = _clauses(sx[1:])
    seq_vals = rest.pop("seq", None)
    if seq_vals is None or len(seq_vals) != 1:
        raise CertFormatError("(vd ...) needs a (seq \"...\") root")
    root = syntax.parse_sequent(_string(seq_vals[0]))
    hyps = tuple(syntax.parse_sequent(_string(v)) for v in rest.pop("hyps", []))
    family = None
    if "family" in rest:
        vals = rest.pop("family")
        if len(vals) != 1:
            raise CertFormatError("(family \"...\") takes one sequent")
        family = _parse_family(_string(vals[0]))
    deriv_vals = rest.pop("derivation", None)
    if deriv_vals is None or len(deriv_vals) != 1:
        raise CertFormatError("(vd ...) needs a (derivation NODE)")
    tree = _node_from_sexp(deriv_vals[0], False)
    if rest:
        raise CertFormatError(f"unexpected clauses in vd: {sorted(rest)}")
    return VdashDerivation(root, hyps, tree, family)


def parse_certificate(text: str) -> ProofNode:
    node = _node_from_sexp(_parse_sexp(text), False)
    if isinstance(node, TemplateNode):
        raise CertFormatError("top-level node may not be a template")
    return node


# ---------------------------------------------------------------------------
# Printing


def _fmt_aux(tag: str, aux) -> list[str]:
    if tag in ("prod_l", "join_l", "star_l", "omega_l"):
        return [f"(pos {aux})"]
    if tag == MEET_L:
        return [f"(pos {aux[0]})", f"(choice {aux[1]})"]
    if tag == UNDER_L:
        return [f"(pi {aux[0]})", f"(pos {aux[1]})"]
    if tag == OVER_L:
        xi = "rest" if aux[1] is None else aux[1]
        return [f"(pos {aux[0]})", f"(xi {xi})"]
    if tag == PROD_R:
        return [f"(split {aux})"]
    if tag == JOIN_R:
        return [f"(choice {aux})"]
    if tag == STAR_R:
        if isinstance(aux, RepBlocks):
            inner = " ".join(str(l) for l in aux.fixed) + (" " if aux.fixed else "") + "rep " + " ".join(
                str(l) for l in aux.each
            )
            return [f"(blocks {inner.strip()})"]
        return ["(blocks" + "".join(f" {l}" for l in aux) + ")"]
    if tag in (OMEGA_R, L_OMEGA):
        parts = []
        if aux.prefix_bounds:
            parts.append("(bounds" + "".join(f" {b}" for b in aux.prefix_bounds) + ")")
        parts.append("(pattern" + "".join(f" {l}" for l in aux.pattern) + ")")
        return parts
    if tag == HYP:
        return [f"(hyp {aux})"]
    return []


def _fmt_node(node, indent: int) -> str:
    pad = "  " * indent
    if isinstance(node.conclusion, SequentFamily):
        seq_text = _print_family(node.conclusion)
    else:
        seq_text = print_sequent(node.conclusion)
    parts = [f'{pad}(rule {node.rule} (seq "{seq_text}")']
    parts.extend(f"{pad}  {a}" for a in _fmt_aux(node.rule, node.aux))
    if node.premises:
        parts.append(f"{pad}  (premises")
        for child in node.premises:
            parts.append(_fmt_node(child, indent + 2))
        parts.append(f"{pad}  )")
    if isinstance(node, TemplateNode):
        if node.rep_premise is not None:
            parts.append(f"{pad}  (rep-premise")
            parts.append(_fmt_node(node.rep_premise, indent + 2))
            parts.append(f"{pad}  )")
    else:
        if node.schema is not None:
            body = node.schema
            if body.instances:
                parts.append(f"{pad}  (schema {body.param} (instances")
                for inst in body.instances:
                    parts.append(_fmt_node(inst, indent + 2))
                parts.append(f"{pad}  ))")
            else:
                parts.append(f"{pad}  (schema {body.param} (template")
                parts.append(_fmt_node(body.template, indent + 2))
                parts.append(f"{pad}  ))")
        if node.vdash:
            parts.append(f"{pad}  (vdash")
            for vd in node.vdash:
                parts.append(_fmt_vd(vd, indent + 2))
            parts.append(f"{pad}  )")
    parts.append(f"{pad})")
    return "\n".join(parts)


def _fmt_vd(vd: VdashDerivation, indent: int) -> str:
    pad = "  " * indent
    parts = [f'{pad}(vd (seq "{print_sequent(vd.root)}")']
    hyps = " ".join(f'"{print_sequent(h)}"' for h in vd.hyps)
    parts.append(f"{pad}  (hyps {hyps})" if hyps else f"{pad}  (hyps)")
    if vd.hyp_family is not None:
        parts.append(f'{pad}  (family "{_print_family(vd.hyp_family)}")')
    parts.append(f"{pad}  (derivation")
    parts.append(_fmt_node(vd.tree, indent + 2))
    parts.append(f"{pad}  )")
    parts.append(f"{pad})")
    return "\n".join(parts)


def print_certificate(node: ProofNode) -> str:
    return _fmt_node(node, 0) + "\n"
