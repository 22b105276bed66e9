"""
Presentation file format.

    # comment to end of line
    gens: x1 x2 x3 x4;
    rel: 4*x1 + 2*[x4,x3] + [x4,x2];
    rel: 16 x2 + 4[x4,x3] - [x4,x1];
    class: 4;
    cap: 5;

``gens`` comes first and declares the generators in order. Each ``rel``
gives one relator as an integer combination of generators and brackets;
``[a,b,c]`` means the left-normed [[a,b],c] and bracket entries are
themselves combinations. The ``*`` after a coefficient is optional.
``class`` sets the nilpotency class cap and ``cap`` the degree cap of the
free Lie ring (at least the class). Whitespace and line breaks are free.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import pyparsing as pp

from src.fplie import Presentation
from src.hall import FreeLieContext, LieVec, generate_hall_basis
from src.utils.error_handling import (
    InvalidQueryError,
    PresentationSyntaxError,
    UndeclaredGeneratorError,
)

logger = logging.getLogger(__name__)

KEYWORDS = ("gens", "rel", "class", "cap")


@dataclass(frozen=True)
class Symbol:
    name: str
    line: int
    column: int


@dataclass(frozen=True)
class Commutator:
    """Left-normed bracket of two or more entries."""
    entries: Tuple["Combination", ...]


@dataclass(frozen=True)
class Term:
    coefficient: int
    atom: Union[Symbol, Commutator]


@dataclass(frozen=True)
class Combination:
    terms: Tuple[Term, ...]


@dataclass(frozen=True)
class Directive:
    keyword: str
    value: int
    line: int
    column: int


@dataclass(frozen=True)
class RelatorStatement:
    expr: Combination
    line: int


def _symbol(s: str, loc: int, toks) -> Symbol:
    return Symbol(toks[0], pp.lineno(loc, s), pp.col(loc, s))


def _combination(toks) -> Combination:
    terms = []
    sign = 1
    for tok in toks:
        if tok == "+":
            sign = 1
        elif tok == "-":
            sign = -1
        else:
            terms.append(Term(sign * tok.coefficient, tok.atom))
            sign = 1
    return Combination(tuple(terms))


def _directive(s: str, loc: int, toks) -> Directive:
    return Directive(toks[0], toks[1], pp.lineno(loc, s), pp.col(loc, s))


def make_grammar() -> pp.ParserElement:
    LBRACK, RBRACK, COMMA, COLON, SEMI, STAR = map(pp.Suppress, "[],:;*")
    keyword = pp.MatchFirst([pp.Keyword(k) for k in KEYWORDS])

    ident = ~keyword + pp.Word(pp.alphas + "_", pp.alphanums + "_")
    ident.set_name("generator")
    integer = pp.Word(pp.nums).set_name("integer")
    integer.set_parse_action(lambda toks: int(toks[0]))
    sign = pp.one_of("+ -")

    expr = pp.Forward().set_name("expression")
    symbol = ident.copy().set_parse_action(_symbol)
    commutator = (LBRACK + expr + pp.OneOrMore(COMMA + expr) + RBRACK).set_name("bracket")
    commutator.set_parse_action(lambda toks: Commutator(tuple(toks)))
    atom = symbol | commutator
    term = pp.Optional(integer + pp.Optional(STAR), default=1) + atom
    term.set_parse_action(lambda toks: Term(toks[0], toks[1]))
    expr <<= (pp.Optional(sign) + term + pp.ZeroOrMore(sign + term)).set_parse_action(_combination)

    gens_stmt = pp.Keyword("gens").suppress() + COLON + pp.Group(pp.OneOrMore(symbol + pp.Optional(COMMA))) + SEMI
    rel_stmt = pp.Keyword("rel").suppress() + COLON + expr + SEMI
    rel_stmt.set_parse_action(lambda s, loc, toks: RelatorStatement(toks[0], pp.lineno(loc, s)))
    directive = (pp.Keyword("class") | pp.Keyword("cap")) + COLON + integer + SEMI
    directive.set_parse_action(_directive)

    program = gens_stmt + pp.Group(pp.ZeroOrMore(rel_stmt | directive)) + pp.StringEnd()
    program.ignore(pp.python_style_comment)
    return program


_GRAMMAR = make_grammar()


def _degree(node: Union[Combination, Commutator, Symbol]) -> int:
    if isinstance(node, Symbol):
        return 1
    if isinstance(node, Commutator):
        return sum(_degree(e) for e in node.entries)
    return max((_degree(t.atom) for t in node.terms), default=1)


def _symbols(node: Union[Combination, Commutator, Symbol]) -> List[Symbol]:
    if isinstance(node, Symbol):
        return [node]
    if isinstance(node, Commutator):
        return [s for e in node.entries for s in _symbols(e)]
    return [s for t in node.terms for s in _symbols(t.atom)]


def _evaluate(node: Union[Combination, Commutator, Symbol], ctx: FreeLieContext) -> LieVec:
    if isinstance(node, Symbol):
        return ctx.generator_by_name(node.name)
    if isinstance(node, Commutator):
        result = _evaluate(node.entries[0], ctx)
        for entry in node.entries[1:]:
            result = ctx.bracket(result, _evaluate(entry, ctx))
        return result
    out = ctx.zero()
    for t in node.terms:
        out = out + t.coefficient * _evaluate(t.atom, ctx)
    return out


@dataclass(frozen=True)
class PresentationFile:
    """Parsed but not yet evaluated presentation file."""
    generators: Tuple[Symbol, ...]
    relators: Tuple[RelatorStatement, ...]
    class_cap: Optional[int] = None
    lie_cap: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "PresentationFile":
        """
        Parse presentation text.

        Raises:
            PresentationSyntaxError: On grammar violations, duplicate
                declarations or non-positive caps
            UndeclaredGeneratorError: When a relator uses an undeclared symbol
        """
        try:
            gens, statements = _GRAMMAR.parse_string(text, parse_all=True)
        except pp.ParseBaseException as e:
            expected = [e.msg[len("Expected "):]] if e.msg.startswith("Expected ") else []
            raise PresentationSyntaxError(e.msg, e.lineno, e.col, expected=expected) from None

        declared = {}
        for sym in gens:
            if sym.name in declared:
                raise PresentationSyntaxError(
                    f"generator '{sym.name}' declared twice", sym.line, sym.column
                )
            declared[sym.name] = sym

        relators = []
        caps = {}
        for stmt in statements:
            if isinstance(stmt, Directive):
                if stmt.keyword in caps:
                    raise PresentationSyntaxError(f"duplicate '{stmt.keyword}' directive", stmt.line, stmt.column)
                if stmt.value < 1:
                    raise PresentationSyntaxError(
                        f"'{stmt.keyword}' must be positive, got {stmt.value}", stmt.line, stmt.column
                    )
                caps[stmt.keyword] = stmt.value
                continue
            for sym in _symbols(stmt.expr):
                if sym.name not in declared:
                    raise UndeclaredGeneratorError(sym.name, sym.line, sym.column)
            relators.append(stmt)

        return cls(tuple(gens), tuple(relators), caps.get("class"), caps.get("cap"))

    @property
    def max_degree(self) -> int:
        return max((_degree(r.expr) for r in self.relators), default=1)

    def resolve_class_cap(self, cap: Optional[int] = None, default: Optional[int] = None) -> int:
        """Explicit cap, then the ``class`` directive, then ``default``, then the highest relator degree."""
        for value in (cap, self.class_cap, default):
            if value is not None:
                if value < 1:
                    raise InvalidQueryError(f"Class cap must be positive, got {value}")
                return value
        return max(self.max_degree, 1)

    def to_presentation(self, cap: Optional[int] = None, default_cap: Optional[int] = None,
                        min_lie_cap: int = 1) -> Presentation:
        """
        Evaluate into a Presentation.

        Args:
            cap: Class cap from the command line (wins over the file)
            default_cap: Class cap used when neither ``cap`` nor the file sets one
            min_lie_cap: Lower bound for the degree cap of the free Lie ring

        Returns:
            Presentation: Relators that evaluate to zero are dropped with a warning
        """
        class_cap = self.resolve_class_cap(cap, default_cap)
        lie_cap = max(class_cap, min_lie_cap, self.lie_cap or 1)
        ctx = generate_hall_basis(len(self.generators), lie_cap, [g.name for g in self.generators])
        relators = []
        for stmt in self.relators:
            vec = _evaluate(stmt.expr, ctx)
            if not vec:
                logger.warning(f"Relator on line {stmt.line} is zero and was dropped")
                continue
            relators.append(vec)
        logger.debug(
            f"Parsed {len(relators)} relators on {ctx.rank} generators",
            extra={"class_cap": class_cap, "lie_cap": lie_cap}
        )
        return Presentation(ctx, tuple(relators), class_cap)


def parse_presentation(text: str, cap: Optional[int] = None, default_cap: Optional[int] = None,
                       min_lie_cap: int = 1) -> Presentation:
    """Parse presentation text straight into a Presentation."""
    return PresentationFile.parse(text).to_presentation(cap, default_cap, min_lie_cap)


def format_presentation(pres: Presentation, lie_cap: bool = False) -> str:
    """Render a presentation in the file format; parsing the output gives back the same relators."""
    names = " ".join(g.name for g in pres.ctx.generators)
    lines = [f"gens: {names};"]
    lines.extend(f"rel: {pres.ctx.format_vec(r)};" for r in pres.relators)
    lines.append(f"class: {pres.class_cap};")
    if lie_cap and pres.ctx.cap != pres.class_cap:
        lines.append(f"cap: {pres.ctx.cap};")
    return "\n".join(lines) + "\n"


def format_relators(ctx: FreeLieContext, relators: Sequence[LieVec]) -> List[str]:
    return [ctx.format_vec(r) for r in relators]
