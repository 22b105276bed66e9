"""
Tests for the presentation file grammar.
"""
import logging
import os
import unittest

import pytest

from src.cli.parser import PresentationFile, format_presentation, format_relators, parse_presentation
from src.counterexample import counterexample_presentation
from src.utils.error_handling import (
    InvalidQueryError,
    PresentationSyntaxError,
    UndeclaredGeneratorError,
)


class TestExpressions(unittest.TestCase):
    """Evaluation of relator expressions on two generators x, y."""

    def evaluate(self, expr):
        pres = parse_presentation(f"gens: x y;\nrel: {expr};\nclass: 3;")
        return pres.ctx, pres.relators[0]

    def test_left_normed_brackets(self):
        ctx, vec = self.evaluate("[x,y,y] - [y,x]")
        self.assertEqual(vec, -ctx.vec(4) - ctx.vec(2))
        ctx, vec = self.evaluate("[[x,y],x]")
        self.assertEqual(vec, ctx.left_normed([1, 2, 1]))

    def test_coefficients(self):
        ctx, vec = self.evaluate("2*x - 3 y")
        self.assertEqual(vec, 2 * ctx.generator(1) - 3 * ctx.generator(2))
        ctx, vec = self.evaluate("-x")
        self.assertEqual(vec, -ctx.generator(1))

    def test_combinations_inside_brackets(self):
        ctx, vec = self.evaluate("[x + y, y]")
        self.assertEqual(vec, -ctx.vec(2))
        ctx, vec = self.evaluate("[2x, 3[y,x]]")
        self.assertEqual(vec, -6 * ctx.vec(3))


def test_comments_and_line_breaks():
    text = """
    # two generators
    gens: a, b;   # commas are allowed
    rel: 2*a
         + [b,a];
    """
    pres = parse_presentation(text)
    assert [g.name for g in pres.ctx.generators] == ["a", "b"]
    assert pres.ctx.format_vec(pres.relators[0]) == "2*a + [b,a]"
    assert pres.class_cap == 2


class TestDirectives(unittest.TestCase):

    TEXT = "gens: x y;\nrel: 4x;\nclass: 2;\ncap: 4;\n"

    def test_directives_are_read(self):
        parsed = PresentationFile.parse(self.TEXT)
        self.assertEqual(parsed.class_cap, 2)
        self.assertEqual(parsed.lie_cap, 4)
        pres = parsed.to_presentation()
        self.assertEqual(pres.class_cap, 2)
        self.assertEqual(pres.ctx.cap, 4)

    def test_command_line_cap_wins(self):
        parsed = PresentationFile.parse(self.TEXT)
        self.assertEqual(parsed.resolve_class_cap(3), 3)
        self.assertEqual(parsed.resolve_class_cap(None, 5), 2)
        with self.assertRaises(InvalidQueryError):
            parsed.resolve_class_cap(0)

    def test_default_and_relator_degree(self):
        parsed = PresentationFile.parse("gens: x y;\nrel: [x,y,x];")
        self.assertEqual(parsed.max_degree, 3)
        self.assertEqual(parsed.resolve_class_cap(), 3)
        self.assertEqual(parsed.resolve_class_cap(None, 4), 4)

    def test_min_lie_cap(self):
        pres = parse_presentation("gens: x y;", cap=2, min_lie_cap=5)
        self.assertEqual(pres.class_cap, 2)
        self.assertEqual(pres.ctx.cap, 5)


@pytest.mark.parametrize("text,line", [
    ("gens: x y;\nrel: [x y];\n", 2),
    ("rel: x;\n", 1),
    ("gens: x y;\nrel: x;\nclass 3;\n", 3),
    ("gens: rel;\n", 1),
])
def test_syntax_errors_report_line(text, line):
    with pytest.raises(PresentationSyntaxError) as info:
        PresentationFile.parse(text)
    assert info.value.line == line
    assert info.value.exit_code == 2


@pytest.mark.parametrize("text", [
    "gens: x x;",
    "gens: x;\nclass: 2;\nclass: 3;",
    "gens: x;\nclass: 0;",
])
def test_rejected_declarations(text):
    with pytest.raises(PresentationSyntaxError):
        PresentationFile.parse(text)


def test_undeclared_generator_position():
    with pytest.raises(UndeclaredGeneratorError) as info:
        PresentationFile.parse("gens: x y;\nrel: x + z;")
    assert (info.value.name, info.value.line, info.value.column) == ("z", 2, 10)


def test_zero_relator_is_dropped(caplog):
    with caplog.at_level(logging.WARNING):
        pres = parse_presentation("gens: x y;\nrel: [x,x];\nrel: x;")
    assert len(pres.relators) == 1
    assert "line 2" in caplog.text


def test_counterexample_file(presentations_dir):
    with open(os.path.join(presentations_dir, "counterexample.lie")) as f:
        parsed = parse_presentation(f.read(), default_cap=4)
    builtin = counterexample_presentation()
    assert format_relators(parsed.ctx, parsed.relators) == format_relators(builtin.ctx, builtin.relators)
    assert parsed.class_cap == 4


def test_format_presentation_parses_back():
    pres = counterexample_presentation(class_cap=3)
    text = format_presentation(pres, lie_cap=True)
    assert text.startswith("gens: x1 x2 x3 x4;\n")
    assert "cap: 4;" in text
    again = parse_presentation(text)
    assert again.class_cap == 3
    assert again.ctx.cap == 4
    assert format_relators(again.ctx, again.relators) == format_relators(pres.ctx, pres.relators)


def test_single_line_presentation():
    pres = parse_presentation("gens: x; rel: 4*x;")
    assert pres.rank == 1
    assert pres.relators == (4 * pres.ctx.generator(1),)
