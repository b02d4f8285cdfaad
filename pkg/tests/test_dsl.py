"""Model-language parsing, printing, and elaboration."""
from fractions import Fraction
from importlib import resources

import pytest

from markovspan.dsl import (Diagnostic, ElaborationError, ModelSyntaxError,
                            Series, elaborate, parse_model, print_model)
from markovspan.models import dining, dining_initial_state

F = Fraction


def bundled_models():
    root = resources.files("markovspan") / "data"
    return sorted((p.name, p.read_text()) for p in root.iterdir()
                  if p.name.endswith(".mkv"))


def bundled(name):
    return (resources.files("markovspan") / "data" / name).read_text()


class TestParse:
    def test_phil_fork_document(self):
        doc = parse_model(bundled("phil_fork.mkv"), "phil_fork.mkv")
        assert len(doc.alphabets) == 1
        assert sorted(doc.automata) == ["Fork", "Phil"]
        assert list(doc.systems) == ["DF2"]
        phil = doc.automata["Phil"]
        assert phil.states == ("1", "2", "3", "4")
        assert len(phil.transitions) == 8

    def test_missing_eps(self):
        with pytest.raises(ModelSyntaxError) as exc:
            parse_model("alphabet A = { t, r };", "bad.mkv")
        diag = exc.value.diagnostics[0]
        assert "eps" in diag.message
        assert (diag.file, diag.line) == ("bad.mkv", 1)

    def test_duplicate_transition(self):
        text = """
alphabet A = { eps };
automaton Q [A, A] {
  states: 1;
  1 -(eps|eps)-> 1 : 1/2;
  1 -(eps|eps)-> 1 : 1/2;
}
"""
        with pytest.raises(ModelSyntaxError) as exc:
            parse_model(text, "dup.mkv")
        assert "duplicate transition" in str(exc.value)
        assert ":6:" in str(exc.value)

    def test_unknown_reference(self):
        with pytest.raises(ModelSyntaxError) as exc:
            parse_model("alphabet A = { eps };\nsystem S = Ghost;", "m.mkv")
        assert "unknown automaton 'Ghost'" in str(exc.value)

    def test_decimal_weights_are_exact(self):
        text = """
alphabet A = { eps };
automaton Q [A, A] {
  states: 1;
  1 -(eps|eps)-> 1 : 0.1;
}
"""
        doc = parse_model(text)
        assert doc.automata["Q"].transitions[0].weight == F(1, 10)

    def test_precedence(self):
        text = ("alphabet A = { eps };\n"
                "automaton Q [A, A] { states: 1; 1 -(eps|eps)-> 1 : 1; }\n"
                "system S = Q . Q x Q^2;\n")
        doc = parse_model(text)
        expr = doc.systems["S"].expr
        # '.' binds loosest, '^' tightest
        assert isinstance(expr, Series)
        assert type(expr.rhs).__name__ == "Parallel"
        assert type(expr.rhs.rhs).__name__ == "Power"

    def test_every_error_has_position(self):
        for text in ["alphabet", "alphabet A = { eps }", "system = Q;",
                     "automaton Q [A] { }", "alphabet A = { eps, eps };"]:
            with pytest.raises(ModelSyntaxError) as exc:
                parse_model(text, "frag.mkv")
            diag = exc.value.diagnostics[0]
            assert diag.line >= 1 and diag.col >= 1
            assert str(diag).startswith("frag.mkv:")


class TestPrint:
    @pytest.mark.parametrize("name,text", bundled_models())
    def test_round_trip(self, name, text):
        doc = parse_model(text, name)
        printed = print_model(doc)
        assert parse_model(printed, name) == doc

    @pytest.mark.parametrize("name,text", bundled_models())
    def test_canonical_idempotent(self, name, text):
        once = print_model(parse_model(text, name))
        assert print_model(parse_model(once, name)) == once

    def test_fractions_in_lowest_terms(self):
        text = ("alphabet A = { eps };\n"
                "automaton Q [A, A] { states: 1; 1 -(eps|eps)-> 1 : 2/4; }\n")
        assert "1/2" in print_model(parse_model(text))


class TestElaborate:
    def test_df2_matches_programmatic_automaton(self):
        doc = parse_model(bundled("phil_fork.mkv"))
        df2 = elaborate(doc, "DF2", debug=True)
        assert df2.equals(dining(2))
        sub, _ = df2.reach(dining_initial_state(2))
        assert len(sub.states) == 8

    def test_self_series_type_checks(self):
        text = bundled("phil_fork.mkv") + "\nsystem S = Phil . Phil;\n"
        auto = elaborate(parse_model(text), "S")
        assert len(auto.states) == 16

    def test_interface_mismatch_reports_span(self):
        text = """
alphabet A = { eps, t };
alphabet B = { eps };
automaton P [A, A] { states: 1; 1 -(eps|eps)-> 1 : 1/2; 1 -(t|t)-> 1 : 1/2; }
automaton Q [B, B] { states: 1; 1 -(eps|eps)-> 1 : 1; }
system S = P . Q;
"""
        with pytest.raises(ElaborationError) as exc:
            elaborate(parse_model(text, "mm.mkv"), "S")
        assert "series interface mismatch" in str(exc.value)
        assert "mm.mkv:6:" in str(exc.value)

    def test_non_markov_component(self):
        text = """
alphabet A = { eps };
automaton Q [A, A] { states: 1; 1 -(eps|eps)-> 1 : 2; }
system S = Q;
"""
        with pytest.raises(ElaborationError) as exc:
            elaborate(parse_model(text), "S")
        assert "not Markov" in str(exc.value)

    def test_oversized_power(self):
        text = bundled("phil_fork.mkv") + "\nsystem Big = Phil^5;\n"
        with pytest.raises(ElaborationError) as exc:
            elaborate(parse_model(text), "Big")
        assert "power alphabet" in str(exc.value)

    def test_stepwise_equals_late_normalization(self):
        for name, text in bundled_models():
            doc = parse_model(text, name)
            for system in doc.systems:
                # debug mode asserts chain equality internally
                elaborate(doc, system, debug=True)

    def test_float_mode(self):
        doc = parse_model(bundled("phil_fork.mkv"))
        df2 = elaborate(doc, "DF2", mode="float")
        assert df2.mode == "float"
        assert df2.is_markov()


def test_diagnostic_format():
    d = Diagnostic("m.mkv", 3, 7, "error", "boom")
    assert str(d) == "m.mkv:3:7: error: boom"
