import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from todacalc.script import (
    ScriptError,
    format_script,
    load_script,
    parse_script,
    run_script,
    shipped_scripts,
)

TERMS = ["eta_11.kappa_12", "nu_6", "2*sigma_9", "sigma'_9", "eta_13 + nu_13", "0_9^(8)"]
SPECS = ["{[eta_13, sigma_13]; [sigma_14; eta_20]; [4*zeta_21]}_0", "{[nu_6]; [eta_7]; [eta_8]}_1"]


@st.composite
def scripts(draw):
    lines, names = [], []

    def value(depth=0):
        choices = ["term", "spec", "int"] + (["name"] if names else []) + (["call"] if depth < 2 else [])
        kind = draw(st.sampled_from(choices))
        if kind == "term":
            return draw(st.sampled_from(TERMS))
        if kind == "spec":
            return draw(st.sampled_from(SPECS))
        if kind == "int":
            return str(draw(st.integers(0, 99)))
        if kind == "name":
            return draw(st.sampled_from(names))
        f = draw(st.sampled_from(["indfull", "span", "pi", "rewrite"]))
        arity = {"indfull": 1, "span": draw(st.integers(0, 3)), "pi": 2, "rewrite": 2}[f]
        return f"{f}({', '.join(value(depth + 1) for _ in range(arity))})"

    for i in range(draw(st.integers(0, 8))):
        kind = draw(st.sampled_from(["let", "equal", "zero", "order", "member", "compute", "echo", "comment"]))
        if kind == "let":
            name = f"X{i}"
            lines.append(f"let {name} = {value()}")
            names.append(name)
        elif kind == "equal":
            lines.append(f"assert equal {value()} = {value()}")
        elif kind == "zero":
            lines.append(f"assert zero {value()}")
        elif kind == "order":
            lines.append(f"assert order {value()} = {draw(st.integers(1, 64))}")
        elif kind == "member":
            lines.append(f"assert member {value()} in {value()}")
        elif kind == "compute":
            lines.append(f"compute {value()}")
        elif kind == "echo":
            lines.append("echo " + draw(st.text("abc =+#()", max_size=12)).strip())
        else:
            lines.append("# note")
    return "\n".join(lines)


@settings(max_examples=150)
@given(scripts())
def test_format_parse_roundtrip(text):
    once = parse_script(text)
    again = parse_script(format_script(once))
    assert again.keys() == once.keys()


def test_empty_script(db):
    s = parse_script("")
    assert s.steps == ()
    rep = run_script(s, db)
    assert rep.ok and rep.summary() == "PASS 0/0"


@pytest.mark.parametrize(
    "text, line, msg",
    [
        ("let A = nu_6\nlet A = eta_7", 2, "already bound"),
        ("assert zero B", 1, "not bound"),
        ("\n\nfrobnicate x", 3, "unknown statement"),
        ("assert bigger A", 1, "unknown assertion"),
        ("assert order nu_6 = x", 1, "integer"),
        ("let pi = 3", 1, "function name"),
    ],
)
def test_static_errors(text, line, msg):
    with pytest.raises(ScriptError, match=msg) as exc:
        parse_script(text)
    assert exc.value.line == line


def test_stops_at_first_failure(db):
    text = "assert zero nu_6\nassert zero nu_6.eta_9\nassert zero eta_6"
    rep = run_script(parse_script(text), db)
    assert rep.failed_at == 1 and len(rep.results) == 1
    assert rep.summary() == "FAIL at step 1"


def test_keep_going(db):
    text = "assert zero nu_6\nassert zero nu_6.eta_9\nassert zero eta_6"
    rep = run_script(parse_script(text), db, keep_going=True)
    assert rep.failed_at == 1
    assert [r.ok for r in rep.results] == [False, True, False]
    assert rep.passed == 1 and rep.asserts == 3


def test_runtime_error_is_a_failure(db):
    rep = run_script(parse_script("let R = {[eta_13, sigma_13]; [sigma_14; eta_20]; [4*zeta_21]}_0\ncompute ind(R)"), db)
    assert not rep.ok
    assert "Prop 3.2 inapplicable: n = 0" in rep.results[-1].output


def test_index_zero_output_is_labelled(db):
    rep = run_script(parse_script("let R = {[eta_13, sigma_13]; [sigma_14; eta_20]; [4*zeta_21]}_0\ncompute indfull(R)"), db)
    assert rep.ok
    assert rep.results[-1].output.endswith("[full computation (Eq. 2.2a)]")


@pytest.mark.parametrize("name, total", [("example_3_3.td", 8), ("prop_5_1.td", 20)])
def test_shipped_scripts_pass(db, name, total):
    rep = run_script(load_script(shipped_scripts()[name]), db)
    assert rep.ok, rep.results[-1].output
    assert rep.summary() == f"PASS {total}/{total}"
