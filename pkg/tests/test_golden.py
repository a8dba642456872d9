"""Frozen SMT-LIB output.  Run this file as a script to regenerate after a reviewed change."""

import os
import re
import subprocess
import sys

import pytest

from sumhorn import corpus
from sumhorn.chc.smtlib import emit
from sumhorn.chc.solver import executable
from sumhorn.chc.transform import relationalize
from sumhorn.lang import load
from sumhorn.vcgen import encode

GOLDEN_DIR = os.path.join(os.path.dirname(corpus.__file__), "..", "chc", "golden")
CASES = [
    ("euclid", "inv"), ("euclid", "sum"), ("euclid", "combined"),
    ("countdown", "inv"), ("break_exit", "sum"), ("array_copy", "inv"),
]


def render(name, enc, form):
    sys_ = encode(load(corpus.source(name)), enc)
    if form == "horn":
        sys_ = relationalize(sys_)
    return emit(sys_).text


def golden_path(name, enc, form):
    suffix = ".horn.smt2" if form == "horn" else ".smt2"
    return os.path.normpath(os.path.join(GOLDEN_DIR, f"{name}_{enc}{suffix}"))


ALL = [(n, e, f) for n, e in CASES for f in ("axioms", "horn")]


@pytest.mark.parametrize("name,enc,form", ALL)
def test_matches_golden(name, enc, form):
    with open(golden_path(name, enc, form)) as fh:
        assert render(name, enc, form) == fh.read()


@pytest.mark.parametrize("name,enc,form", ALL[:2])
def test_stable_across_runs(name, enc, form):
    assert render(name, enc, form) == render(name, enc, form)


def test_stable_across_processes():
    code = ("from sumhorn import corpus; from sumhorn.lang import load; from sumhorn.vcgen import encode;"
            "from sumhorn.chc.smtlib import emit;"
            "print(emit(encode(load(corpus.source('nested_sum')), 'combined')).text, end='')")
    outs = {subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                           env={**os.environ, "PYTHONHASHSEED": str(seed)}).stdout for seed in (1, 2)}
    assert len(outs) == 1
    assert outs.pop() == render("nested_sum", "combined", "axioms")


def z3_parse_errors(path):
    # declarations and assertions only: any error left is a syntax or sort error
    text = "".join(l for l in open(path).readlines() if l.strip() not in ("(check-sat)", "(get-model)"))
    out = subprocess.run([executable("z3"), "-in"], input=text, capture_output=True, text=True).stdout
    return [l for l in out.splitlines() if l.startswith("(error")]


@pytest.mark.skipif(executable("z3") is None, reason="z3 not installed")
@pytest.mark.parametrize("name,enc,form", ALL)
def test_z3_accepts_golden(name, enc, form):
    assert z3_parse_errors(golden_path(name, enc, form)) == []


def test_golden_has_no_spec_axioms_in_horn_form():
    text = open(golden_path("euclid", "inv", "horn")).read()
    assert "declare-fun gcd_graph" in text
    assert not re.search(r"\(gcd [^_]", text)


if __name__ == "__main__":
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    for case in ALL:
        with open(golden_path(*case), "w") as fh:
            fh.write(render(*case))
        print("wrote", golden_path(*case))
