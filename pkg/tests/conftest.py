"""Shared systems and machines used across the suite.

The hand-built corpus mixes certified LM systems, convergent forward-closed
systems that are not LM, and systems needing the reduction transforms, so
the property tests exercise every code path. Machine encodings are added
on top by `corpus_systems`.
"""

from __future__ import annotations

import pytest

from lmtk.checker import CheckOptions, lm_verdict
from lmtk.minsky import MinskyMachine, Transition, encode, encoding_precedence
from lmtk.rewriting import Trs
from lmtk.trs_format import parse_trs

UNARY_CHAIN = """
sig: f/1 g/1 h/1
vars: x
rules:
  f(g(h(x))) -> g(x)
"""

DUPLICATING = """
sig: f/2 0/0
vars: x
rules:
  f(x, x) -> 0
"""

ROOT_OVERLAP = """
sig: f/2 i/1 g/1 b/0 c/0
vars: x
rules:
  f(x, i(x)) -> g(x)
  g(b) -> c
  f(b, i(b)) -> c
"""

ROOT_OVERLAP_TRUNCATED = """
sig: f/2 i/1 g/1 b/0 c/0
vars: x
rules:
  f(x, i(x)) -> g(x)
  g(b) -> c
"""

NEEDS_RIGHT_REDUCE = """
sig: f/1 g/1 a/0 b/0
vars: x
rules:
  f(x) -> g(a)
  g(a) -> b
  f(x) -> b
"""

NEEDS_LEFT_REDUCE = """
sig: f/1 g/1 b/0 c/0 d/0
vars: x
rules:
  g(b) -> d
  f(g(b)) -> c
  f(d) -> c
"""

# small certified-LM systems
LM_SOURCES = {
    "unary_chain": UNARY_CHAIN,
    "rename_unary": """
sig: f/1 g/1
vars: x
rules:
  f(x) -> g(x)
""",
    "rename_binary": """
sig: f/2 g/2
vars: x y
rules:
  f(x, y) -> g(x, y)
""",
    "swap_args": """
sig: f/2 g/2
vars: x y
rules:
  f(x, y) -> g(y, x)
""",
    "peel_successor": """
sig: f/1 g/1 s/1
vars: x
rules:
  f(s(x)) -> g(x)
""",
    "grow_rhs": """
sig: f/1 g/1 h/1
vars: x
rules:
  f(x) -> g(h(x))
""",
    "ground_rule": """
sig: f/1 g/1 a/0 b/0
vars: x
rules:
  f(a) -> g(b)
""",
    "two_disjoint": """
sig: f/1 g/1 p/1 q/1
vars: x
rules:
  f(x) -> g(x)
  p(x) -> q(x)
""",
    "shared_target": """
sig: f/1 g/1 p/1
vars: x
rules:
  f(x) -> g(x)
  p(x) -> g(x)
""",
    "nested_lhs": """
sig: f/1 g/1 h/1
vars: x
rules:
  h(f(x)) -> g(x)
""",
    "binary_peel": """
sig: f/2 g/2 s/1
vars: x y
rules:
  f(s(x), y) -> g(x, y)
""",
    "const_pair": """
sig: f/1 g/1 a/0
vars: x
rules:
  f(f(a)) -> g(a)
""",
    "three_disjoint": """
sig: f/1 g/1 p/1 q/1 u/1 v/1
vars: x
rules:
  f(x) -> g(x)
  p(x) -> q(x)
  u(x) -> v(x)
""",
    "double_peel": """
sig: f/1 g/1 s/1
vars: x
rules:
  f(s(s(x))) -> g(x)
""",
    "wrap_rhs": """
sig: f/1 g/1 s/1
vars: x
rules:
  f(x) -> g(s(x))
""",
}

# convergent and forward-closed, but not all LM
FC_SOURCES = {
    "root_overlap": ROOT_OVERLAP,
    "needs_right_reduce": NEEDS_RIGHT_REDUCE,
    "needs_left_reduce": NEEDS_LEFT_REDUCE,
    "erasing_rule": """
sig: f/2 g/1 c/0
vars: x y
rules:
  f(x, y) -> g(x)
""",
    "two_ground": """
sig: a/0 b/0 c/0 d/0
rules:
  a -> b
  c -> d
""",
}

TINY_MACHINE = MinskyMachine(
    ("q0", "q1", "qL"), "q0", "qL",
    (Transition("q0", 1, "+", "q1"), Transition("q1", 1, "+", "qL")))

BRANCHING_MACHINE = MinskyMachine(
    ("q0", "q1", "qL"), "q0", "qL",
    (Transition("q0", 1, "P", "q1"), Transition("q0", 1, "Z", "qL"),
     Transition("q1", 1, "-", "q0")))

SINGLE_STEP_MACHINE = MinskyMachine(
    ("q0", "qL"), "q0", "qL",
    (Transition("q0", 1, "+", "qL"),))

MACHINE_STARTS = {
    "tiny": (TINY_MACHINE, 0, 0),
    "branching": (BRANCHING_MACHINE, 1, 0),
    "single_step": (SINGLE_STEP_MACHINE, 0, 0),
}


def load(source: str) -> Trs:
    return parse_trs(source)


def corpus_systems() -> list[tuple[str, Trs, CheckOptions]]:
    """Name, system, and checker options (encodings need their precedence
    supplied; everything else is searched)."""
    out = []
    for name, src in {**LM_SOURCES, **FC_SOURCES}.items():
        out.append((name, load(src), CheckOptions()))
    for name, (machine, k, p) in MACHINE_STARTS.items():
        inst = encode(machine, k, p)
        opts = CheckOptions(precedence=encoding_precedence(machine))
        out.append((f"encoded_{name}", inst.theory, opts))
    return out


@pytest.fixture(scope="session")
def corpus():
    return corpus_systems()


@pytest.fixture(scope="session")
def certified_lm(corpus):
    """Corpus systems the checker certifies, with their reports."""
    out = []
    for name, trs, opts in corpus:
        report = lm_verdict(trs, opts)
        if report.verdict == "pass":
            out.append((name, trs, opts, report))
    return out
