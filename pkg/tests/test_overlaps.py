"""Critical pairs, superpositions, rhs closure, paramodulation."""

import functools

from lmtk.overlaps import (
    critical_pairs,
    nosup,
    paramodulation_candidates,
    rhs_closure,
    rhs_critical_pairs,
)
from lmtk.rewriting import rewrite_at
from lmtk.terms import render_term, substitute, subterm_at
from lmtk.trs_format import parse_trs

from conftest import DUPLICATING, TINY_MACHINE, UNARY_CHAIN
from lmtk.minsky import encode

NESTED = """
sig: f/1 g/1 a/0 b/0 c/0
vars: x
rules:
  f(g(x)) -> a
  g(b) -> c
"""


class TestCriticalPairs:
    def test_encoded_machine_has_none(self):
        theory = encode(TINY_MACHINE, 0, 0).theory
        assert critical_pairs(theory) == []

    def test_proper_overlap(self):
        trs = parse_trs(NESTED)
        cps = critical_pairs(trs)
        assert len(cps) == 1
        cp = cps[0]
        assert (render_term(cp.left), render_term(cp.right)) == ("f(c)", "a")
        assert cp.position == (1,)

    def test_empty_system(self):
        trs = parse_trs("sig: a/0\nrules:\n")
        assert critical_pairs(trs) == []

    def test_root_overlap_between_distinct_rules(self):
        trs = parse_trs("sig: a/0 b/0 c/0\nrules:\n  a -> b\n  a -> c\n")
        cps = critical_pairs(trs)
        rendered = {(render_term(c.left), render_term(c.right)) for c in cps}
        assert rendered == {("b", "a"), ("c", "a")} or \
            rendered == {("c", "b"), ("b", "c")}

    def test_soundness_both_sides_one_step(self):
        trs = parse_trs(NESTED)
        for cp in critical_pairs(trs):
            outer = trs.rule(cp.outer)
            inner = trs.rule(cp.inner).renamed_apart(outer.variables())
            from lmtk.terms import mgu
            sigma = mgu(subterm_at(outer.lhs, cp.position), inner.lhs)
            peak = substitute(outer.lhs, sigma)
            one = rewrite_at(trs.with_rules([trs.rule(cp.inner)]), peak,
                             cp.position)
            other = rewrite_at(trs.with_rules([outer]), peak, ())
            assert one is not None and one[0] == cp.left
            assert other is not None and other[0] == cp.right


class TestNosup:
    def test_nested_overlap(self):
        trs = parse_trs(NESTED)
        assert [render_term(u) for u in nosup(trs)] == ["f(g(b))"]

    def test_no_proper_positions(self):
        trs = parse_trs("sig: a/0 b/0\nrules:\n  a -> b\n")
        assert nosup(trs) == []

    def test_lm_system_empty(self):
        trs = parse_trs(UNARY_CHAIN)
        assert nosup(trs) == []


class TestRhsCriticalPairs:
    def test_duplicating_rule_self_pair(self):
        trs = parse_trs(DUPLICATING)
        eqs = rhs_critical_pairs(trs)
        assert [str(e) for e in eqs] == ["f(x,x) = f(x1,x1)"]

    def test_unary_chain_self_pair_collapses(self):
        # the self pairing instantiates both sides identically: no equation
        trs = parse_trs(UNARY_CHAIN)
        assert rhs_critical_pairs(trs) == []

    def test_unifiable_rhs_general_form(self):
        trs = parse_trs("""
sig: f/2 s/1
vars: x y
rules:
  f(x, s(y)) -> s(f(x, y))
  f(s(x), y) -> s(f(y, x))
""")
        eqs = rhs_critical_pairs(trs)
        assert len(eqs) == 1
        eq = eqs[0]
        # renamed-apart general form; the classic instance identifies x1, y1
        assert eq.lhs.sym.name == "f" and eq.rhs.sym.name == "f"
        assert {render_term(eq.lhs), render_term(eq.rhs)} == \
            {"f(y1,s(x1))", "f(s(x1),y1)"}

    def test_non_unifiable_rhs(self):
        trs = parse_trs("sig: a/0 b/0 c/0 d/0\nrules:\n  a -> b\n  c -> d\n")
        assert rhs_critical_pairs(trs) == []


class TestRhsClosure:
    def test_single_rule_closure_is_rule(self):
        trs = parse_trs(UNARY_CHAIN)
        eqs = rhs_closure(trs)
        assert [str(e) for e in eqs] == ["f(g(h(x))) = g(x)"]

    def test_duplicating_closure_adds_pair(self):
        trs = parse_trs(DUPLICATING)
        rendered = [str(e) for e in rhs_closure(trs)]
        assert rendered == ["f(x,x) = 0", "f(x,x) = f(x1,x1)"]

    def test_empty(self):
        trs = parse_trs("sig: a/0\nrules:\n")
        assert rhs_closure(trs) == []


class TestParamodulation:
    def test_nested_candidate(self):
        trs = parse_trs(NESTED)
        cands = paramodulation_candidates(trs)
        conclusions = {str(c.conclusion) for c in cands}
        assert "f(c) = a" in conclusions

    def test_trivial_self_inference_excluded(self):
        trs = parse_trs("sig: f/1 g/1\nvars: x\nrules:\n  f(x) -> g(x)\n")
        for cand in paramodulation_candidates(trs):
            assert not (cand.rule == cand.source and cand.side == "lhs"
                        and cand.position == ())

    def test_lm_system_has_no_candidates(self):
        trs = parse_trs(UNARY_CHAIN)
        assert paramodulation_candidates(trs) == []


@functools.lru_cache(maxsize=1)
def certified_pools():
    """Certified corpus systems with a small enumerated term pool and
    cached normal forms."""
    from conftest import corpus_systems
    from lmtk.checker import lm_verdict
    from lmtk.rewriting import enumeration_variables, nf
    from lmtk.terms import enumerate_terms
    out = []
    for name, trs, opts in corpus_systems():
        if lm_verdict(trs, opts).verdict != "pass":
            continue
        pool = []
        for t in enumerate_terms(trs.symbols,
                                 enumeration_variables(trs, 2), 3):
            pool.append(t)
            if len(pool) >= 150:
                break
        nfs = {t: nf(trs, t) for t in pool}
        out.append((name, trs, pool, nfs))
    return out


def root_step_targets(trs, s):
    """All one-step root rewrites of s, with the rule used."""
    from lmtk.terms import match_term, substitute
    out = []
    for rule in trs.rules:
        sigma = match_term(rule.lhs, s)
        if sigma is not None:
            out.append((rule, substitute(rule.rhs, sigma)))
    return out


class TestJoinabilityShape:
    """For certified systems, joinable innermost redex / irreducible-
    argument pairs with distinct roots join in exactly one of two ways:
    a direct root step, or one root step on each side to a common term."""

    def test_exactly_one_case_holds(self):
        from lmtk.rewriting import is_eps_irreducible, is_innermost_redex
        from lmtk.terms import App
        checked = 0
        seen_direct = seen_meet = False
        for name, trs, pool, nfs in certified_pools():
            redexes = [t for t in pool if isinstance(t, App)
                       and is_innermost_redex(trs, t)]
            eps_irr = [t for t in pool if isinstance(t, App)
                       and is_eps_irreducible(trs, t)]
            for s in redexes:
                for t in eps_irr:
                    if s.sym.name == t.sym.name or nfs[s] != nfs[t]:
                        continue
                    checked += 1
                    s_steps = {u for _, u in root_step_targets(trs, s)}
                    t_steps = {u for _, u in root_step_targets(trs, t)}
                    direct = t in s_steps
                    meet = bool(s_steps & t_steps)
                    assert direct != meet, f"{name}: {s} vs {t}"
                    seen_direct = seen_direct or direct
                    seen_meet = seen_meet or meet
        assert checked > 0 and seen_direct and seen_meet

    def test_unique_closure_equation_rewrites_pair(self):
        # a joinable distinct-root pair is related by exactly one closure
        # equation with that unordered root pair, applied at the root
        from lmtk.rewriting import is_eps_irreducible
        from lmtk.terms import App, match_term, substitute
        checked = 0
        for name, trs, pool, nfs in certified_pools():
            closure = rhs_closure(trs)
            eps_irr = [t for t in pool if isinstance(t, App)
                       and is_eps_irreducible(trs, t)]
            for s in eps_irr:
                for t in eps_irr:
                    if s.sym.name == t.sym.name or nfs[s] != nfs[t]:
                        continue
                    checked += 1
                    hits = set()
                    for eq in closure:
                        if eq.unordered_root_pair() != \
                                frozenset((s.sym.name, t.sym.name)):
                            continue
                        for lhs, rhs in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
                            sigma = match_term(lhs, s)
                            if sigma is not None and \
                                    substitute(rhs, sigma) == t:
                                hits.add((str(eq), str(lhs)))
                    assert len(hits) == 1, f"{name}: {s} vs {t}: {hits}"
        assert checked > 0


class TestRootPairMembership:
    def test_normalizing_across_roots_needs_a_root_pair(self):
        # a term whose normal form has a different root symbol certifies
        # that the two roots form a rule's root pair
        from lmtk.overlaps import root_pairs
        from lmtk.terms import App
        for name, trs, pool, nfs in certified_pools():
            pairs = set(root_pairs(trs))
            for t in pool:
                target = nfs[t]
                if not (isinstance(t, App) and isinstance(target, App)):
                    continue
                if t.sym.name != target.sym.name:
                    assert (t.sym.name, target.sym.name) in pairs, \
                        f"{name}: {t} -> {target}"
