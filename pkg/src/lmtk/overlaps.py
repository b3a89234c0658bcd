"""Overlap computation: critical pairs, non-overlay superpositions,
right-hand-side critical pairs, and paramodulation candidates.

All pair enumeration renames the second rule apart from the first, pairs a
rule with a renamed copy of itself where the construction calls for it,
and emits results in a fixed order so reports are reproducible. Equations
that differ only by a variable renaming or by swapping sides are treated
as the same equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .rewriting import Rule, Trs
from .terms import (
    Position,
    ROOT,
    Subst,
    Term,
    Var,
    mgu,
    positions,
    render_position,
    render_term,
    replace_at,
    substitute,
    subterm_at,
    variables_in_order,
)


@dataclass(frozen=True)
class Equation:
    """An ordered pair of terms; root-pair checks use the unordered view."""

    lhs: Term
    rhs: Term
    origin: str = ""

    def __str__(self) -> str:
        return f"{render_term(self.lhs)} = {render_term(self.rhs)}"

    def root_pair(self) -> Optional[tuple[str, str]]:
        """Directed (lhs root, rhs root); None when either side is a
        variable."""
        if isinstance(self.lhs, Var) or isinstance(self.rhs, Var):
            return None
        return (self.lhs.sym.name, self.rhs.sym.name)

    def unordered_root_pair(self) -> Optional[frozenset[str]]:
        rp = self.root_pair()
        return frozenset(rp) if rp else None


@dataclass(frozen=True)
class CriticalPair:
    """Peak results <inner-rewritten, root-rewritten> of an overlap of
    `inner` into `outer` at `position` (a non-variable position of the
    outer lhs)."""

    left: Term
    right: Term
    outer: str
    inner: str
    position: Position

    def __str__(self) -> str:
        return (f"<{render_term(self.left)}, {render_term(self.right)}> "
                f"({self.inner} into {self.outer} at {render_position(self.position)})")


def canonical_term_pair(a: Term, b: Term) -> tuple[Term, Term]:
    """Rename variables by first occurrence across the pair (v1, v2, ...)."""
    renaming: Subst = {}
    for name in variables_in_order(a) + variables_in_order(b):
        if name not in renaming:
            renaming[name] = Var(f"v{len(renaming) + 1}")
    return substitute(a, renaming), substitute(b, renaming)


def equation_key(eq: Equation) -> tuple[str, str]:
    """Canonical key identifying equations up to renaming and side swap."""
    fwd = canonical_term_pair(eq.lhs, eq.rhs)
    bwd = canonical_term_pair(eq.rhs, eq.lhs)
    k1 = (render_term(fwd[0]), render_term(fwd[1]))
    k2 = (render_term(bwd[0]), render_term(bwd[1]))
    return min(k1, k2)


def rule_key(rule: Rule) -> tuple[str, str]:
    """Canonical key identifying rules up to variable renaming."""
    lhs, rhs = canonical_term_pair(rule.lhs, rule.rhs)
    return (render_term(lhs), render_term(rhs))


def critical_pairs(trs: Trs) -> list[CriticalPair]:
    """All critical pairs between (renamed-apart) rule pairs, at
    non-variable positions of the overlapped lhs. A rule's overlap with
    its own copy at the root is the trivial one and is skipped; root
    overlaps between distinct rules are kept."""
    out: list[CriticalPair] = []
    for outer in trs.rules:
        for inner in trs.rules:
            inner_r = inner.renamed_apart(outer.variables())
            for p in sorted(positions(outer.lhs, nonvar_only=True)):
                if p == ROOT and inner.label == outer.label:
                    continue
                sigma = mgu(subterm_at(outer.lhs, p), inner_r.lhs)
                if sigma is None:
                    continue
                left = substitute(replace_at(outer.lhs, p, inner_r.rhs), sigma)
                right = substitute(outer.rhs, sigma)
                out.append(CriticalPair(left, right, outer.label, inner.label, p))
    return out


def nosup(trs: Trs) -> list[Term]:
    """Superposition terms from unifying one lhs into a proper non-variable
    position of another lhs (self-pairs via a renamed copy included)."""
    seen: set[str] = set()
    out: list[Term] = []
    for outer in trs.rules:
        for inner in trs.rules:
            inner_r = inner.renamed_apart(outer.variables())
            for p in sorted(positions(outer.lhs, nonvar_only=True)):
                if p == ROOT:
                    continue
                sigma = mgu(subterm_at(outer.lhs, p), inner_r.lhs)
                if sigma is None:
                    continue
                t = substitute(replace_at(outer.lhs, p, inner_r.lhs), sigma)
                key = render_term(canonical_term_pair(t, t)[0])
                if key not in seen:
                    seen.add(key)
                    out.append(t)
    return out


def rhs_critical_pairs(trs: Trs) -> list[Equation]:
    """Equations sigma(l1) = sigma(l2) from unifying the right-hand sides
    of two rules (renamed apart; a rule may pair with its own copy). The
    inference fires only when the two instantiated left sides differ as
    literal terms, which silently drops the no-op self-pairings."""
    out: list[Equation] = []
    seen: set[tuple[str, str]] = set()
    for r1 in trs.rules:
        for r2 in trs.rules:
            r2r = r2.renamed_apart(r1.variables())
            sigma = mgu(r1.rhs, r2r.rhs)
            if sigma is None:
                continue
            l1 = substitute(r1.lhs, sigma)
            l2 = substitute(r2r.lhs, sigma)
            if l1 == l2:
                continue
            eq = Equation(l1, l2, origin=f"rhs-cp({r1.label},{r2.label})")
            key = equation_key(eq)
            if key not in seen:
                seen.add(key)
                out.append(eq)
    return out


def rhs_closure(trs: Trs) -> list[Equation]:
    """The rules read as equations plus one layer of right-hand-side
    critical pair conclusions (the definition does not iterate)."""
    out = [Equation(r.lhs, r.rhs, origin=r.label) for r in trs.rules]
    seen = {equation_key(eq) for eq in out}
    for eq in rhs_critical_pairs(trs):
        key = equation_key(eq)
        if key not in seen:
            seen.add(key)
            out.append(eq)
    return out


@dataclass(frozen=True)
class ParamodCandidate:
    """A paramodulation inference: `rule` rewrites the subterm at
    `position` inside one side of the equation derived from `source`."""

    conclusion: Equation
    source: str      # label of the rule whose equation was rewritten into
    side: str        # 'lhs' or 'rhs': which side of that equation
    rule: str        # label of the rule used left-to-right
    position: Position
    subst_items: tuple[tuple[str, Term], ...]

    def __str__(self) -> str:
        return (f"{self.conclusion}  [{self.rule} into {self.side} of "
                f"{self.source} at {render_position(self.position)}]")


def paramodulation_candidates(trs: Trs) -> list[ParamodCandidate]:
    """All inferences of a rule into either side of a rule-equation at a
    non-variable position. The only exclusion is a rule rewriting the
    root of its own lhs (that inference degenerates to the rule itself)."""
    out: list[ParamodCandidate] = []
    for src in trs.rules:
        for side_name in ("lhs", "rhs"):
            u = getattr(src, side_name)
            v = src.rhs if side_name == "lhs" else src.lhs
            for rule in trs.rules:
                rule_r = rule.renamed_apart(src.variables())
                for p in sorted(positions(u, nonvar_only=True)):
                    if p == ROOT and side_name == "lhs" and rule.label == src.label:
                        continue
                    sigma = mgu(rule_r.lhs, subterm_at(u, p))
                    if sigma is None:
                        continue
                    new_side = substitute(replace_at(u, p, rule_r.rhs), sigma)
                    other = substitute(v, sigma)
                    conclusion = Equation(
                        new_side, other,
                        origin=f"paramod({rule.label}->{src.label}.{side_name})")
                    out.append(ParamodCandidate(
                        conclusion, src.label, side_name, rule.label, p,
                        tuple(sorted(sigma.items()))))
    return out


def root_pairs(trs: Trs) -> list[tuple[str, str]]:
    """Directed root pairs of the rules, in rule order (variables cannot
    appear at rule roots on the left; a variable rhs yields no pair)."""
    out = []
    for r in trs.rules:
        eq = Equation(r.lhs, r.rhs)
        rp = eq.root_pair()
        if rp is not None:
            out.append(rp)
    return out
