"""Payoff expression trees and their parser.

The grammar covers every payoff and edge-cost function the toolkit handles:

    expr  := term (('+' | '-') term)*
    term  := factor ('*' factor)*
    factor:= NUMBER | '-' factor | '(' expr ')'
           | 'tau' '(' NAME ')' | 'x'
           | 'min' '(' expr ',' expr ')' | 'max' '(' expr ',' expr ')'
           | 'piecewise' '(' ref ';' NUMBER ':' expr (',' NUMBER ':' expr)* ')'
    ref   := 'tau' '(' NAME ')' | 'x'

``tau(a)`` is the population share on action ``a``; edge-cost expressions use
the single load variable ``x`` instead.  Piecewise pieces are half-open:
``piecewise(v; b1: e1, ..., bn: en)`` evaluates e_i on [b_{i-1}, b_i) with
b_0 = 0, the last piece closed at b_n = 1.  Evaluation is vectorized: input
points have shape (..., K) and the result has the batch shape.

Coordinate references are stored as sums of coordinate index sets so that an
edge-cost expression in ``x`` can be re-based onto the sum of path shares
crossing that edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .simplex import beta_marginal_expectation


class ExprError(ValueError):
    """Malformed expression text or an expression invariant violation."""


# ---------------------------------------------------------------------------
# AST


class Expr:
    def eval(self, pts: np.ndarray):
        raise NotImplementedError

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1)
        out = self.eval(pts)
        return np.broadcast_to(np.asarray(out, dtype=float), pts.shape[:-1]).copy()

    def children(self) -> tuple["Expr", ...]:
        return ()


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def eval(self, pts):
        return self.value


@dataclass(frozen=True)
class CoordSum(Expr):
    """Sum of a set of coordinates; a single coordinate is a singleton set."""

    indices: tuple[int, ...]

    def eval(self, pts):
        return pts[..., list(self.indices)].sum(axis=-1)


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def eval(self, pts):
        return np.add(self.left.eval(pts), self.right.eval(pts))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def eval(self, pts):
        return np.subtract(self.left.eval(pts), self.right.eval(pts))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def eval(self, pts):
        return np.multiply(self.left.eval(pts), self.right.eval(pts))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Min(Expr):
    left: Expr
    right: Expr

    def eval(self, pts):
        return np.minimum(self.left.eval(pts), self.right.eval(pts))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Max(Expr):
    left: Expr
    right: Expr

    def eval(self, pts):
        return np.maximum(self.left.eval(pts), self.right.eval(pts))

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Piecewise(Expr):
    arg: CoordSum
    bounds: tuple[float, ...]
    pieces: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.bounds) != len(self.pieces):
            raise ExprError("piecewise needs one bound per piece")
        if any(b2 <= b1 for b1, b2 in zip(self.bounds, self.bounds[1:])):
            raise ExprError("piecewise bounds must be strictly increasing")
        if not (0.0 < self.bounds[0] <= 1.0) or abs(self.bounds[-1] - 1.0) > 1e-9:
            raise ExprError("piecewise bounds must lie in (0, 1] and end at 1")

    def eval(self, pts):
        v = self.arg.eval(pts)
        v = np.asarray(v, dtype=float)
        branch_vals = [np.broadcast_to(np.asarray(p.eval(pts), dtype=float), v.shape) for p in self.pieces]
        conds = [v < b for b in self.bounds[:-1]]
        return np.select(conds, branch_vals[:-1], default=branch_vals[-1])

    def children(self):
        return self.pieces


def negate(e: Expr) -> Expr:
    return Sub(Const(0.0), e)


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[()+\-*,;:]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprError(f"cannot tokenize {text[pos:pos + 12]!r} at offset {pos}")
        pos = m.end()
        for kind in ("num", "name", "op"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val))
                break
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, text: str, coords: Mapping[str, int], scalar_var: str | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coords = coords
        self.scalar_var = scalar_var

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        k, v = self.tokens[self.pos]
        if (kind is not None and k != kind) or (value is not None and v != value):
            raise ExprError(
                f"expected {value or kind}, found {v!r} in {self.text!r}"
            )
        self.pos += 1
        return v

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise ExprError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take("op")
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek() == ("op", "*"):
            self.take("op", "*")
            e = Mul(e, self.factor())
        return e

    def coord_ref(self) -> CoordSum:
        kind, val = self.peek()
        if kind == "name" and val == "tau":
            self.take()
            self.take("op", "(")
            name = self.take("name")
            self.take("op", ")")
            if name not in self.coords:
                raise ExprError(f"unknown action {name!r} in {self.text!r}")
            return CoordSum((self.coords[name],))
        if kind == "name" and self.scalar_var is not None and val == self.scalar_var:
            self.take()
            return CoordSum((0,))
        raise ExprError(f"expected a coordinate reference, found {val!r}")

    def factor(self) -> Expr:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Const(float(val))
        if kind == "op" and val == "-":
            self.take()
            return negate(self.factor())
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        if kind == "name":
            if val in ("min", "max"):
                self.take()
                self.take("op", "(")
                a = self.expr()
                self.take("op", ",")
                b = self.expr()
                self.take("op", ")")
                return Min(a, b) if val == "min" else Max(a, b)
            if val == "piecewise":
                self.take()
                self.take("op", "(")
                ref = self.coord_ref()
                self.take("op", ";")
                bounds, pieces = [], []
                while True:
                    bounds.append(float(self.take("num")))
                    self.take("op", ":")
                    pieces.append(self.expr())
                    if self.peek() == ("op", ","):
                        self.take()
                        continue
                    break
                self.take("op", ")")
                return Piecewise(ref, tuple(bounds), tuple(pieces))
            if val == "tau" or (self.scalar_var is not None and val == self.scalar_var):
                return self.coord_ref()
        raise ExprError(f"unexpected token {val!r} in {self.text!r}")


def parse_payoff(text: str, actions: Sequence[str]) -> Expr:
    """Parse a payoff expression over tau(action) references."""
    coords = {name: k for k, name in enumerate(actions)}
    return _Parser(text, coords, None).parse()


def parse_cost(text: str) -> Expr:
    """Parse an edge-cost expression in the single load variable x."""
    return _Parser(text, {}, "x").parse()


# ---------------------------------------------------------------------------
# Structural analysis


def coord_groups(e: Expr) -> set[frozenset[int]]:
    """Index sets of all CoordSum nodes in the tree."""
    if isinstance(e, CoordSum):
        return {frozenset(e.indices)}
    if isinstance(e, Piecewise):
        out = coord_groups(e.arg)
        for p in e.pieces:
            out |= coord_groups(p)
        return out
    out: set[frozenset[int]] = set()
    for c in e.children():
        out |= coord_groups(c)
    return out


def remap_groups(e: Expr, mapping: Mapping[frozenset[int], tuple[int, ...]]) -> Expr:
    """Rewrite every CoordSum index set through ``mapping``."""
    if isinstance(e, Const):
        return e
    if isinstance(e, CoordSum):
        key = frozenset(e.indices)
        if key not in mapping:
            raise ExprError(f"no remapping for coordinate group {sorted(key)}")
        return CoordSum(tuple(mapping[key]))
    if isinstance(e, Piecewise):
        arg = remap_groups(e.arg, mapping)
        return Piecewise(arg, e.bounds, tuple(remap_groups(p, mapping) for p in e.pieces))
    ctor = type(e)
    return ctor(*(remap_groups(c, mapping) for c in e.children()))  # type: ignore[arg-type]


def to_univariate(e: Expr) -> Expr:
    """Re-base an expression whose CoordSums all share one index set onto a
    single scalar coordinate, so it can be evaluated as f(x) on [0, 1]."""
    groups = coord_groups(e)
    if len(groups) > 1:
        raise ExprError(f"expression is not univariate: groups {sorted(map(sorted, groups))}")
    if not groups:
        return e
    (g,) = groups
    return remap_groups(e, {g: (0,)})


def eval_univariate(e: Expr, x) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    return to_univariate(e)(xs[:, None])


def constant_value(e: Expr) -> float | None:
    """Value of an expression with no coordinate references, else None."""
    if coord_groups(e):
        return None
    return float(e(np.zeros((1, 1)))[0])


def declared_breakpoints(e: Expr) -> set[float]:
    """Interior piecewise bounds appearing anywhere in the tree."""
    out: set[float] = set()
    if isinstance(e, Piecewise):
        out |= {b for b in e.bounds[:-1]}
        for p in e.pieces:
            out |= declared_breakpoints(p)
        return out
    for c in e.children():
        out |= declared_breakpoints(c)
    return out


def univariate_kinks(e: Expr, grid: int = 1024, refine: int = 60) -> list[float]:
    """Breakpoints of a univariate expression on [0, 1].

    Piecewise bounds are taken verbatim; min/max kinks are located by a sign
    scan of (left - right) refined with bisection.
    """
    u = to_univariate(e)
    cuts: set[float] = {b for b in declared_breakpoints(u) if 0.0 < b < 1.0}

    def scan(node: Expr):
        if isinstance(node, (Min, Max)):
            diff_l, diff_r = node.left, node.right
            xs = np.linspace(0.0, 1.0, grid + 1)
            d = eval_univariate(Sub(diff_l, diff_r), xs)
            sign = np.sign(d)
            for i in range(grid):
                if sign[i] == 0.0:
                    if 0.0 < xs[i] < 1.0:
                        cuts.add(float(xs[i]))
                    continue
                if sign[i] * sign[i + 1] < 0.0:
                    lo, hi = xs[i], xs[i + 1]
                    for _ in range(refine):
                        mid = 0.5 * (lo + hi)
                        dm = float(eval_univariate(Sub(diff_l, diff_r), mid)[0])
                        if dm == 0.0:
                            lo = hi = mid
                            break
                        if np.sign(dm) == sign[i]:
                            lo = mid
                        else:
                            hi = mid
                    c = 0.5 * (lo + hi)
                    if 0.0 < c < 1.0:
                        cuts.add(float(c))
        for ch in node.children():
            scan(ch)
        if isinstance(node, Piecewise):
            scan(node.arg)

    scan(u)
    return sorted(cuts)


def _conditional_points(K: int, group: frozenset[int], value: float, n: int, seed: int) -> np.ndarray:
    """Simplex points whose coordinates in ``group`` sum to ``value``."""
    rng = np.random.default_rng(seed)
    k = len(group)
    pts = np.zeros((n, K))
    inside = sorted(group)
    outside = [i for i in range(K) if i not in group]
    if k:
        w = rng.dirichlet(np.ones(k), size=n) if k > 1 else np.ones((n, 1))
        pts[:, inside] = value * w
    if outside:
        w = rng.dirichlet(np.ones(len(outside)), size=n) if len(outside) > 1 else np.ones((n, 1))
        pts[:, outside] = (1.0 - value) * w
    return pts


def validate_continuity(e: Expr, K: int, tol: float = 1e-9, probes: int = 24, seed: int = 0) -> None:
    """Check every piecewise node agrees across adjacent branches at each
    interior breakpoint (evaluated with the branching coordinate pinned)."""

    def visit(node: Expr):
        if isinstance(node, Piecewise):
            group = frozenset(node.arg.indices)
            for i, b in enumerate(node.bounds[:-1]):
                if not 0.0 < b < 1.0:
                    continue
                pts = _conditional_points(K, group, b, probes, seed)
                left = node.pieces[i](pts)
                right = node.pieces[i + 1](pts)
                gap = float(np.max(np.abs(left - right)))
                if gap > tol:
                    raise ExprError(
                        f"discontinuity {gap:.3e} at breakpoint {b} of a piecewise expression"
                    )
        for ch in node.children():
            visit(ch)

    visit(e)


# ---------------------------------------------------------------------------
# Exact integration against the uniform distribution on the simplex


def uniform_expectation(e: Expr, K: int, nodes: int = 64) -> float | None:
    """Exact expectation of ``e`` under the flat Dirichlet on the K-simplex,
    or None when the structure does not reduce.

    Reductions used: linearity over +/- and constant scaling, E[sum of k
    coordinates] = k/K, and any subtree whose coordinate references all share
    one index set S is a univariate function of a Beta(|S|, K-|S|) variable
    (integrated by segment quadrature, splitting at declared and detected
    kinks).
    """
    cv = constant_value(e)
    if cv is not None:
        return cv
    groups = coord_groups(e)
    if len(groups) == 1:
        (g,) = groups
        k = len(g)
        if k == K:
            return _eval_at_full_mass(e, K)
        u = to_univariate(e)
        cuts = univariate_kinks(u)
        return beta_marginal_expectation(lambda x: eval_univariate(u, x), k, K, nodes=nodes, breakpoints=cuts)
    if isinstance(e, (Add, Sub)):
        a = uniform_expectation(e.left, K, nodes)
        b = uniform_expectation(e.right, K, nodes)
        if a is None or b is None:
            return None
        return a + b if isinstance(e, Add) else a - b
    if isinstance(e, Mul):
        ca = constant_value(e.left)
        if ca is not None:
            b = uniform_expectation(e.right, K, nodes)
            return None if b is None else ca * b
        cb = constant_value(e.right)
        if cb is not None:
            a = uniform_expectation(e.left, K, nodes)
            return None if a is None else a * cb
    return None


def _eval_at_full_mass(e: Expr, K: int) -> float:
    # the coordinate sum covers the whole simplex, so it is identically 1
    u = to_univariate(e)
    return float(eval_univariate(u, 1.0)[0])
