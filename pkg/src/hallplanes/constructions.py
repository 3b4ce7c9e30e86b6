"""Closed-form Pappus constructions on canonical line pairs, checked numerically.

Each case places the given points A1, B1 on a canonical pair of lines and
specifies the remaining four points through closed-form coordinates in
the parameters (Greek letters) and the unknowns ``e, j, g, h, t, v, w, z``.
The formulas live in a table of expression strings and are evaluated
over F_q elementwise on numpy arrays; every zero denominator is recorded.
The resulting points are then handed to the plane engine, which serves as
the independent oracle for lines, intersections and the Pappus property.

Coordinates are pairs of Hall elements ``((x1, x2), (y1, y2))``.  A Hall
element ``(a1, a2)`` has index ``a1 + q*a2``.
"""

from __future__ import annotations

import ast
import functools
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .configs import PappusOutcome, Sextuple, candidate_points, pappus_check
from .coordsys import CoordinateSystem, HallPlaneError
from .plane import PlaneTables, build_plane


class ConstraintViolated(HallPlaneError, ValueError):
    def __init__(self, report: "ConstraintReport"):
        self.report = report
        failed = ", ".join(c.label for c in report.checks if not c.ok)
        super().__init__(f"constraints failed: {failed}")


class FormulaMismatch(HallPlaneError, AssertionError):
    pass


# --------------------------------------------------------------------------
# expression evaluation over F_q


class FieldExpr:
    """Evaluate arithmetic expression strings over F_q on index arrays.

    Supported: ``+ - * /``, integer powers, integer literals (mapped through
    Z -> F_q), names bound in the environment, and ``f(x) = x^2 - r x - s``.
    Division by zero yields 0 and raises the returned ``bad`` mask.
    """

    def __init__(self, H: CoordinateSystem):
        F = H.basefield
        self.F = F
        self.r, self.s = H.r, H.s

    @staticmethod
    @functools.lru_cache(maxsize=None)
    def _parse(expr: str):
        return ast.parse(expr, mode="eval").body

    def __call__(self, expr: str, env: dict, size: int):
        bad = np.zeros(size, dtype=bool)
        val = self._eval(self._parse(expr), env, size, bad)
        return np.broadcast_to(val, (size,)).copy(), bad

    def _eval(self, node, env, size, bad):
        F = self.F
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return np.int64(F.from_int(node.value))
        if isinstance(node, ast.Name):
            if node.id == "r":
                return np.int64(self.r)
            if node.id == "s":
                return np.int64(self.s)
            return env[node.id]
        if isinstance(node, ast.UnaryOp):
            x = self._eval(node.operand, env, size, bad)
            if isinstance(node.op, ast.USub):
                return F.neg_table[x]
            if isinstance(node.op, ast.UAdd):
                return x
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError("only integer powers are supported")
                base = self._eval(node.left, env, size, bad)
                out = np.int64(F.from_int(1))
                for _ in range(node.right.value):
                    out = F.mul_table[out, base]
                return out
            a = self._eval(node.left, env, size, bad)
            b = self._eval(node.right, env, size, bad)
            if isinstance(node.op, ast.Add):
                return F.add_table[a, b]
            if isinstance(node.op, ast.Sub):
                return F.sub_table[a, b]
            if isinstance(node.op, ast.Mult):
                return F.mul_table[a, b]
            if isinstance(node.op, ast.Div):
                zero = np.broadcast_to(b == 0, (size,))
                bad |= zero
                return F.mul_table[a, F.inv_table[b]]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "f":
            (arg,) = node.args
            x = self._eval(arg, env, size, bad)
            return F.sub_table[F.sub_table[F.mul_table[x, x], F.mul_table[self.r, x]], self.s]
        raise ValueError(f"unsupported expression node {ast.dump(node)}")


# --------------------------------------------------------------------------
# the formula table


@dataclass(frozen=True)
class CaseSpec:
    tag: str
    family: str
    params: tuple
    unknowns: tuple  # free unknowns swept
    fixed: dict  # specialized unknowns
    derived: dict  # unknowns given by closed forms
    l1: tuple  # ("slanted", m1, m2, k1, k2) or ("vertical", c1, c2)
    l2: tuple
    points: dict  # name -> (x1, x2, y1, y2) expression strings
    param_ok: Callable  # mask of admissible given data (not an exclusion)
    constraints: tuple  # (label, expression that must be nonzero, or batch -> failing mask)
    pappus_line: str  # "type2" or "infinity"


_F = "(mu**2 - r*mu - s)"  # f(mu)

# C3 = A1B2 . A2B1 for the intersecting NBF pair
_D1 = "(-s*(-v*delta + h)**2 + (v*delta*mu - h*mu - v*gamma*psi)*(r*(-v*delta + h) + v*delta*mu - h*mu - v*gamma*psi))"
_D2 = "(s*(-v*delta + h)**2 + (v*delta*mu - h*mu - v*gamma*psi)*(r*v*delta - r*h - v*delta*mu + h*mu + v*gamma*psi))"
C3_FORMULAS = {
    "x1": f"-(gamma*(v - h)*h*(mu*(-r + mu) + s*(-1 + v*psi))) / {_D1}",
    "x2": (
        "(s*(delta*h**2 + v**2*delta*(delta - h + delta*h) - v*h*(delta + delta**2 - h + delta*h))"
        " - v**2*delta**2*mu**2 + v*delta*h*mu**2 + v**2*delta*h*mu**2 + v*delta**2*h*mu**2"
        " - v**2*delta**2*h*mu**2 - v*h**2*mu**2 - delta*h**2*mu**2 + v*delta*h**2*mu**2"
        " + 2*v**2*gamma*delta*mu*psi - v**2*gamma*h*mu*psi - 2*v*gamma*delta*h*mu*psi"
        " + 2*v**2*gamma*delta*h*mu*psi - v*gamma*h**2*mu*psi - v**2*gamma**2*psi**2"
        " + v*gamma**2*h*psi**2 - v**2*gamma**2*h*psi**2"
        " + r*(-delta*h + v*(delta - h + delta*h))*(v*delta*mu - h*mu - v*gamma*psi))"
        f" / {_D2}"
    ),
    "y1": (
        "(-(v - h)*(r - mu)*mu*(r*delta - delta*mu + gamma*psi)*(v*delta*mu - h*mu - v*gamma*psi)"
        " - s**2*(v*delta - h)*(-delta*h + v*(delta - h*psi + delta*h*psi))"
        " + s*(h**2*mu*(2*delta*mu - gamma*psi)"
        " + v**2*(delta**2*mu**2*(2 + h*psi) + gamma*psi**2*(gamma + h*mu + gamma*h*psi)"
        " - delta*mu*psi*(h*mu + 2*gamma*(1 + h*psi)))"
        " + r*(-2*delta*h**2*mu + v*h*(2*delta**2*mu - gamma*delta*psi - h*mu*psi + delta*mu*(2 + h*psi))"
        " + v**2*(-gamma*h*psi**2 - delta**2*mu*(2 + h*psi) + delta*psi*(gamma + h*mu + gamma*h*psi)))"
        " + v*h*(-2*delta**2*mu**2 - delta*mu*(-2*gamma*psi + mu*(2 + h*psi))"
        " + psi*(h*mu**2 - gamma**2*psi + gamma*(mu + h*mu*psi)))))"
        f" / (psi*{_D1})"
    ),
    "y2": (
        "(-r**2*(-delta*h + v*(delta - h + delta*h))*(v*delta*mu - h*mu - v*gamma*psi)"
        " - (v - h)*(mu*(delta*mu - gamma*psi)*(v*delta*mu - h*mu - v*gamma*psi)"
        " + s*(-v*delta**2*mu + delta*h*mu - gamma*h*psi + v*gamma*h*psi))"
        " + r*(s*(-delta*h**2 - v**2*delta*(delta - h + delta*h) + v*h*(delta + delta**2 - h + delta*h))"
        " + h**2*mu*(2*delta*mu - gamma*psi)"
        " + v**2*(delta*mu - gamma*psi)*(delta*(2 + h)*mu - gamma*psi - h*(mu + gamma*psi))"
        " + v*h*(-2*delta**2*mu**2 - delta*mu*((2 + h)*mu - 3*gamma*psi) + gamma*psi*(mu - gamma*psi)"
        " + h*mu*(mu + gamma*psi))))"
        f" / {_D1}"
    ),
}
A1B2_FORMULAS = {
    "m1": "mu/(1 - v)",
    "m2": "(s*(-1 + v)**2 - mu*(r*(-1 + v) + mu))*psi / ((-1 + v)*(mu*(-r + mu) + s*(-1 + v*psi)))",
    "k1": "v*(s + (r - mu)*mu - s*psi) / ((-1 + v)*psi)",
    "k2": "v*mu/(1 - v)",
}

# B2 and C2 for the BF/NBF pair with gamma != 0
_DB = "(gamma**2 + r*gamma*delta - s*delta**2)"
_DC = "(s*(gamma + (-1 + delta)*e)**2 - gamma*e*(gamma*e + r*(gamma + (-1 + delta)*e)))"
BF_NBF_II = {
    "j": "(gamma - e + delta*e)/gamma",
    "t": f"(gamma**2 + r*gamma*g - s*delta*g - s*gamma*h) / {_DB}",
    "v": f"(gamma*delta - gamma*g - s*delta*h) / {_DB}",
    "yb1": f"(s*(gamma*(delta - g) - s*delta*h)) / {_DB}",
    "yb2": f"(gamma**2 - s*delta*(g + r*h) + gamma*(r*delta - s*h)) / {_DB}",
    "w": f"(gamma*(s*(-1 + delta)*e*g + gamma*(-e**2 + s*g - r*e*g + s*e*h))) / {_DC}",
    "z": f"(gamma*(gamma*e*(-1 + g) + s*gamma*h - (-1 + delta)*e*(e - s*h))) / {_DC}",
    "yc1": f"(s*gamma*(gamma*e*(-1 + g) + s*gamma*h - (-1 + delta)*e*(e - s*h))) / {_DC}",
    "yc2": (
        "(gamma*((-e**2 - e*g*r + g*s + e*h*s)*gamma + e*g*s*(-1 + delta))"
        " + r*gamma*(e*(-1 + g)*gamma + h*s*gamma - e*(e - h*s)*(-1 + delta)))"
        f" / {_DC}"
    ),
}

_NBF_PARALLEL_POINTS = {
    "A1": ("0", "1", "k1 + s", "k2 + r"),
    "B1": ("gamma", "delta", "k1 + s*delta", "k2 + gamma + r*delta"),
    "C1": ("e", "j", "k1 + s*j", "k2 + e + r*j"),
    "A2": ("0", "h", "s*h", "r*h"),
    "B2": ("0", "v", "s*v", "r*v"),
    "C2": ("w", "z", "s*z", "w + r*z"),
}

CASES = {
    "nbf-nbf-intersecting": CaseSpec(
        tag="nbf-nbf-intersecting",
        family="nbf-nbf-intersecting",
        params=("mu", "psi", "gamma", "delta"),
        unknowns=("e", "j", "h", "v", "w"),
        fixed={"g": 0, "t": 0, "z": 0},
        derived={},
        l1=("slanted", "mu", "psi", "0", "0"),
        l2=("slanted", "0", "1", "0", "0"),
        points={
            "A1": ("0", "1", f"-{_F}/psi", "r - mu"),
            "B1": ("gamma", "delta", f"gamma*mu - {_F}*delta/psi", "delta*(r - mu) + gamma*psi"),
            "C1": ("e", "j", f"e*mu - {_F}*j/psi", "j*(r - mu) + e*psi"),
            "A2": ("g", "h", "s*h", "g + r*h"),
            "B2": ("t", "v", "s*v", "t + r*v"),
            "C2": ("w", "z", "s*z", "w + r*z"),
        },
        param_ok=lambda P: (P["psi"] != 0) & ~((P["mu"] == 0) & (P["psi"] == 1))
        & ~((P["gamma"] == 0) & (P["delta"] <= 1)),
        constraints=(
            ("v != 1", "v - 1"),
            ("A1B2 slope denominator", "s*psi*v**2 + (-s + mu*(-r + mu) - s*psi)*v + s - mu*(-r + mu)"),
            ("A1B2 second slope component", "s*(-1 + v)**2 - mu*(r*(-1 + v) + mu)"),
            ("C3 denominator", _D1),
        ),
        pappus_line="type2",
    ),
    "nbf-nbf-parallel-i": CaseSpec(
        tag="nbf-nbf-parallel-i",
        family="nbf-nbf-parallel",
        params=("k1", "k2", "gamma", "delta"),
        unknowns=("e", "j", "v", "w", "z"),
        fixed={"g": 0, "h": 0, "t": 0},
        derived={},
        l1=("slanted", "0", "1", "k1", "k2"),
        l2=("slanted", "0", "1", "0", "0"),
        points=_NBF_PARALLEL_POINTS,
        param_ok=lambda P: ~((P["k1"] == 0) & (P["k2"] == 0)) & ~((P["gamma"] == 0) & (P["delta"] == 1)),
        constraints=(
            ("A2B1: gamma = -k2 needs delta != 0", lambda b: b.is_neg("gamma", "k2") & (b.env["delta"] == 0)),
            ("A1C2: e = -k2 needs j != 0", lambda b: b.is_neg("e", "k2") & (b.env["j"] == 0)),
        ),
        pappus_line="any",
    ),
    "nbf-nbf-parallel-ii": CaseSpec(
        tag="nbf-nbf-parallel-ii",
        family="nbf-nbf-parallel",
        params=("k1", "k2", "gamma", "delta"),
        unknowns=("e", "j", "v", "w", "z"),
        fixed={"g": 0, "h": 1, "t": 0},
        derived={},
        l1=("slanted", "0", "1", "k1", "k2"),
        l2=("slanted", "0", "1", "0", "0"),
        points=_NBF_PARALLEL_POINTS,
        param_ok=lambda P: ~((P["k1"] == 0) & (P["k2"] == 0)) & ~((P["gamma"] == 0) & (P["delta"] == 1)),
        constraints=(
            ("A2B1: gamma = -k2 needs delta != 1", lambda b: b.is_neg("gamma", "k2") & (b.env["delta"] == 1)),
            ("A1C2: e = -k2 needs j != 1", lambda b: b.is_neg("e", "k2") & (b.env["j"] == 1)),
        ),
        pappus_line="any",
    ),
    "bf-nbf-gamma-zero": CaseSpec(
        tag="bf-nbf-gamma-zero",
        family="bf-nbf",
        params=("gamma", "delta"),
        unknowns=("j", "g", "h", "v", "z"),
        fixed={"e": 0, "t": 0, "w": 0},
        derived={},
        l1=("vertical", "0", "0"),
        l2=("slanted", "0", "1", "0", "0"),
        points={
            "A1": ("0", "0", "0", "1"),
            "B1": ("0", "0", "gamma", "delta"),
            "C1": ("0", "0", "e", "j"),
            "A2": ("g", "h", "s*h", "g + r*h"),
            "B2": ("t", "v", "s*v", "t + r*v"),
            "C2": ("w", "z", "s*z", "w + r*z"),
        },
        param_ok=lambda P: (P["gamma"] == 0) & (P["delta"] > 1),
        constraints=(),
        pappus_line="type2",
    ),
    "bf-nbf-gamma-nonzero": CaseSpec(
        tag="bf-nbf-gamma-nonzero",
        family="bf-nbf",
        params=("gamma", "delta"),
        unknowns=("e", "g", "h"),
        fixed={},
        derived={k: BF_NBF_II[k] for k in ("j", "t", "v", "w", "z")},
        l1=("vertical", "0", "0"),
        l2=("slanted", "0", "1", "0", "0"),
        points={
            "A1": ("0", "0", "0", "1"),
            "B1": ("0", "0", "gamma", "delta"),
            "C1": ("0", "0", "e", "j"),
            "A2": ("g", "h", "s*h", "g + r*h"),
            "B2": ("t", "v", BF_NBF_II["yb1"], BF_NBF_II["yb2"]),
            "C2": ("w", "z", BF_NBF_II["yc1"], BF_NBF_II["yc2"]),
        },
        param_ok=lambda P: P["gamma"] != 0,
        constraints=(("B2 denominator", _DB), ("C2 denominator", _DC)),
        pappus_line="infinity",
    ),
}
CASE_TAGS = tuple(CASES)
FAMILIES = {
    "nbf-nbf-intersecting": ("nbf-nbf-intersecting",),
    "nbf-nbf-parallel": ("nbf-nbf-parallel-i", "nbf-nbf-parallel-ii"),
    "bf-nbf": ("bf-nbf-gamma-zero", "bf-nbf-gamma-nonzero"),
}
SIX_LINES = ("A1B2", "A2B1", "A1C2", "A2C1", "B1C2", "B2C1")


# --------------------------------------------------------------------------
# single evaluations


@dataclass(frozen=True)
class ConstructionCase:
    tag: str
    params: dict
    unknowns: dict = field(default_factory=dict)

    @property
    def spec(self) -> CaseSpec:
        return CASES[self.tag]


@dataclass(frozen=True)
class ConstraintCheck:
    label: str
    source: str  # "printed-constraint", "degenerate", "engine", "final-step"
    ok: bool
    value: int | None = None


@dataclass(frozen=True)
class ConstraintReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if not c.ok]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [asdict(c) for c in self.checks]}


@functools.lru_cache(maxsize=8)
def _plane_for(H: CoordinateSystem) -> PlaneTables:
    return build_plane(H)


def _normalize_params(spec: CaseSpec, params: dict) -> dict:
    out = {}
    for name in spec.params:
        if name in ("k1", "k2") and "kappa" in params:
            out[name] = params["kappa"][0 if name == "k1" else 1]
        else:
            out[name] = params[name]
    for name, val in (("alpha", 0), ("beta", 1)):
        if params.get(name, val) != val:
            raise ValueError(f"the marked point is fixed at {name} = {val}")
    return out


class _Batch:
    """All quantities of one case on a batch of assignments."""

    def __init__(self, H: CoordinateSystem, plane: PlaneTables, spec: CaseSpec, env: dict, size: int):
        self.H, self.plane, self.spec, self.size = H, plane, spec, size
        q, n = H.q, plane.n
        ev = FieldExpr(H)
        env = dict(env)
        for k, val in spec.fixed.items():
            env[k] = np.full(size, val, dtype=np.int64)
        self.formula_bad = np.zeros(size, dtype=bool)
        for k, expr in spec.derived.items():
            env[k], bad = ev(expr, env, size)
            self.formula_bad |= bad
        self.env = env
        self.ev = ev

        def comps(exprs):
            out = []
            for e in exprs:
                val, bad = ev(e, env, size)
                self.formula_bad |= bad
                out.append(val)
            return out

        self.coords = {}
        self.ids = {}
        for name, exprs in spec.points.items():
            x1, x2, y1, y2 = comps(exprs)
            self.coords[name] = (x1, x2, y1, y2)
            self.ids[name] = (x1 + q * x2) * n + (y1 + q * y2)
        self.l1 = self._line_id(spec.l1, comps)
        self.l2 = self._line_id(spec.l2, comps)

    def _line_id(self, desc, comps):
        q, n = self.H.q, self.plane.n
        if desc[0] == "vertical":
            c1, c2 = comps(desc[1:])
            return c1 + q * c2
        m1, m2, k1, k2 = comps(desc[1:])
        return n + (m1 + q * m2) * n + (k1 + q * k2)

    def eval(self, expr):
        return self.ev(expr, self.env, self.size)

    def is_neg(self, a, b):
        """Mask of rows with a = -b in F."""
        return self.env[a] == self.H.basefield.neg_table[self.env[b]]

    # -- engine side ---------------------------------------------------------

    def engine(self):
        P = self.plane
        J, M, I = P.join_table, P.meet_table, P.inc
        n, q = P.n, self.H.q
        ids = self.ids
        six = [ids[k] for k in ("A1", "B1", "C1", "A2", "B2", "C2")]
        self.on_lines = np.ones(self.size, dtype=bool)
        for k in ("A1", "B1", "C1"):
            self.on_lines &= I[ids[k], self.l1] == 1
        for k in ("A2", "B2", "C2"):
            self.on_lines &= I[ids[k], self.l2] == 1
        O = M[self.l1, self.l2]
        self.degenerate = np.zeros(self.size, dtype=bool)
        for a in range(6):
            self.degenerate |= six[a] == O
            for b in range(a + 1, 6):
                self.degenerate |= six[a] == six[b]
        safe = ~self.degenerate

        def join(a, b):
            return np.where(safe, J[ids[a], ids[b]], 0)

        self.lines = {nm: join(nm[:2], nm[2:]) for nm in SIX_LINES}
        self.type2 = {}
        for nm, lid in self.lines.items():
            slanted = (lid >= n) & (lid < n + n * n)
            self.type2[nm] = slanted & ((lid - n) // n >= q)
        L = self.lines
        self.C3 = M[L["A1B2"], L["A2B1"]]
        self.B3 = M[L["A1C2"], L["A2C1"]]
        self.A3 = M[L["B1C2"], L["B2C1"]]
        distinct = (self.A3 != self.B3) & (self.A3 != self.C3) & (self.B3 != self.C3) & safe
        self.pline = np.where(distinct, J[self.A3, np.where(distinct, self.B3, self.A3 + 1) % P.num_points], -1)
        self.is_pappus = distinct & (I[self.C3, np.maximum(self.pline, 0)] == 1)
        self.O = O
        # the final step equates the slopes of A3B3 and A3C3 as type 2 lines
        N = P.num_points
        self.cross_affine = (self.A3 < P.num_affine_points) & (self.B3 < P.num_affine_points) & (
            self.C3 < P.num_affine_points
        )
        for nm, other in (("A3B3", self.B3), ("A3C3", self.C3)):
            lid = J[self.A3, np.where(other != self.A3, other, (self.A3 + 1) % N)]
            self.lines[nm] = np.where(other != self.A3, lid, -1)
            self.type2[nm] = (lid >= n) & (lid < n + n * n) & ((lid - n) // n >= q) & (other != self.A3)

    def line_kind(self, lid):
        P, n, q = self.plane, self.plane.n, self.H.q
        kind = np.full(self.size, "type1", dtype=object)
        kind[lid < n] = "vertical"
        kind[(lid >= n) & (lid < n + n * n) & ((lid - n) // n >= q)] = "type2"
        kind[lid == P.infinity_line] = "infinity"
        kind[lid < 0] = "none"
        return kind


def _checks(batch: _Batch):
    """Ordered (label, source, failing-mask, value-array or None) tuples."""
    out = []
    for label, expr in batch.spec.constraints:
        if callable(expr):
            out.append((label, "printed-constraint", expr(batch), None))
            continue
        val, bad = batch.eval(expr)
        out.append((label, "printed-constraint", (val == 0) | bad, val))
    out.append(("formula denominators", "printed-constraint", batch.formula_bad, None))
    out.append(("points distinct and off the common point", "degenerate", batch.degenerate, None))
    for nm in SIX_LINES:
        out.append((f"{nm} is type 2", "engine", ~batch.type2[nm], batch.lines[nm]))
    if batch.spec.pappus_line != "infinity":
        out.append(("cross points are affine", "final-step", ~batch.cross_affine, None))
        for nm in ("A3B3", "A3C3"):
            out.append((f"{nm} is type 2", "final-step", ~batch.type2[nm], batch.lines[nm]))
    return out


def _formula_checks(batch: _Batch, mask):
    """Printed intermediate quantities against the engine, on ``mask`` rows."""
    H, P = batch.H, batch.plane
    q, n = H.q, P.n
    res = {}

    def record(name, agree, where):
        where = where & mask
        res[name] = (int(where.sum()), int((where & ~agree).sum()), where & ~agree)

    tag = batch.spec.tag
    if tag == "nbf-nbf-intersecting":
        lid = batch.lines["A1B2"]
        m, k = (lid - n) // n, (lid - n) % n
        engine = {"m1": m % q, "m2": m // q, "k1": k % q, "k2": k // q}
        for name, expr in A1B2_FORMULAS.items():
            val, bad = batch.eval(expr)
            record(f"A1B2 {name}", val == engine[name], ~bad)
        C3 = batch.C3
        affine = C3 < P.num_affine_points
        x, y = C3 // n, C3 % n
        engine = {"x1": x % q, "x2": x // q, "y1": y % q, "y2": y // q}
        for name, expr in C3_FORMULAS.items():
            val, bad = batch.eval(expr)
            record(f"C3 {name}", affine & (val == engine[name]), ~bad)
    if tag == "bf-nbf-gamma-nonzero":
        J, M = P.join_table, P.meet_table
        inf = P.infinity_line
        ids = batch.ids
        L = batch.lines
        # B2 and C2 are the points of l2 on the parallels through A1
        for pt, partner in (("B2", "A2B1"), ("C2", "A2C1")):
            direction = M[L[partner], inf]
            expect = M[J[ids["A1"], direction], batch.l2]
            record(f"{pt} = l2 . (A1 parallel to {partner})", expect == ids[pt], np.ones_like(mask))
        for a, b in (("A1B2", "A2B1"), ("A1C2", "A2C1"), ("B1C2", "B2C1")):
            record(f"{a} parallel to {b}", M[L[a], L[b]] >= P.num_affine_points, np.ones_like(mask))
        for nm, coord in (("B2", ("yb1", "yb2")), ("C2", ("yc1", "yc2"))):
            # the printed y-coordinates are x*(0,1) on l2
            x1, x2, y1, y2 = batch.coords[nm]
            xv = x1 + q * x2
            y = H.mul_table[xv, H.index((0, 1))]
            record(f"{nm} printed y on l2", (y % q == y1) & (y // q == y2), np.ones_like(mask))
    return res


def evaluate_case(H: CoordinateSystem, case: ConstructionCase):
    """Evaluate one assignment; returns (Sextuple, ConstraintReport, PappusOutcome)."""
    spec = case.spec
    plane = _plane_for(H)
    params = _normalize_params(spec, case.params)
    env = {k: np.array([int(v)], dtype=np.int64) for k, v in params.items()}
    for name in spec.unknowns:
        if name not in case.unknowns:
            raise ValueError(f"unknown {name} must be given for {spec.tag}")
        env[name] = np.array([int(case.unknowns[name])], dtype=np.int64)
    for name, val in case.unknowns.items():
        if name in spec.fixed and spec.fixed[name] != val:
            raise ValueError(f"{name} is fixed at {spec.fixed[name]} in {spec.tag}")
    if not spec.param_ok(env)[0]:
        raise ValueError(f"parameters {params} are outside the case's domain")
    batch = _Batch(H, plane, spec, env, 1)
    batch.engine()
    checks = []
    for label, source, fail, val in _checks(batch):
        checks.append(ConstraintCheck(label, source, not bool(fail[0]), None if val is None else int(val[0])))
    report = ConstraintReport(tuple(checks))
    if not report.ok:
        raise ConstraintViolated(report)
    if not batch.on_lines[0]:
        raise FormulaMismatch(f"{spec.tag}: a constructed point is off its line")
    for name, (checked, bad, _) in _formula_checks(batch, np.ones(1, dtype=bool)).items():
        if bad:
            raise FormulaMismatch(f"{spec.tag}: {name} disagrees with the engine")
    ids = batch.ids
    s = Sextuple(int(batch.l1[0]), int(batch.l2[0]), *(int(ids[k][0]) for k in ("A1", "B1", "C1", "A2", "B2", "C2")))
    return s, report, pappus_check(plane, s)


# --------------------------------------------------------------------------
# sweeps


def _assignments(q, names, rows):
    """Decode row numbers into per-variable arrays (first name varies slowest)."""
    out = {}
    rem = rows.copy()
    for name in reversed(names):
        out[name] = rem % q
        rem //= q
    return out


def sweep_case(H: CoordinateSystem, tag: str, sample: int | None = None, seed: int = 0,
               params: list | None = None, chunk: int = 1 << 17) -> dict:
    """Run a case over every assignment (or a seeded sample of ``sample`` rows).

    ``params`` restricts the sweep to the listed parameter tuples (in the
    case's parameter order), with every value of the unknowns.

    Every admissible assignment is checked for the Pappus property and for
    agreement of the printed formulas with the engine.  Exclusions are
    tallied by constraint; assignments excluded only by engine-side line
    checks are reported separately for review.
    """
    spec = CASES[tag]
    plane = _plane_for(H)
    q = H.q
    names = spec.params + spec.unknowns
    total = q ** len(names)
    block = q ** len(spec.unknowns)
    if params is not None:
        keys = sorted({int(np.ravel_multi_index(tuple(t), (q,) * len(spec.params))) for t in params})
        rows_all = (np.array(keys, dtype=np.int64)[:, None] * block + np.arange(block)).ravel()
    else:
        rows_all = None
    if sample is not None and sample < (total if rows_all is None else len(rows_all)):
        rng = np.random.default_rng(seed)
        if rows_all is None:
            rows_all = np.unique(rng.integers(0, total, size=sample, dtype=np.int64))
        else:
            rows_all = np.unique(rng.choice(rows_all, size=sample, replace=False))
    n_param = q ** len(spec.params)
    param_space_ok = spec.param_ok(_assignments(q, spec.params, np.arange(n_param)))
    covered = np.zeros(n_param, dtype=bool)
    seen_params = np.zeros(n_param, dtype=bool)

    summary = {
        "case": tag,
        "q": q,
        "r": H.r,
        "s": H.s,
        "sampled": sample is not None and rows_all is not None,
        "pinned_parameters": params is not None,
        "assignments": 0,
        "admissible": 0,
        "pappus": 0,
        "non_pappus": 0,
        "exclusions": {},
        "excluded_by_printed_constraints": 0,
        "excluded_as_degenerate": 0,
        "engine_only_exclusions": 0,
        "engine_only_by_line": {nm: 0 for nm in SIX_LINES},
        "excluded_at_final_step": 0,
        "off_line_points": 0,
        "formula_checks": {},
        "pappus_line_kinds": {},
        "expected_pappus_line": spec.pappus_line,
        "first_non_pappus": None,
        "first_mismatch": None,
    }
    count = len(rows_all) if rows_all is not None else total
    for lo in range(0, count, chunk):
        rows = rows_all[lo : lo + chunk] if rows_all is not None else np.arange(lo, min(lo + chunk, total))
        env = _assignments(q, names, rows)
        dom = spec.param_ok(env)
        rows = rows[dom]
        if not len(rows):
            continue
        env = {k: v[dom] for k, v in env.items()}
        size = len(rows)
        batch = _Batch(H, plane, spec, env, size)
        batch.engine()
        summary["assignments"] += size
        pkey = rows // block
        seen_params[pkey] = True
        printed_fail = np.zeros(size, dtype=bool)
        engine_fail = np.zeros(size, dtype=bool)
        degenerate = batch.degenerate
        final_fail = np.zeros(size, dtype=bool)
        for label, source, fail, _ in _checks(batch):
            summary["exclusions"][label] = summary["exclusions"].get(label, 0) + int(fail.sum())
            if source == "printed-constraint":
                printed_fail |= fail
            elif source == "engine":
                engine_fail |= fail
            elif source == "final-step":
                final_fail |= fail
        admissible = ~printed_fail & ~engine_fail & ~degenerate & ~final_fail
        summary["excluded_at_final_step"] += int((final_fail & ~printed_fail & ~engine_fail & ~degenerate).sum())
        summary["excluded_by_printed_constraints"] += int(printed_fail.sum())
        summary["excluded_as_degenerate"] += int((degenerate & ~printed_fail).sum())
        engine_only = engine_fail & ~printed_fail & ~degenerate
        summary["engine_only_exclusions"] += int(engine_only.sum())
        for nm in SIX_LINES:
            summary["engine_only_by_line"][nm] += int((engine_only & ~batch.type2[nm]).sum())
        off = admissible & ~batch.on_lines
        summary["off_line_points"] += int(off.sum())
        summary["admissible"] += int(admissible.sum())
        good = admissible & batch.is_pappus
        summary["pappus"] += int(good.sum())
        summary["non_pappus"] += int((admissible & ~batch.is_pappus).sum())
        covered[pkey[good]] = True
        kinds = batch.line_kind(batch.pline)[admissible]
        for kind, c in zip(*np.unique(kinds.astype(str), return_counts=True)):
            summary["pappus_line_kinds"][kind] = summary["pappus_line_kinds"].get(kind, 0) + int(c)
        if summary["first_non_pappus"] is None and (admissible & ~batch.is_pappus).any():
            i = int(np.nonzero(admissible & ~batch.is_pappus)[0][0])
            summary["first_non_pappus"] = {k: int(v[i]) for k, v in env.items()}
        for name, (checked, bad, where) in _formula_checks(batch, admissible).items():
            fc = summary["formula_checks"].setdefault(name, {"checked": 0, "mismatches": 0})
            fc["checked"] += checked
            fc["mismatches"] += bad
            if bad and summary["first_mismatch"] is None:
                i = int(np.nonzero(where)[0][0])
                summary["first_mismatch"] = {"check": name, **{k: int(v[i]) for k, v in env.items()}}
    relevant = param_space_ok & seen_params
    summary["parameter_tuples"] = int(relevant.sum())
    summary["parameter_tuples_without_construction"] = int((relevant & ~covered).sum())
    summary["all_pappus"] = summary["non_pappus"] == 0 and summary["admissible"] > 0
    summary["formulas_agree"] = all(fc["mismatches"] == 0 for fc in summary["formula_checks"].values()) and summary[
        "off_line_points"
    ] == 0
    summary["_covered"] = covered
    summary["_domain"] = relevant
    expected = spec.pappus_line
    if expected == "any":
        summary["pappus_line_as_claimed"] = True
    else:
        kinds = summary["pappus_line_kinds"]
        summary["pappus_line_as_claimed"] = set(kinds) <= {expected}
    return summary


def public_summary(summary: dict) -> dict:
    return {k: v for k, v in summary.items() if not k.startswith("_")}


def sweep_family(H: CoordinateSystem, family: str, sample: int | None = None, seed: int = 0) -> dict:
    """Sweep every solution of a family and report parameter coverage of their union."""
    tags = FAMILIES[family]
    parts = [sweep_case(H, t, sample=sample, seed=seed) for t in tags]
    domain = np.zeros_like(parts[0]["_domain"])
    covered = np.zeros_like(domain)
    for p in parts:
        domain |= p["_domain"]
        covered |= p["_covered"]
    gap = np.nonzero(domain & ~covered)[0]
    completed = _complete_by_search(H, CASES[tags[0]], gap)
    return {
        "family": family,
        "cases": [public_summary(p) for p in parts],
        "parameter_tuples": int(domain.sum()),
        "parameter_tuples_without_construction": int(len(gap)),
        "uncovered_completed_by_search": completed,
        "uncovered_examples": [list(map(int, np.unravel_index(k, (H.q,) * len(CASES[tags[0]].params))))
                               for k in gap[:5]],
        "all_pappus": all(p["all_pappus"] for p in parts),
        "formulas_agree": all(p["formulas_agree"] for p in parts),
    }


def _complete_by_search(H: CoordinateSystem, spec: CaseSpec, keys) -> int:
    """How many parameter tuples admit some Pappus completion of (A1, B1) on (l1, l2).

    The parameters fix l1, l2, A1 and B1; the remaining four points are
    searched exhaustively among the affine points of the two lines.
    """
    if not len(keys):
        return 0
    plane = _plane_for(H)
    env = _assignments(H.q, spec.params, np.asarray(keys, dtype=np.int64))
    for name in spec.unknowns:
        env[name] = np.zeros(len(keys), dtype=np.int64)
    batch = _Batch(H, plane, spec, env, len(keys))
    K = kernels.get()
    tabs = (plane.join_table, plane.meet_table, plane.inc)
    done = 0
    for i in range(len(keys)):
        l1, l2 = int(batch.l1[i]), int(batch.l2[i])
        P, Q = candidate_points(plane, l1, l2, "affine")
        a, b = int(batch.ids["A1"][i]), int(batch.ids["B1"][i])
        ia, ib = np.nonzero(P == a)[0], np.nonzero(P == b)[0]
        if len(ia) and len(ib) and a != b:
            done += K.complete_2p0(*tabs, P, Q, int(ia[0]), int(ib[0])) is not None
    return done
