"""Exact calculus for homogeneous polynomials and smooth homogeneous maps.

Polynomials are stored as sparse coefficient tables over integer exponent
vectors and differentiated exactly (term by term), so gradients, Hessians and
third-derivative tensors carry no discretization error.  Non-polynomial
homogeneous functions enter through :class:`SmoothHomogeneousMap`, which wraps
user-supplied closed-form derivative callables behind the same interface.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DomainError, MixedDegreeError, ParseError

NAMED_VARS = ("x", "y", "z", "w")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)|(?P<var>[a-zA-Z]\d*)|(?P<op>[-+*^]))"
)


def _sorted_terms(terms):
    # graded lexicographic; all stored terms share one degree, so plain
    # reverse-lex on the exponent tuples is a stable total order
    return dict(sorted(terms.items(), key=lambda kv: kv[0], reverse=True))


def _mul_terms(a: Mapping[tuple, float], b: Mapping[tuple, float]) -> dict:
    out: dict[tuple, float] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, 0.0) + ca * cb
    return {e: c for e, c in out.items() if c != 0.0}


def _pow_terms(t: Mapping[tuple, float], n: int) -> dict:
    dim = len(next(iter(t)))
    out = {tuple([0] * dim): 1.0}
    for _ in range(n):
        out = _mul_terms(out, t)
    return out


class HomogeneousPolynomial:
    """Multivariate homogeneous polynomial with exact differentiation.

    Parameters
    ----------
    terms : mapping from exponent tuples to real coefficients
        Every exponent tuple must have the same length (the ambient dimension)
        and the same total degree ``k >= 2``.  Zero coefficients are dropped.
    dimension : int, optional
        Ambient dimension override; must match the exponent tuples.
    """

    def __init__(self, terms: Mapping[Sequence[int], float], dimension: int | None = None):
        clean: dict[tuple, float] = {}
        dim = dimension
        for exp, coeff in terms.items():
            exp = tuple(int(e) for e in exp)
            if dim is None:
                dim = len(exp)
            if len(exp) != dim:
                raise ValueError(f"exponent vector {exp} has length {len(exp)}, expected {dim}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = float(coeff)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        clean = {e: c for e, c in clean.items() if c != 0.0}
        if not clean:
            raise ValueError("polynomial has no nonzero terms")
        degrees = {sum(e) for e in clean}
        if len(degrees) > 1:
            names = ", ".join(
                f"{_format_monomial(e, dim)} (degree {sum(e)})" for e in sorted(clean, reverse=True)
            )
            raise MixedDegreeError(f"monomials of mixed total degree: {names}")
        degree = degrees.pop()
        if degree < 2:
            raise ValueError(f"total degree must be >= 2, got {degree}")
        self.dimension = dim
        self.degree = degree
        self._terms = _sorted_terms(clean)
        self._exps = np.array(list(self._terms.keys()), dtype=np.int64)
        self._coeffs = np.array(list(self._terms.values()), dtype=float)
        self._tables: dict[int, tuple] = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def parse(cls, text: str, dimension: int | None = None) -> "HomogeneousPolynomial":
        """Parse an expression like ``"x^3 - x*y^2"`` or ``"2*x0^2*x1"``."""
        terms, dim = _parse_expression(text, dimension)
        return cls(terms, dimension=dim)

    @classmethod
    def from_json(cls, obj: Mapping) -> "HomogeneousPolynomial":
        terms = {tuple(t["exp"]): float(t["c"]) for t in obj["terms"]}
        poly = cls(terms, dimension=int(obj["dim"]))
        if poly.degree != int(obj["degree"]):
            raise MixedDegreeError(
                f"declared degree {obj['degree']} does not match terms (degree {poly.degree})"
            )
        return poly

    def to_json(self) -> dict:
        return {
            "dim": self.dimension,
            "degree": self.degree,
            "terms": [{"exp": list(e), "c": c} for e, c in self._terms.items()],
        }

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    # -- evaluation and derivatives ---------------------------------------

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        vals = self._coeffs * np.prod(x**self._exps, axis=1)
        return math.fsum(vals.tolist())

    def contains(self, x) -> bool:
        return True

    def gradient(self, x) -> np.ndarray:
        return self._derivative(x, 1)

    def hessian(self, x) -> np.ndarray:
        return self._derivative(x, 2)

    def third_tensor(self, x) -> np.ndarray:
        return self._derivative(x, 3)

    def _derivative(self, x, order: int) -> np.ndarray:
        exps, coeffs, slots = self._table(order)
        x = np.asarray(x, dtype=float)
        size = self.dimension**order
        if not exps.size:
            return np.zeros((self.dimension,) * order)
        vals = coeffs.copy()
        for j in range(self.dimension):
            vals *= x[j] ** exps[:, j]
        out = np.bincount(slots, weights=vals, minlength=size)
        return out.reshape((self.dimension,) * order)

    def _table(self, order: int):
        # rows: one per (term, ordered index sequence); symmetric slots appear
        # as separate identical rows, so the assembled tensor is exactly symmetric
        if order not in self._tables:
            d = self.dimension
            rows = [(tuple(e), c, 0) for e, c in self._terms.items()]
            flat: list[tuple[tuple, float, int]] = []
            work = [(e, c, ()) for e, c, _ in rows]
            for _ in range(order):
                nxt = []
                for e, c, idx in work:
                    for i in range(d):
                        if e[i] > 0:
                            e2 = list(e)
                            e2[i] -= 1
                            nxt.append((tuple(e2), c * e[i], idx + (i,)))
                work = nxt
            for e, c, idx in work:
                slot = 0
                for i in idx:
                    slot = slot * d + i
                flat.append((e, c, slot))
            if flat:
                exps = np.array([f[0] for f in flat], dtype=np.int64)
                coeffs = np.array([f[1] for f in flat], dtype=float)
                slots = np.array([f[2] for f in flat], dtype=np.int64)
            else:
                exps = np.zeros((0, d), dtype=np.int64)
                coeffs = np.zeros(0)
                slots = np.zeros(0, dtype=np.int64)
            self._tables[order] = (exps, coeffs, slots)
        return self._tables[order]

    # -- algebra -----------------------------------------------------------

    def compose_linear(self, matrix) -> "HomogeneousPolynomial":
        """Return q with q(y) = self(A @ y) for a square matrix A."""
        A = np.asarray(matrix, dtype=float)
        if A.shape != (self.dimension, self.dimension):
            raise ValueError(f"matrix shape {A.shape} does not match dimension {self.dimension}")
        new_dim = A.shape[1]
        unit = lambda j: tuple(int(pos == j) for pos in range(new_dim))
        linear = [
            {unit(j): A[i, j] for j in range(new_dim) if A[i, j] != 0.0}
            for i in range(self.dimension)
        ]
        out: dict[tuple, float] = {}
        for exp, coeff in self._terms.items():
            term = {tuple([0] * new_dim): coeff}
            for i, e in enumerate(exp):
                if e:
                    if not linear[i]:
                        term = {}
                        break
                    term = _mul_terms(term, _pow_terms(linear[i], e))
            for e2, c2 in term.items():
                out[e2] = out.get(e2, 0.0) + c2
        return HomogeneousPolynomial(out, dimension=new_dim)

    def subtract_power_of_linear_form(self, covector, scale: float) -> "HomogeneousPolynomial":
        """Return self - scale * (covector . x)**degree, expanded exactly."""
        a = np.asarray(covector, dtype=float)
        lin = {
            tuple(int(i == j) for j in range(self.dimension)): a[i]
            for i in range(self.dimension)
            if a[i] != 0.0
        }
        powered = _pow_terms(lin, self.degree)
        out = dict(self._terms)
        for e, c in powered.items():
            out[e] = out.get(e, 0.0) - scale * c
        return HomogeneousPolynomial(out, dimension=self.dimension)

    # -- formatting ---------------------------------------------------------

    def serialize(self) -> str:
        parts = []
        for i, (exp, coeff) in enumerate(self._terms.items()):
            mon = _format_monomial(exp, self.dimension)
            mag = abs(coeff)
            body = mon if mag == 1.0 else f"{mag!r}*{mon}"
            if i == 0:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"HomogeneousPolynomial({self.serialize()!r})"

    def __eq__(self, other):
        return (
            isinstance(other, HomogeneousPolynomial)
            and self.dimension == other.dimension
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.dimension, tuple(self._terms.items())))


def _format_monomial(exp, dim):
    names = NAMED_VARS if dim <= 4 else tuple(f"x{i}" for i in range(dim))
    factors = []
    for i, e in enumerate(exp):
        if e == 1:
            factors.append(names[i])
        elif e > 1:
            factors.append(f"{names[i]}^{e}")
    return "*".join(factors) if factors else "1"


# -- expression parser ------------------------------------------------------


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[at]!r}", position=at)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "var":
            tokens.append(("var", m.group("var"), m.start("var")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


def _var_index(name, pos, mode):
    if name in NAMED_VARS and (len(name) == 1):
        if mode["style"] == "indexed":
            raise ParseError("cannot mix named and indexed variables", position=pos)
        mode["style"] = "named"
        return NAMED_VARS.index(name)
    if name[0] == "x" and len(name) > 1 and name[1:].isdigit():
        if mode["style"] == "named":
            raise ParseError("cannot mix named and indexed variables", position=pos)
        mode["style"] = "indexed"
        return int(name[1:])
    raise ParseError(f"unknown variable {name!r}", position=pos)


def _parse_expression(text, dimension):
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression", position=0)
    mode = {"style": None}
    raw_terms: list[tuple[float, dict, int]] = []  # (coeff, var->power, position)
    i = 0
    sign = 1.0
    if tokens[0][0] == "op" and tokens[0][1] in "+-":
        sign = -1.0 if tokens[0][1] == "-" else 1.0
        i = 1
    while True:
        coeff = sign
        powers: dict[int, int] = {}
        term_pos = tokens[i][2] if i < len(tokens) else len(text)
        if i >= len(tokens):
            raise ParseError("expected a term", position=term_pos)
        # optional leading numeric coefficient
        if tokens[i][0] == "num":
            coeff *= float(tokens[i][1])
            i += 1
            if i < len(tokens) and tokens[i] == ("op", "*", tokens[i][2]):
                pass
            if i >= len(tokens) or tokens[i][0] != "op" or tokens[i][1] != "*":
                raise ParseError("a coefficient must be followed by '*' and a variable", position=term_pos)
            i += 1
        # one or more factors separated by '*'
        while True:
            if i >= len(tokens) or tokens[i][0] != "var":
                raise ParseError("expected a variable", position=tokens[i - 1][2] if i else 0)
            idx = _var_index(tokens[i][1], tokens[i][2], mode)
            i += 1
            power = 1
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "^":
                i += 1
                if i >= len(tokens) or tokens[i][0] != "num" or not tokens[i][1].isdigit():
                    raise ParseError("exponent must be a nonnegative integer", position=tokens[i - 1][2])
                power = int(tokens[i][1])
                i += 1
            powers[idx] = powers.get(idx, 0) + power
            if i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] == "*":
                i += 1
                continue
            break
        raw_terms.append((coeff, powers, term_pos))
        if i >= len(tokens):
            break
        if tokens[i][0] != "op" or tokens[i][1] not in "+-":
            raise ParseError(f"expected '+' or '-', got {tokens[i][1]!r}", position=tokens[i][2])
        sign = -1.0 if tokens[i][1] == "-" else 1.0
        i += 1

    max_idx = max((max(p) for _, p, _ in raw_terms if p), default=-1)
    dim = dimension if dimension is not None else max_idx + 1
    if dim <= max_idx:
        raise ParseError(f"dimension {dim} too small for used variables", position=0)
    if mode["style"] == "named" and dimension is None:
        dim = max(dim, max_idx + 1)
    terms: dict[tuple, float] = {}
    degrees: dict[tuple, int] = {}
    for coeff, powers, pos_ in raw_terms:
        exp = tuple(powers.get(j, 0) for j in range(dim))
        terms[exp] = terms.get(exp, 0.0) + coeff
        degrees[exp] = sum(exp)
    if len(set(degrees.values())) > 1:
        names = ", ".join(
            f"{_format_monomial(e, dim)} (degree {d})" for e, d in sorted(degrees.items(), reverse=True)
        )
        raise MixedDegreeError(f"monomials of mixed total degree: {names}")
    return terms, dim


# -- smooth homogeneous maps -------------------------------------------------


class SmoothHomogeneousMap:
    """Closed-form homogeneous function with analytic derivative callables.

    The degree may be any real number ``> 1``.  Derivatives are evaluated only
    inside the declared domain cone; the domain predicate should accept the
    closure wherever the formulas remain finite so that boundary analysis can
    evaluate limits there.
    """

    def __init__(
        self,
        dimension: int,
        degree: float,
        value: Callable,
        gradient: Callable,
        hessian: Callable,
        third: Callable | None = None,
        in_domain: Callable | None = None,
        name: str = "",
    ):
        if degree <= 1:
            raise ValueError(f"degree must be > 1, got {degree}")
        self.dimension = dimension
        self.degree = float(degree)
        self.name = name
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self._third = third
        self._in_domain = in_domain or (lambda x: True)

    def contains(self, x) -> bool:
        return bool(self._in_domain(np.asarray(x, dtype=float)))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if not self._in_domain(x):
            raise DomainError(f"point {x.tolist()} outside the domain cone")
        return x

    def __call__(self, x) -> float:
        return float(self._value(self._check(x)))

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self._gradient(self._check(x)), dtype=float)

    def hessian(self, x) -> np.ndarray:
        return np.asarray(self._hessian(self._check(x)), dtype=float)

    def third_tensor(self, x) -> np.ndarray:
        if self._third is None:
            raise DomainError("this map does not supply third derivatives")
        return np.asarray(self._third(self._check(x)), dtype=float)

    def __repr__(self):
        tag = self.name or "anonymous"
        return f"SmoothHomogeneousMap({tag}, degree={self.degree})"


# -- identities and restrictions ---------------------------------------------


def euler_residual(func, x) -> float:
    """Return <x, grad(x)> - k * value(x); zero for genuinely homogeneous input."""
    x = np.asarray(x, dtype=float)
    grad = func.gradient(x)
    return math.fsum((x * grad).tolist()) - func.degree * func(x)


def position_identity_residual(func, x) -> float:
    """Max-norm of hessian(x) @ x - (k - 1) * grad(x).

    The contraction of the Hessian with the position vector reproduces the
    differential scaled by k - 1 for any function homogeneous of degree k.
    """
    x = np.asarray(x, dtype=float)
    lhs = func.hessian(x) @ x
    rhs = (func.degree - 1.0) * func.gradient(x)
    return float(np.abs(lhs - rhs).max())


def polarization(poly: HomogeneousPolynomial) -> np.ndarray:
    """Symmetric trilinear form with T(v, v, v) = poly(v); requires degree 3."""
    if not isinstance(poly, HomogeneousPolynomial) or poly.degree != 3:
        raise ValueError("polarization requires a cubic polynomial")
    return poly.third_tensor(np.zeros(poly.dimension)) / 6.0


class UnivariateRestriction:
    """Restriction t -> func(x + t*v) of a homogeneous function to a line.

    For polynomials the univariate coefficients are expanded exactly; for
    smooth maps values and derivatives are produced by directional contraction
    of the supplied derivative callables.
    """

    def __init__(self, func, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if not np.any(v != 0.0):
            raise ValueError("direction must be nonzero")
        self.base = x
        self.direction = v
        self.func = func
        if isinstance(func, HomogeneousPolynomial):
            self.coefficients = _line_coefficients(func, x, v)
        else:
            self.coefficients = None

    @property
    def degree(self):
        if self.coefficients is not None:
            return len(self.coefficients) - 1
        return self.func.degree

    def value(self, t: float) -> float:
        if self.coefficients is not None:
            return float(np.polynomial.polynomial.polyval(t, self.coefficients))
        return self.func(self.base + t * self.direction)

    __call__ = value

    def derivative(self, t: float, order: int = 1) -> float:
        if self.coefficients is not None:
            c = np.polynomial.polynomial.polyder(self.coefficients, order)
            return float(np.polynomial.polynomial.polyval(t, c))
        p = self.base + t * self.direction
        v = self.direction
        if order == 1:
            return float(self.func.gradient(p) @ v)
        if order == 2:
            return float(v @ self.func.hessian(p) @ v)
        if order == 3:
            return float(np.einsum("abc,a,b,c->", self.func.third_tensor(p), v, v, v))
        raise ValueError("orders 1..3 supported")


def restrict_to_line(func, x, v) -> UnivariateRestriction:
    return UnivariateRestriction(func, x, v)


def univariate_zeros(coeffs, loose_imag_tol: float = 1e-5) -> np.ndarray:
    """Real zeros of a univariate polynomial, robust to even-order roots.

    Roots of even multiplicity split under coefficient rounding into complex
    pairs with imaginary parts of order sqrt(eps); a candidate with a small
    imaginary part is accepted only if the polynomial actually vanishes at
    its real part at numerical precision, so genuinely complex pairs close
    to the axis are not misread as zeros.
    """
    c = np.asarray(coeffs, dtype=float)
    if not c.size:
        return np.zeros(0)
    cmax = float(np.abs(c).max())
    if cmax == 0.0:
        return np.zeros(0)
    # drop noise-level leading coefficients: they inject spurious huge roots
    last = len(c)
    while last > 1 and abs(c[last - 1]) <= 1e-13 * cmax:
        last -= 1
    c = c[:last]
    if len(c) <= 1:
        return np.zeros(0)
    roots = np.polynomial.polynomial.polyroots(c)
    out = []
    for r in roots:
        local = max(1.0, abs(r))
        if abs(r.imag) <= 1e-12 * local:
            out.append(r.real)
        elif abs(r.imag) <= loose_imag_tol * local:
            value = abs(np.polynomial.polynomial.polyval(r.real, c))
            if value <= 1e-10 * cmax * (1.0 + abs(r.real)) ** (len(c) - 1):
                out.append(r.real)
    out.sort()
    merged: list[float] = []
    for z in out:
        if not merged or z - merged[-1] > 1e-7 * max(1.0, abs(z)):
            merged.append(z)
    return np.array(merged)


def _line_coefficients(poly: HomogeneousPolynomial, x, v) -> np.ndarray:
    # exact expansion: per monomial, convolve the binomial expansions of
    # (x_i + t v_i)^{e_i} across the variables
    total = np.zeros(poly.degree + 1)
    for exp, coeff in poly._terms.items():
        factor = np.array([coeff])
        for xi, vi, e in zip(x, v, exp):
            if e == 0:
                continue
            binom = np.array(
                [math.comb(e, j) * xi ** (e - j) * vi**j for j in range(e + 1)]
            )
            factor = np.convolve(factor, binom)
        total[: len(factor)] += factor
    return total
