"""Truncated multivariate power series with exact rational coefficients.

A :class:`Series` stores a finite map from exponent vectors to nonzero
``Fraction`` values.  Truncation is graded by a single *principal* variable:
coefficients are kept for principal exponent strictly below ``order``, while
the remaining variables appear polynomially inside each coefficient.  All
arithmetic is exact; floating point never enters this module.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

__all__ = [
    "Series",
    "SeriesError",
    "SolveDivergenceError",
    "solve_fixed_point",
]

Rational = Fraction | int


class SeriesError(ValueError):
    """Raised on contract violations (variable mismatch, bad division, ...)."""


class SolveDivergenceError(SeriesError):
    """Raised when fixed-point iteration fails to gain valuation."""


def _as_fraction(c: Rational) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Series:
    """Immutable truncated power series over ``Fraction``.

    ``vars`` is an ordered tuple of variable names, ``principal`` the grading
    variable, ``order`` the truncation order N (exponents of the principal
    variable below N are stored), and ``coeffs`` maps exponent tuples
    (aligned with ``vars``) to nonzero rationals.
    """

    __slots__ = ("vars", "principal", "order", "coeffs", "_pidx")

    def __init__(
        self,
        vars: Sequence[str],
        principal: str,
        order: int,
        coeffs: Mapping[tuple[int, ...], Rational] | None = None,
    ):
        vars = tuple(vars)
        if principal not in vars:
            raise SeriesError(f"principal variable {principal!r} not in {vars}")
        if order < 0:
            raise SeriesError("order must be non-negative")
        if len(set(vars)) != len(vars):
            raise SeriesError("duplicate variable names")
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "principal", principal)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_pidx", vars.index(principal))
        clean: dict[tuple[int, ...], Fraction] = {}
        if coeffs:
            pidx = self._pidx
            for exps, c in coeffs.items():
                exps = tuple(exps)
                if len(exps) != len(vars) or any(e < 0 for e in exps):
                    raise SeriesError(f"bad exponent vector {exps}")
                if exps[pidx] >= order:
                    continue
                c = _as_fraction(c)
                if c != 0:
                    acc = clean.get(exps)
                    c = c if acc is None else acc + c
                    if c != 0:
                        clean[exps] = c
                    elif exps in clean:
                        del clean[exps]
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("Series is immutable")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, vars: Sequence[str], principal: str, order: int) -> "Series":
        return cls(vars, principal, order, {})

    @classmethod
    def constant(cls, c: Rational, vars: Sequence[str], principal: str, order: int) -> "Series":
        exps = tuple(0 for _ in vars)
        return cls(vars, principal, order, {exps: c})

    @classmethod
    def monomial(
        cls,
        c: Rational,
        powers: Mapping[str, int],
        vars: Sequence[str],
        principal: str,
        order: int,
    ) -> "Series":
        vars = tuple(vars)
        unknown = set(powers) - set(vars)
        if unknown:
            raise SeriesError(f"unknown variables {unknown}")
        exps = tuple(powers.get(v, 0) for v in vars)
        return cls(vars, principal, order, {exps: c})

    @classmethod
    def variable(cls, name: str, vars: Sequence[str], principal: str, order: int) -> "Series":
        return cls.monomial(1, {name: 1}, vars, principal, order)

    # ------------------------------------------------------------------
    # basic queries

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, powers: Mapping[str, int]) -> Fraction:
        """Coefficient of the monomial given by ``powers`` (others zero)."""
        exps = tuple(powers.get(v, 0) for v in self.vars)
        return self.coeffs.get(exps, Fraction(0))

    def principal_slice(self, k: int) -> dict[tuple[int, ...], Fraction]:
        """Coefficient of principal**k as a map over the remaining exponents."""
        pidx = self._pidx
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.coeffs.items():
            if exps[pidx] == k:
                out[exps[:pidx] + exps[pidx + 1 :]] = c
        return out

    def valuation(self) -> int | None:
        """Minimal principal exponent with a nonzero coefficient, or None."""
        pidx = self._pidx
        return min((e[pidx] for e in self.coeffs), default=None)

    def principal_degree(self) -> int | None:
        pidx = self._pidx
        return max((e[pidx] for e in self.coeffs), default=None)

    def var_degree(self, var: str) -> int:
        i = self.vars.index(var)
        return max((e[i] for e in self.coeffs), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.vars == other.vars
            and self.principal == other.principal
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    __hash__ = None  # type: ignore[assignment]

    def eq_to_order(self, other: "Series", order: int | None = None) -> bool:
        """Coefficientwise equality up to the given (or common) order."""
        if self.vars != other.vars or self.principal != other.principal:
            raise SeriesError("variable mismatch in comparison")
        n = min(self.order, other.order)
        if order is not None:
            n = min(n, order)
        return self.truncate(n).coeffs == other.truncate(n).coeffs

    def __repr__(self) -> str:
        terms = []
        for exps in sorted(self.coeffs)[:8]:
            c = self.coeffs[exps]
            mono = "*".join(
                f"{v}^{e}" for v, e in zip(self.vars, exps) if e
            )
            terms.append(f"{c}{'*' + mono if mono else ''}")
        body = " + ".join(terms) if terms else "0"
        if len(self.coeffs) > 8:
            body += " + ..."
        return f"Series[{body} + O({self.principal}^{self.order})]"

    # ------------------------------------------------------------------
    # ring operations

    def _check_compatible(self, other: "Series") -> None:
        if self.vars != other.vars or self.principal != other.principal:
            raise SeriesError(
                f"variable mismatch: {self.vars}/{self.principal} vs "
                f"{other.vars}/{other.principal}"
            )

    def __add__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.vars, self.principal, self.order)
        self._check_compatible(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            acc = out.get(exps, Fraction(0)) + c
            if acc:
                out[exps] = acc
            elif exps in out:
                del out[exps]
        return Series(self.vars, self.principal, order, out)

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(
            self.vars, self.principal, self.order, {e: -c for e, c in self.coeffs.items()}
        )

    def __sub__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            other = Series.constant(other, self.vars, self.principal, self.order)
        return self + (-other)

    def __rsub__(self, other) -> "Series":
        return (-self) + other

    def scale(self, c: Rational) -> "Series":
        c = _as_fraction(c)
        if c == 0:
            return Series.zero(self.vars, self.principal, self.order)
        return Series(
            self.vars, self.principal, self.order, {e: c * v for e, v in self.coeffs.items()}
        )

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_compatible(other)
        order = min(self.order, other.order)
        pidx = self._pidx
        out: dict[tuple[int, ...], Fraction] = {}
        # iterate over the smaller support in the outer loop
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        for e1, c1 in a.items():
            p1 = e1[pidx]
            for e2, c2 in b.items():
                if p1 + e2[pidx] >= order:
                    continue
                exps = tuple(x + y for x, y in zip(e1, e2))
                acc = out.get(exps, Fraction(0)) + c1 * c2
                if acc:
                    out[exps] = acc
                elif exps in out:
                    del out[exps]
        return Series(self.vars, self.principal, order, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Series":
        if n < 0:
            raise SeriesError("negative powers not supported; use div_unit")
        result = Series.constant(1, self.vars, self.principal, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def truncate(self, order: int) -> "Series":
        if order >= self.order:
            if order == self.order:
                return self
            raise SeriesError("cannot extend truncation order")
        return Series(self.vars, self.principal, order, self.coeffs)

    def with_order(self, order: int) -> "Series":
        """Reinterpret at a (possibly higher) order; caller asserts exactness.

        Only safe for polynomials known exactly, e.g. freshly built monomials.
        """
        return Series(self.vars, self.principal, order, self.coeffs)

    # ------------------------------------------------------------------
    # calculus

    def derive(self, var: str) -> "Series":
        """Formal partial derivative; principal derivation drops order by 1."""
        if var not in self.vars:
            raise SeriesError(f"unknown variable {var!r}")
        i = self.vars.index(var)
        order = self.order - 1 if var == self.principal else self.order
        if order < 0:
            order = 0
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.coeffs.items():
            if exps[i] == 0:
                continue
            e2 = exps[:i] + (exps[i] - 1,) + exps[i + 1 :]
            out[e2] = c * exps[i]
        return Series(self.vars, self.principal, order, out)

    def integrate(self, var: str) -> "Series":
        """Formal antiderivative with zero constant of integration."""
        if var not in self.vars:
            raise SeriesError(f"unknown variable {var!r}")
        i = self.vars.index(var)
        order = self.order + 1 if var == self.principal else self.order
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.coeffs.items():
            e2 = exps[:i] + (exps[i] + 1,) + exps[i + 1 :]
            out[e2] = c / (exps[i] + 1)
        return Series(self.vars, self.principal, order, out)

    # ------------------------------------------------------------------
    # substitution and division

    def substitute(self, var: str, g: "Series") -> "Series":
        """Replace ``var`` by the series ``g``.

        The remaining variables of ``self`` must all be variables of ``g``;
        the result lives on ``g``'s variables.  Substituting into the
        principal variable requires ``g`` to have zero constant term (an
        infinite-degree dependence on a unit is rejected).
        """
        if var not in self.vars:
            raise SeriesError(f"unknown variable {var!r}")
        rest = tuple(v for v in self.vars if v != var)
        missing = set(rest) - set(g.vars)
        if missing:
            raise SeriesError(f"substitution target lacks variables {missing}")
        vi = self.vars.index(var)
        gval = g.valuation()
        if var == self.principal:
            if gval is not None and gval == 0:
                raise SeriesError(
                    "substitution into the principal variable requires zero "
                    "constant term"
                )
            v = gval if gval is not None else 1
            order = min(g.order, self.order * max(v, 1))
        else:
            order = g.order
            if not self.is_zero() and self.order < order and self.var_degree(self.principal) >= self.order:
                # self truncated in its own principal which is not `var`;
                # propagate the stricter order if that variable survives
                if self.principal in g.vars:
                    order = min(order, self.order)
        # map exponent vectors of `rest` into g's variable frame
        lift = [g.vars.index(v) for v in rest]
        nzero = len(g.vars)
        result = Series.zero(g.vars, g.principal, order)
        # group terms of self by power of `var`
        by_power: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for exps, c in self.coeffs.items():
            k = exps[vi]
            rest_exps = exps[:vi] + exps[vi + 1 :]
            by_power.setdefault(k, {})[rest_exps] = c
        gpow = Series.constant(1, g.vars, g.principal, order)
        gk = g.truncate(min(order, g.order)) if g.order > order else g
        prev_k = 0
        for k in sorted(by_power):
            for _ in range(k - prev_k):
                gpow = gpow * gk
            prev_k = k
            if gpow.is_zero() and k > 0:
                break
            part: dict[tuple[int, ...], Fraction] = {}
            for rest_exps, c in by_power[k].items():
                base = [0] * nzero
                for j, e in zip(lift, rest_exps):
                    base[j] = e
                part[tuple(base)] = part.get(tuple(base), Fraction(0)) + c
            result = result + Series(g.vars, g.principal, order, part) * gpow
        return result

    def specialize(self, var: str, value: Rational) -> "Series":
        """Evaluate one (non-principal) variable at an exact rational point."""
        if var == self.principal:
            raise SeriesError("cannot specialize the principal variable")
        i = self.vars.index(var)
        value = _as_fraction(value)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in self.coeffs.items():
            e2 = exps[:i] + (0,) + exps[i + 1 :]
            acc = out.get(e2, Fraction(0)) + c * value ** exps[i]
            if acc:
                out[e2] = acc
            elif e2 in out:
                del out[e2]
        return Series(self.vars, self.principal, self.order, out)

    def drop_var(self, var: str) -> "Series":
        """Remove a variable that no longer occurs (all exponents zero)."""
        if var == self.principal:
            raise SeriesError("cannot drop the principal variable")
        i = self.vars.index(var)
        if any(e[i] for e in self.coeffs):
            raise SeriesError(f"variable {var!r} still occurs")
        new_vars = self.vars[:i] + self.vars[i + 1 :]
        out = {e[:i] + e[i + 1 :]: c for e, c in self.coeffs.items()}
        return Series(new_vars, self.principal, self.order, out)

    def divide_monomial(self, powers: Mapping[str, int], c: Rational = 1) -> "Series":
        """Exact division by ``c * prod(var**k)``; error if not divisible."""
        c = _as_fraction(c)
        if c == 0:
            raise SeriesError("division by zero monomial")
        shift = tuple(powers.get(v, 0) for v in self.vars)
        pidx = self._pidx
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, val in self.coeffs.items():
            e2 = tuple(e - s for e, s in zip(exps, shift))
            if any(e < 0 for e in e2):
                raise SeriesError(
                    f"monomial division leaves negative exponent at {exps}"
                )
            out[e2] = val / c
        return Series(self.vars, self.principal, self.order - shift[pidx], out)

    def unit_inverse(self) -> "Series":
        """Inverse of a series whose constant term is a nonzero rational."""
        c0 = self.coefficient({})
        slice0 = self.principal_slice(0)
        if c0 == 0 or len(slice0) != 1:
            raise SeriesError(
                "unit_inverse needs a constant term that is a pure rational"
            )
        order = self.order
        pidx = self._pidx
        # inv computed slice by slice in the principal grading:
        # inv_k = -(1/c0) * sum_{j<k} inv_j * self_{k-j}
        by_power: dict[int, list[tuple[tuple[int, ...], Fraction]]] = {}
        for exps, v in self.coeffs.items():
            by_power.setdefault(exps[pidx], []).append((exps, v))
        inv: dict[tuple[int, ...], Fraction] = {
            tuple(0 for _ in self.vars): 1 / c0
        }
        inv_by_power: dict[int, list[tuple[tuple[int, ...], Fraction]]] = {
            0: [(tuple(0 for _ in self.vars), 1 / c0)]
        }
        for k in range(1, order):
            acc: dict[tuple[int, ...], Fraction] = {}
            for j in range(0, k):
                for e1, c1 in inv_by_power.get(j, []):
                    for e2, c2 in by_power.get(k - j, []):
                        exps = tuple(x + y for x, y in zip(e1, e2))
                        acc[exps] = acc.get(exps, Fraction(0)) + c1 * c2
            layer: list[tuple[tuple[int, ...], Fraction]] = []
            for exps, v in acc.items():
                if v:
                    w = -v / c0
                    inv[exps] = w
                    layer.append((exps, w))
            if layer:
                inv_by_power[k] = layer
        return Series(self.vars, self.principal, order, inv)

    def div_unit(self, other: "Series") -> "Series":
        """Exact division by a unit series (pure rational constant term)."""
        self._check_compatible(other)
        return self * other.unit_inverse()

    # ------------------------------------------------------------------
    # compositional inverse

    def revert(self) -> "Series":
        """Compositional inverse in the principal variable.

        Requires valuation exactly 1 with a nonzero *rational* leading
        coefficient.  The result g satisfies self(g) = id to the common
        truncation order (verified before returning).
        """
        var = self.principal
        if self.valuation() != 1:
            raise SeriesError("revert needs valuation exactly 1")
        lead = self.principal_slice(1)
        zero_rest = tuple(0 for _ in range(len(self.vars) - 1))
        if set(lead) != {zero_rest}:
            raise SeriesError("revert needs a constant leading coefficient")
        c1 = lead[zero_rest]
        order = self.order
        g = Series.variable(var, self.vars, var, order).scale(1 / c1)
        # Coefficients of g are fixed degree by degree: adding d*var^m to g
        # perturbs self(g) by c1*d*var^m at order m.
        for m in range(2, order):
            err = self.substitute(var, g) - Series.variable(var, self.vars, var, order)
            slice_m = err.principal_slice(m)
            if not slice_m:
                continue
            fix: dict[tuple[int, ...], Fraction] = {}
            i = self.vars.index(var)
            for rest, c in slice_m.items():
                exps = rest[:i] + (m,) + rest[i:]
                fix[exps] = -c / c1
            g = g + Series(self.vars, var, order, fix)
        check = self.substitute(var, g) - Series.variable(var, self.vars, var, order)
        if not check.is_zero():
            raise SeriesError("revert failed internal round-trip verification")
        return g

    # ------------------------------------------------------------------
    # numeric evaluation and serialization

    def evaluate(self, point: Mapping[str, float | Fraction]) -> Fraction | float:
        """Evaluate the stored truncation at a point (exact if all Fractions)."""
        missing = set(self.vars) - set(point)
        if missing:
            raise SeriesError(f"missing values for {missing}")
        vals = [point[v] for v in self.vars]
        total: Fraction | float = Fraction(0)
        for exps, c in self.coeffs.items():
            term: Fraction | float = c
            for v, e in zip(vals, exps):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def principal_coefficients(self, upto: int | None = None) -> list[Fraction]:
        """Univariate coefficient list; requires all other exponents zero."""
        n = self.order if upto is None else min(upto + 1, self.order)
        pidx = self._pidx
        out = [Fraction(0)] * n
        for exps, c in self.coeffs.items():
            if any(e for i, e in enumerate(exps) if i != pidx):
                raise SeriesError("series is not univariate in the principal variable")
            if exps[pidx] < n:
                out[exps[pidx]] = c
        return out

    def to_json(self) -> dict:
        """Canonical JSON form; term list sorted lexicographically."""
        terms = [
            [list(exps), f"{c.numerator}/{c.denominator}"]
            for exps, c in sorted(self.coeffs.items())
        ]
        return {
            "vars": list(self.vars),
            "principal": self.principal,
            "order": self.order,
            "terms": terms,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Series":
        coeffs = {}
        for exps, frac in data["terms"]:
            num, den = frac.split("/")
            coeffs[tuple(exps)] = Fraction(int(num), int(den))
        return cls(data["vars"], data["principal"], data["order"], coeffs)


# ----------------------------------------------------------------------
# algebraic system solving


def solve_fixed_point(
    rhs: Callable[[list[Series]], Iterable[Series]],
    n_unknowns: int,
    vars: Sequence[str],
    principal: str,
    order: int,
    max_iter: int | None = None,
) -> list[Series]:
    """Solve f = rhs(f) by Picard iteration in the principal grading.

    The map must be contractive: each iteration has to strictly increase the
    valuation of the correction.  Iterations run at a growing truncation
    order so early rounds stay cheap; the solution is re-substituted at full
    order before returning and must reproduce itself exactly.
    """
    current = [Series.zero(vars, principal, order) for _ in range(n_unknowns)]
    limit = order + 2 if max_iter is None else max_iter
    last_val: int | None = -1
    for it in range(limit):
        work_order = min(it + 2, order)
        truncated = [f.truncate(min(work_order, f.order)) for f in current]
        nxt = [f.truncate(work_order) for f in rhs(truncated)]
        diffs = [a - b for a, b in zip(nxt, truncated)]
        if all(d.is_zero() for d in diffs) and work_order == order:
            resub = list(rhs(nxt))
            for a, b in zip(resub, nxt):
                if not a.truncate(order).eq_to_order(b):
                    raise SolveDivergenceError("solution does not re-substitute")
            return [f.truncate(order) for f in nxt]
        val = min(
            (d.valuation() for d in diffs if d.valuation() is not None),
            default=None,
        )
        if val is not None and last_val is not None and val <= last_val and work_order == order:
            raise SolveDivergenceError(
                f"valuation stalled at {val} on iteration {it}: "
                "system is not contractive in the principal grading"
            )
        last_val = val if work_order == order else None
        current = [f.with_order(order) for f in nxt]
    raise SolveDivergenceError(
        f"no fixed point after {limit} iterations at order {order}"
    )
