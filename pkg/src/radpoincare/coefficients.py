"""Exact rational constants of the radial Poincare, Hardy and Rellich inequalities.

Everything here is computed with :class:`fractions.Fraction` and an exact
integer dimension ``n``.  The tables are produced by recursions:

* ``xi_table`` / ``zeta_table`` iterate a weighted Rellich inequality
  ``int (lap u)^2 / r^a >= A int u^2/r^(a+4) + B int u^2/r^(a+2) + C int u^2/r^a``
  (the triple ``(A, B, C)`` from :func:`rellich_triples`), applying it at the
  outermost exponent first and then recursing on each of the three pieces;
* ``c_table`` / ``d_table`` build the Hardy remainder coefficients of the
  higher order Poincare inequality from the low-order seeds and the
  ``xi``/``zeta`` tables.

Each table carries a list of closed-form checks (known product/sum formulas for
its end coefficients).  A disagreement is never patched: the table is marked
``unverified`` and both values are kept.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType

__all__ = [
    "TABLE_VERSION",
    "HypothesisError",
    "ClosedFormMismatch",
    "ClosedFormCheck",
    "CoeffTable",
    "sharp_constant",
    "hardy_th1_coeffs",
    "hardy_cor1_coeffs",
    "hardy_th3_coeffs",
    "rellich_triples",
    "shifted_rellich_coeffs",
    "weighted_gradient_constants",
    "low_order_table",
    "xi_table",
    "zeta_table",
    "c_table",
    "d_table",
]

TABLE_VERSION = "coeff-recursion/1"


class HypothesisError(ValueError):
    """Parameters violate the dimension/weight hypothesis of an inequality."""


class ClosedFormMismatch(ArithmeticError):
    """A recursion output disagrees with a closed-form expression (strict mode)."""


def _int_dim(n, minimum=3):
    if int(n) != n or n < minimum:
        raise HypothesisError(f"dimension must be an integer >= {minimum}, got {n!r}")
    return int(n)


def _nonneg(x, what="alpha"):
    x = Fraction(x)
    if x < 0:
        raise HypothesisError(f"{what} must be nonnegative, got {x}")
    return x


def _require(cond, msg):
    if not cond:
        raise HypothesisError(msg)


@dataclass(frozen=True)
class ClosedFormCheck:
    name: str
    recursion: Fraction
    closed_form: Fraction

    @property
    def ok(self):
        return self.recursion == self.closed_form


@dataclass(frozen=True)
class CoeffTable:
    """Exact coefficient table.

    ``entries`` maps an index to its coefficient.  For the ``Xi``/``Zeta``
    families the index ``j = 0..2 beta`` multiplies ``int u^2 / r^(base - 2j)``
    with ``base = alpha + 4 beta``; for ``C``/``D`` the index ``i = 1..k``
    multiplies ``int u^2 / r^(2i)`` (``base = 0``).
    """

    family: str
    n: int
    params: tuple
    entries: MappingProxyType
    base_exponent: Fraction
    checks: tuple = field(default=())
    version: str = TABLE_VERSION

    @property
    def status(self):
        return "verified" if all(c.ok for c in self.checks) else "unverified"

    @property
    def discrepancies(self):
        return tuple(c for c in self.checks if not c.ok)

    def weight_exponent(self, index):
        if self.family in ("Xi", "Zeta"):
            return self.base_exponent - 2 * index
        return Fraction(2 * index)

    def __getitem__(self, index):
        return self.entries[index]

    def items(self):
        return sorted(self.entries.items())

    def as_floats(self):
        return {i: float(v) for i, v in self.items()}


def _make_table(family, n, params, entries, base, checks, strict):
    table = CoeffTable(
        family, n, tuple(params), MappingProxyType(dict(sorted(entries.items()))),
        Fraction(base), tuple(checks),
    )
    if strict and table.discrepancies:
        d = table.discrepancies[0]
        raise ClosedFormMismatch(
            f"{family}{params} n={n}: {d.name}: recursion {d.recursion} != closed form {d.closed_form}"
        )
    return table


# -- single inequalities -------------------------------------------------------


def sharp_constant(n, k, l):
    """((n - 1)/2)^(2 (k - l)), the optimal Poincare constant between orders k and l."""
    n = _int_dim(n)
    if not (int(k) == k and int(l) == l and k > l >= 0):
        raise HypothesisError(f"need integers k > l >= 0, got k={k}, l={l}")
    return Fraction(n - 1, 2) ** (2 * (int(k) - int(l)))


def hardy_th1_coeffs(n, alpha):
    """(hardy, mass, g-weight) coefficients of the g-weighted Hardy inequality; 0 <= 2 alpha < n + 3."""
    n = _int_dim(n)
    a = _nonneg(alpha)
    _require(2 * a < n + 3, f"need 0 <= 2 alpha < n + 3 (n={n}, alpha={a})")
    return ((n - 2 - a) ** 2 / 4, Fraction(n - 1, 2), (n - 1) * (n - 3 - 2 * a) / 4)


def hardy_cor1_coeffs(n, alpha):
    """(hardy, mass) coefficients of the Hardy inequality without g-term; 0 <= 2 alpha <= n - 3."""
    n = _int_dim(n)
    a = _nonneg(alpha)
    _require(2 * a <= n - 3, f"need 0 <= 2 alpha <= n - 3 (n={n}, alpha={a})")
    return ((n - 2 - a) ** 2 / 4, Fraction(n - 1, 2))


def hardy_th3_coeffs(n, alpha):
    """(hardy, mass) coefficients of the Hardy inequality with mass (n - 1)/4; 0 <= alpha < n - 2."""
    n = _int_dim(n)
    a = _nonneg(alpha)
    _require(a < n - 2, f"need 0 <= alpha < n - 2 (n={n}, alpha={a})")
    return ((n - 2 - a) ** 2 / 4, Fraction(n - 1, 4))


def rellich_triples(source, n, alpha):
    """Coefficients of the weighted Rellich inequalities.

    ``th2``:  (A2, B2, G2) for ``int (lap u)^2 r^(2-a) >= A2 u^2/r^(a+2) + B2 u^2/r^a + G2 g u^2/r^a``
    ``cor2``: (A2, B2);  ``cor3``: (A2, B2/2)
    ``th4``:  (A4, B4, C4) for ``int (lap u)^2 / r^a >= A4 u^2/r^(a+4) + B4 u^2/r^(a+2) + C4 u^2/r^a``
    ``cor4``: (A4, 2 B4, 4 C4)
    """
    n = _int_dim(n)
    a = _nonneg(alpha)
    p, q = n - 2 - a, n - 2 + a
    a2 = p**2 * q**2 / 16
    b2 = p * q * (n - 1) / 4
    a4 = (n + a) ** 2 * (n - 4 - a) ** 2 / 16
    b4 = (n - 1) * p * q / 8
    c4 = Fraction((n - 1) ** 2, 16)
    if source == "th2":
        _require(a > 0 and n > max(a + 2, 2 * a - 3), f"need alpha > 0 and n > max(alpha+2, 2alpha-3) (n={n}, alpha={a})")
        return (a2, b2, (n - 1) * (n - 3 - 2 * a) * p * q / 8)
    if source == "cor2":
        _require(2 * a <= n - 3, f"need 0 <= 2 alpha <= n - 3 (n={n}, alpha={a})")
        return (a2, b2)
    if source == "cor3":
        _require(a < n - 2, f"need 0 <= alpha < n - 2 (n={n}, alpha={a})")
        return (a2, b2 / 2)
    if source == "th4":
        _require(a < n - 4, f"need 0 <= alpha < n - 4 (n={n}, alpha={a})")
        return (a4, b4, c4)
    if source == "cor4":
        _require(2 * a <= n - 7, f"need 0 <= 2 alpha <= n - 7 (n={n}, alpha={a})")
        return (a4, 2 * b4, 4 * c4)
    raise HypothesisError(f"unknown Rellich source {source!r}")


def shifted_rellich_coeffs(n, alpha):
    """Constants (shift, grad, mass) of the shifted Rellich upper bound, -2 <= alpha < n - 4:

    ``int r^-a (lap u + shift u/r^2)^2 <= int (lap u)^2/r^a - grad int |u'|^2/r^(a+2) + mass int u^2/r^(a+4)``
    """
    n = _int_dim(n)
    a = Fraction(alpha)
    _require(-2 <= a < n - 4, f"need -2 <= alpha < n - 4 (n={n}, alpha={a})")
    s = (n + a) * (n - a - 4)
    return (s / 4, s / 2, (n + a) * (n - 3 * a - 8) * (n - a - 4) ** 2 / 16)


def weighted_gradient_constants(n):
    """Lower bounds for ``int r^(2-n) |u'|^2 / int r^(2-n) u^2``: (1/4, (n - 1)/4)."""
    n = _int_dim(n)
    return (Fraction(1, 4), Fraction(n - 1, 4))


def low_order_table(source, n):
    """Remainder coefficients ``{i: c_i}`` (weights r^(-2i)) of the low-order improved inequalities.

    ``r10``: order (1, 0); ``r21``/``r20``: orders (2, 1)/(2, 0), n >= 5;
    ``dr21``/``dr20``: the same orders with larger mass coefficients, n >= 7.
    """
    n = _int_dim(n)
    quartic = Fraction((n - 4) ** 2, 16)
    if source == "r10":
        return {1: Fraction(1, 4)}
    if source in ("r21", "r20"):
        _require(n >= 5, f"{source} needs n >= 5 (n={n})")
        return {1: Fraction(n - 1, 16) if source == "r21" else Fraction(n * (n - 1), 16), 2: quartic}
    if source in ("dr21", "dr20"):
        _require(n >= 7, f"{source} needs n >= 7 (n={n})")
        return {1: Fraction(n - 1, 8) if source == "dr21" else Fraction(n * n - 1, 16), 2: quartic}
    raise HypothesisError(f"unknown low-order source {source!r}")


# -- iterated Rellich tables ---------------------------------------------------


@lru_cache(maxsize=None)
def _iterate(source, n, alpha, beta):
    if beta == 0:
        return ((0, Fraction(1)),)
    triple = rellich_triples(source, n, alpha)
    acc = {}
    # the triple splits exponent alpha into alpha + 4, alpha + 2, alpha (shift s = 0, 1, 2)
    for s, coef in enumerate(triple):
        for j, v in _iterate(source, n, alpha + 4 - 2 * s, beta - 1):
            acc[s + j] = acc.get(s + j, 0) + coef * v
    return tuple(sorted(acc.items()))


def _xi_endpoints(n, alpha, beta):
    first = Fraction(1)
    for j in range(beta):
        e = alpha + 4 * j
        first *= (n + e) ** 2 * (n - e - 4) ** 2 / Fraction(16)
    return first, Fraction(n - 1, 4) ** (2 * beta)


def _check_beta(beta):
    if int(beta) != beta or beta < 0:
        raise HypothesisError(f"beta must be a nonnegative integer, got {beta!r}")
    return int(beta)


def xi_table(n, alpha, beta, strict=False):
    """Coefficients of ``int (lap^beta u)^2 / r^alpha >= sum_j Xi^j int u^2 / r^(alpha + 4 beta - 2j)``.

    Requires ``0 <= alpha < n - 4 beta`` (no condition for beta = 0).
    """
    n = _int_dim(n)
    a = _nonneg(alpha)
    beta = _check_beta(beta)
    if beta:
        _require(a < n - 4 * beta, f"need 0 <= alpha < n - 4 beta (n={n}, alpha={a}, beta={beta})")
    entries = dict(_iterate("th4", n, a, beta))
    checks = []
    if beta:
        first, last = _xi_endpoints(n, a, beta)
        checks = [
            ClosedFormCheck("Xi^0 product", entries[0], first),
            ClosedFormCheck("Xi^(2beta) = ((n-1)/4)^(2beta)", entries[2 * beta], last),
        ]
    else:
        checks = [ClosedFormCheck("Xi_{.,0} = 1", entries[0], Fraction(1))]
    return _make_table("Xi", n, (a, beta), entries, a + 4 * beta, checks, strict)


def zeta_table(n, alpha, beta, strict=False):
    """Like :func:`xi_table` but iterating the ``cor4`` triple; requires ``0 <= 2 alpha <= n - 8 beta + 1``."""
    n = _int_dim(n)
    a = _nonneg(alpha)
    beta = _check_beta(beta)
    if beta:
        _require(2 * a <= n - 8 * beta + 1, f"need 0 <= 2 alpha <= n - 8 beta + 1 (n={n}, alpha={a}, beta={beta})")
    entries = dict(_iterate("cor4", n, a, beta))
    if beta:
        xi = dict(_iterate("th4", n, a, beta))
        checks = [
            ClosedFormCheck("zeta^0 = Xi^0", entries[0], xi[0]),
            ClosedFormCheck("zeta^(2beta) = 4^beta Xi^(2beta)", entries[2 * beta], 4**beta * xi[2 * beta]),
        ]
    else:
        checks = [ClosedFormCheck("zeta_{.,0} = 1", entries[0], Fraction(1))]
    return _make_table("Zeta", n, (a, beta), entries, a + 4 * beta, checks, strict)


# -- Poincare remainder tables -------------------------------------------------


def _family_parts(family, n):
    if family == "C":
        return "th4", low_order_table("r20", n) if n >= 5 else None, low_order_table("r21", n) if n >= 5 else None
    return "cor4", low_order_table("dr20", n) if n >= 7 else None, low_order_table("dr21", n) if n >= 7 else None


def _spread(acc, coef, weight_table, shift):
    """acc[shift - j] += coef * W^j for the iterated table W (weights r^-(2 shift - 2j))."""
    for j, w in weight_table:
        acc[shift - j] = acc.get(shift - j, 0) + coef * w


@lru_cache(maxsize=None)
def _poincare_table(family, n, k, l):
    """Raw recursion for the C (family 'C') or D (family 'D') coefficients."""
    source, seed20, seed21 = _family_parts(family, n)
    lam = lambda j: Fraction(n - 1, 2) ** (2 * j)  # noqa: E731
    W = lambda a, b: _iterate(source, n, Fraction(a), b)  # noqa: E731
    acc = {}
    if l == 0:
        if k == 1:
            return ((1, Fraction(1, 4)),)
        if k == 2:
            return tuple(sorted(seed20.items()))
        # apply the (k-2)-inequality to lap u, then the order-(2,0) seed and one Rellich iteration
        for i, c in seed20.items():
            acc[i] = acc.get(i, 0) + lam(k - 2) * c
        for i, c in _poincare_table(family, n, k - 2, 0):
            _spread(acc, c, W(2 * i, 1), i + 2)
    elif l % 2 == 0:
        h = l // 2
        for i, c in _poincare_table(family, n, k - l, 0):
            _spread(acc, c, W(2 * i, h), i + 2 * h)
    elif k % 2 == 0:
        h = (l - 1) // 2
        for i, c in seed21.items():
            _spread(acc, lam(k - l - 1) * c, W(2 * i, h), i + 2 * h)
        if k - l - 1 > 0:
            for i, c in _poincare_table(family, n, k - l - 1, 0):
                _spread(acc, c, W(2 * i, h + 1), i + 2 * h + 2)
    else:
        m = (k - 1) // 2
        for i, c in _poincare_table(family, n, k - 1, l):
            acc[i] = acc.get(i, 0) + lam(1) * c
        _spread(acc, Fraction(1, 4), W(2, m), 1 + 2 * m)
    return tuple(sorted(acc.items()))


def _get(family, n, k, l):
    return dict(_poincare_table(family, n, k, l))


def _xi_entry(n, alpha, beta, j):
    return dict(_iterate("th4", n, Fraction(alpha), beta))[j]


def _zeta_entry(n, alpha, beta, j):
    return dict(_iterate("cor4", n, Fraction(alpha), beta))[j]


def _c_checks(n, k, l, t):
    X = lambda a, b, j: _xi_entry(n, a, b, j)  # noqa: E731
    checks = []
    if l == 0:
        if k % 2 == 0:
            m = k // 2
            first = Fraction(n * (n - 1), 2 ** (4 * m)) * sum((n - 1) ** (4 * m - 2 * j - 2) for j in range(1, m + 1))
            last = Fraction(n - 4, 2 ** (2 * m)) ** 2
            for j in range(1, m):
                last *= (n + 4 * j) ** 2 * (n - 4 * j - 4) ** 2
        else:
            m = (k - 1) // 2
            first = Fraction(n * (n - 1), 2 ** (4 * m + 2)) * sum(
                (n - 1) ** (2 * m + 2 * j - 2) for j in range(1, m + 1)
            ) + Fraction((n - 1) ** (2 * m), 2 ** (4 * m + 2))
            last = Fraction(1, 2 ** (4 * m + 2))
            for j in range(1, m + 1):
                last *= (n + 4 * j - 2) ** 2 * (n - 4 * j - 2) ** 2
        checks += [
            ClosedFormCheck("C^1_{k,0} closed form", t[1], first),
            ClosedFormCheck("C^k_{k,0} closed form", t[k], last),
        ]
        if k == 1:
            checks.append(ClosedFormCheck("C^1_{1,0} = 1/4", t[1], Fraction(1, 4)))
        if k == 2:
            checks += [
                ClosedFormCheck("C^1_{2,0} = n(n-1)/16", t[1], Fraction(n * (n - 1), 16)),
                ClosedFormCheck("C^2_{2,0} = (n-4)^2/16", t[2], Fraction((n - 4) ** 2, 16)),
            ]
    elif l % 2 == 0:
        base = _get("C", n, k - l, 0)
        checks += [
            ClosedFormCheck("C^k = C^{k-l}_{k-l,0} Xi^0_{2(k-l),l/2}", t[k], base[k - l] * X(2 * (k - l), l // 2, 0)),
            ClosedFormCheck("C^1 = C^1_{k-l,0} Xi^l_{2,l/2}", t[1], base[1] * X(2, l // 2, l)),
        ]
    elif k % 2 == 0:
        if k - l == 1:
            first = Fraction(n - 1, 16) * X(2, (l - 1) // 2, l - 1)
            last = Fraction((n - 4) ** 2, 16) * X(4, (l - 1) // 2, 0)
        else:
            base = _get("C", n, k - l - 1, 0)
            first = Fraction((n - 1) ** (2 * k - 2 * l - 1), 2 ** (2 * k - 2 * l + 2)) * X(2, (l - 1) // 2, l - 1) + base[
                1
            ] * X(2, (l + 1) // 2, l + 1)
            last = base[k - l - 1] * X(2 * (k - l - 1), (l + 1) // 2, 0)
        checks += [ClosedFormCheck("C^1 closed form", t[1], first), ClosedFormCheck("C^k closed form", t[k], last)]
    else:
        if k - l == 2:
            first = Fraction((n - 1) ** 3, 2**6) * X(2, (l - 1) // 2, l - 1) + Fraction(1, 4) * X(2, (l + 1) // 2, l + 1)
        else:
            first = Fraction(1, 4) * X(2, (k - 1) // 2, k - 1) + Fraction((n - 1) ** 2, 4) * _get("C", n, k - 1, l)[1]
        last = Fraction(1, 4) * X(2, (k - 1) // 2, 0)
        checks += [ClosedFormCheck("C^1 closed form", t[1], first), ClosedFormCheck("C^k closed form", t[k], last)]
    return checks


def _d_checks(n, k, l, t):
    Z = lambda a, b, j: _zeta_entry(n, a, b, j)  # noqa: E731
    checks = []
    if l == 0:
        if k % 2 == 0:
            m = k // 2
            first = Fraction(n * n - 1, 16) * sum(Fraction(n - 1, 2) ** (4 * m - 2 * j - 2) for j in range(1, m + 1))
        else:
            m = (k - 1) // 2
            first = (n * n - 1) * sum(
                Fraction((n - 1) ** (2 * m + 2 * j - 2), 2 ** (2 * m + 2 * j + 2)) for j in range(1, m + 1)
            ) + Fraction((n - 1) ** (2 * m), 2 ** (2 * m + 2))
        checks += [
            ClosedFormCheck("D^1_{k,0} closed form", t[1], first),
            ClosedFormCheck("D^k_{k,0} = C^k_{k,0}", t[k], _get("C", n, k, 0)[k]),
        ]
        if k == 2:
            checks.append(ClosedFormCheck("D^1_{2,0} = (n^2-1)/16", t[1], Fraction(n * n - 1, 16)))
    elif l % 2 == 0:
        base = _get("D", n, k - l, 0)
        checks += [
            ClosedFormCheck("D^k = D^{k-l}_{k-l,0} zeta^0_{2(k-l),l/2}", t[k], base[k - l] * Z(2 * (k - l), l // 2, 0)),
            ClosedFormCheck("D^1 = D^1_{k-l,0} zeta^l_{2,l/2}", t[1], base[1] * Z(2, l // 2, l)),
        ]
    elif k % 2 == 0:
        if k - l == 1:
            first = Fraction(n - 1, 8) * Z(2, (l - 1) // 2, l - 1)
            last = Fraction((n - 4) ** 2, 16) * Z(4, (l - 1) // 2, 0)
        else:
            base = _get("D", n, k - l - 1, 0)
            first = Fraction((n - 1) ** (2 * k - 2 * l - 1), 2 ** (2 * k - 2 * l + 1)) * Z(2, (l - 1) // 2, l - 1) + base[
                1
            ] * Z(2, (l + 1) // 2, l + 1)
            last = base[k - l - 1] * Z(2 * (k - l - 1), (l + 1) // 2, 0)
        checks += [ClosedFormCheck("D^1 closed form", t[1], first), ClosedFormCheck("D^k closed form", t[k], last)]
    else:
        if k - l == 2:
            first = Fraction((n - 1) ** 3, 2**5) * Z(2, (l - 1) // 2, l - 1) + Fraction(1, 4) * Z(2, (l + 1) // 2, l + 1)
        else:
            first = Fraction(1, 4) * Z(2, (k - 1) // 2, k - 1) + Fraction((n - 1) ** 2, 4) * _get("D", n, k - 1, l)[1]
        last = Fraction(1, 4) * Z(2, (l + 1) // 2, 0)
        checks += [
            ClosedFormCheck("D^1 closed form", t[1], first),
            ClosedFormCheck("D^k = zeta^0_{2,(l+1)/2} / 4", t[k], last),
        ]
    return checks


def _check_orders(k, l):
    if not (int(k) == k and int(l) == l and k > l >= 0):
        raise HypothesisError(f"need integers k > l >= 0, got k={k}, l={l}")
    return int(k), int(l)


def c_table(n, k, l, strict=False):
    """Hardy remainder coefficients ``C^i_{k,l}`` (weights r^(-2i), i = 1..k); requires n > 2k."""
    k, l = _check_orders(k, l)
    n = _int_dim(n)
    _require(n > 2 * k, f"need n > 2k (n={n}, k={k})")
    t = _get("C", n, k, l)
    return _make_table("C", n, (k, l), t, 0, _c_checks(n, k, l, t), strict)


def d_table(n, k, l, strict=False):
    """Remainder coefficients ``D^i_{k,l}`` from the zeta-based recursion; requires n >= 4k - 1."""
    k, l = _check_orders(k, l)
    n = _int_dim(n)
    _require(n >= 4 * k - 1, f"need n >= 4k - 1 (n={n}, k={k})")
    t = _get("D", n, k, l)
    return _make_table("D", n, (k, l), t, 0, _d_checks(n, k, l, t), strict)
