"""Numerical checks of the radial inequalities over a library of test functions.

Every inequality is written as ``big >= small`` where each side is a sum of
terms ``coef * int_{H^N} w(r) |T u|^2 dv`` with ``T`` a radial operator and
``w`` a power of ``r`` (optionally times the g-weight).  Coefficients come
from :mod:`radpoincare.coefficients`; a violated hypothesis is reported as a
``spec_error`` rather than a failure.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, hypgeom
from . import coefficients as co
from .jets import Jet
from .quadrature import QuadratureConfig, WeightedIntegralSpec, integrate_hn_radial
from .radial import RadialJetFunction, default_library, laplace_r, nabla_r_k

__all__ = [
    "SPEC_IDS",
    "SUITES",
    "Term",
    "InequalitySpec",
    "HarnessConfig",
    "CheckRow",
    "CheckReport",
    "SuiteReport",
    "check_inequality",
    "suite_specs",
    "run_suite",
    "zero_function",
    "load_config",
]

_POINCARE_IDS = ("main_poincare",)
_HARDY_RELLICH_IDS = (
    "th1", "cor1", "th2", "cor2", "lemma3", "mu_bound", "th3", "cor3",
    "lemma5", "th4", "cor4", "lemma6", "lemma7",
)
_REMAINDER_IDS = ("r21", "r20", "dr21", "dr20", "C_family", "D_family")
SPEC_IDS = _POINCARE_IDS + _HARDY_RELLICH_IDS + _REMAINDER_IDS
SUITES = {
    "all_section2": _POINCARE_IDS,
    "all_section3": _HARDY_RELLICH_IDS,
    "all_section4": _REMAINDER_IDS,
    "all": SPEC_IDS,
}
_ALPHA_SPECS = {"th1", "cor1", "th2", "cor2", "th3", "cor3", "lemma5", "th4", "cor4", "lemma6", "lemma7"}
_BETA_SPECS = {"lemma6", "lemma7"}
_KL_SPECS = {"main_poincare", "C_family", "D_family"}

SUITE_ALPHAS = (0, 1, 2)
SUITE_BETAS = (1, 2)
SUITE_MAX_K = 4


@dataclass(frozen=True)
class Term:
    """``coef * int r^-power |op u|^2 dv``.

    ``op`` is ``("nabla", k)`` for the iterated radial operator, or
    ``("shifted_lap", s)`` for ``lap u + s u / r^2``; ``g`` multiplies the
    integrand by the g-weight.
    """

    coef: Fraction
    op: tuple
    power: Fraction = Fraction(0)
    g: bool = False

    @property
    def order(self):
        return self.op[1] if self.op[0] == "nabla" else 2

    def label(self):
        name = f"|nabla^{self.op[1]} u|^2" if self.op[0] == "nabla" else f"(lap u + {self.op[1]} u/r^2)^2"
        w = f" r^-{self.power}" if self.power else ""
        return f"{self.coef} * int {'g ' if self.g else ''}{name}{w}"


def _t(coef, order, power=0, g=False):
    return Term(Fraction(coef), ("nabla", int(order)), Fraction(power), g)


@dataclass(frozen=True)
class InequalitySpec:
    id: str
    n: int
    alpha: int | None = None
    k: int | None = None
    l: int | None = None
    beta: int | None = None
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.id not in SPEC_IDS:
            raise co.HypothesisError(f"unknown inequality id {self.id!r}; choose from {SPEC_IDS}")
        needs = {
            "alpha": self.id in _ALPHA_SPECS,
            "beta": self.id in _BETA_SPECS,
            "k": self.id in _KL_SPECS,
            "l": self.id in _KL_SPECS,
        }
        for name, required in needs.items():
            if required and getattr(self, name) is None:
                raise co.HypothesisError(f"{self.id} requires parameter {name}")
        if not self.tolerance >= 0:
            raise ValueError("tolerance must be nonnegative")

    @property
    def label(self):
        parts = [f"{p}={getattr(self, p)}" for p in ("alpha", "beta", "k", "l") if getattr(self, p) is not None]
        return f"{self.id}({','.join(parts)})" if parts else self.id

    def sides(self):
        """``(big, small)`` term lists; raises ``HypothesisError`` outside the hypotheses."""
        return _SIDES[self.id](self)


# -- inequality definitions ---------------------------------------------------


def _main_poincare(s):
    c = co.sharp_constant(s.n, s.k, s.l)
    return [_t(1, s.k)], [_t(c, s.l)]


def _hardy(coeffs_fn):
    def sides(s):
        cs = coeffs_fn(s.n, s.alpha)
        small = [_t(cs[0], 0, s.alpha + 2), _t(cs[1], 0, s.alpha)]
        if len(cs) == 3:
            small.append(_t(cs[2], 0, s.alpha, g=True))
        return [_t(1, 1, s.alpha)], small

    return sides


def _rellich_weighted(source):
    # int (lap u)^2 r^(2 - alpha) >= A u^2/r^(alpha+2) + B u^2/r^alpha [+ G g u^2/r^alpha]
    def sides(s):
        cs = co.rellich_triples(source, s.n, s.alpha)
        small = [_t(cs[0], 0, s.alpha + 2), _t(cs[1], 0, s.alpha)]
        if len(cs) == 3:
            small.append(_t(cs[2], 0, s.alpha, g=True))
        return [_t(1, 2, s.alpha - 2)], small

    return sides


def _rellich_fourth(source):
    def sides(s):
        cs = co.rellich_triples(source, s.n, s.alpha)
        small = [_t(c, 0, s.alpha + 4 - 2 * j) for j, c in enumerate(cs)]
        return [_t(1, 2, s.alpha)], small

    return sides


def _weighted_gradient_hardy(s):
    c, _ = co.weighted_gradient_constants(s.n)
    return [_t(1, 1, s.n - 2)], [_t(c, 0, s.n - 2)]


def _weighted_gradient_mass(s):
    _, c = co.weighted_gradient_constants(s.n)
    return [_t(1, 1, s.n - 2)], [_t(c, 0, s.n - 2)]


def _shifted_rellich(s):
    shift, grad, mass = co.shifted_rellich_coeffs(s.n, s.alpha)
    big = [_t(1, 2, s.alpha), _t(-grad, 1, s.alpha + 2), _t(mass, 0, s.alpha + 4)]
    small = [Term(Fraction(1), ("shifted_lap", shift), Fraction(s.alpha))]
    return big, small


def _iterated(table_fn):
    def sides(s):
        table = table_fn(s.n, s.alpha, s.beta)
        small = [_t(v, 0, table.weight_exponent(j)) for j, v in table.items()]
        return [_t(1, 2 * s.beta, s.alpha)], small

    return sides


def _low_order(source):
    k, l = (2, 1) if source.endswith("21") else (2, 0)

    def sides(s):
        table = co.low_order_table(source, s.n)
        small = [_t(co.sharp_constant(s.n, k, l), l)]
        small += [_t(v, 0, 2 * i) for i, v in sorted(table.items())]
        return [_t(1, k)], small

    return sides


def _family(table_fn):
    def sides(s):
        table = table_fn(s.n, s.k, s.l)
        small = [_t(co.sharp_constant(s.n, s.k, s.l), s.l)]
        small += [_t(v, 0, table.weight_exponent(i)) for i, v in table.items()]
        return [_t(1, s.k)], small

    return sides


_SIDES = {
    "main_poincare": _main_poincare,
    "th1": _hardy(co.hardy_th1_coeffs),
    "cor1": _hardy(co.hardy_cor1_coeffs),
    "th3": _hardy(co.hardy_th3_coeffs),
    "th2": _rellich_weighted("th2"),
    "cor2": _rellich_weighted("cor2"),
    "cor3": _rellich_weighted("cor3"),
    "lemma3": _weighted_gradient_hardy,
    "mu_bound": _weighted_gradient_mass,
    "lemma5": _shifted_rellich,
    "th4": _rellich_fourth("th4"),
    "cor4": _rellich_fourth("cor4"),
    "lemma6": _iterated(co.xi_table),
    "lemma7": _iterated(co.zeta_table),
    "r21": _low_order("r21"),
    "r20": _low_order("r20"),
    "dr21": _low_order("dr21"),
    "dr20": _low_order("dr20"),
    "C_family": _family(co.c_table),
    "D_family": _family(co.d_table),
}


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class HarnessConfig:
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    library_seed: int = 20240611
    tolerance: float = 1e-9

    def fingerprint(self):
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


_QUAD_KEYS = {
    "rel_tol": float,
    "abs_tol": float,
    "max_subdivisions": int,
    "tail_horizon": float,
    "tail_estimate_mode": str,
    "initial_panels": int,
}


def load_config(path=None, **overrides):
    """Read a plain ``key = value`` file (``#`` comments) into a :class:`HarnessConfig`."""
    items = {}
    if path is not None:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, value = (x.strip() for x in line.split("=", 1))
                items[key] = value
    items.update({k: v for k, v in overrides.items() if v is not None})
    quad = {}
    top = {}
    for key, value in items.items():
        if key in _QUAD_KEYS:
            quad[key] = _QUAD_KEYS[key](value)
        elif key == "library_seed":
            top[key] = int(value)
        elif key == "tolerance":
            top[key] = float(value)
        else:
            raise ValueError(f"unknown configuration key {key!r}")
    return HarnessConfig(QuadratureConfig(**quad), **top)


# -- evaluation ----------------------------------------------------------------


def zero_function(support=(1.0, 2.0)):
    """The identically zero radial function (on a nominal support)."""
    return RadialJetFunction(lambda r, d: Jet(np.zeros((d + 1, r.size))), support, (), "zero")


class _Integrals:
    """Memoised term integrals keyed by (function, operator, weight)."""

    def __init__(self, n, cfg):
        self.n = n
        self.cfg = cfg
        self._cache = {}

    def term(self, u, term):
        key = (id(u), term.op, term.power, term.g)
        if key not in self._cache:
            self._cache[key] = (u, self._integrate(u, term))
        return self._cache[key][1]

    def _integrate(self, u, term):
        kind, arg = term.op
        if kind == "nabla":
            f = nabla_r_k(u, arg, self.n)
            integrand = _square(f)
        else:
            lap = laplace_r(u, self.n)
            s = float(arg)

            def integrand(r):
                return (lap.value(r) + s * u.value(r) / r**2) ** 2

        if term.g:
            base = integrand

            def integrand(r):
                return base(r) * hypgeom.g_weight(r)

        w = WeightedIntegralSpec(power=float(term.power))
        return integrate_hn_radial(
            integrand, self.n, w=w, cfg=self.cfg, support=u.support, breakpoints=u.breakpoints
        )


def _square(f):
    return lambda r: f.value(r) ** 2


@dataclass(frozen=True)
class CheckRow:
    func: str
    lhs: float
    rhs: float
    deficit: float
    rel_deficit: float


@dataclass(frozen=True)
class CheckReport:
    spec: InequalitySpec
    rows: tuple
    verdict: str
    tolerance: float
    config_hash: str
    table_version: str = co.TABLE_VERSION
    message: str = ""
    skipped: tuple = ()

    @property
    def min_rel_deficit(self):
        return min((r.rel_deficit for r in self.rows), default=math.inf)

    def to_dict(self):
        return {
            "meta": {
                "version": __version__,
                "n": self.spec.n,
                "spec": self.spec.label,
                "config_hash": self.config_hash,
                "tolerance": self.tolerance,
                "table_version": self.table_version,
                "message": self.message,
                "skipped": list(self.skipped),
            },
            "rows": [asdict(r) for r in self.rows],
            "verdict": self.verdict,
        }


def _required_smoothness(terms):
    # |T u|^2 integrable for T of order m needs u in H^m: piecewise C^(m-1) suffices
    return max(t.order for t in terms) - 1


def check_inequality(spec, funcs, cfg=None, _integrals=None):
    """Evaluate ``big - small`` for each test function.

    Functions whose global smoothness is too low for the operator order are
    skipped (listed in ``skipped``).  Hypothesis violations, an empty function
    list, or a list with no admissible function yield verdict ``spec_error``.
    """
    cfg = cfg or HarnessConfig()
    tol = spec.tolerance
    fp = cfg.fingerprint()

    def error(msg, skipped=()):
        return CheckReport(spec, (), "spec_error", tol, fp, message=msg, skipped=tuple(skipped))

    try:
        hypgeom.check_dimension(spec.n)
        big, small = spec.sides()
    except (co.HypothesisError, ValueError) as exc:
        return error(str(exc))
    if not funcs:
        return error("empty test-function list")
    need = _required_smoothness(big + small)
    usable = [u for u in funcs if u.smoothness >= need]
    skipped = [u.name for u in funcs if u.smoothness < need]
    if not usable:
        return error(f"no test function is C^{need}", skipped)
    integrals = _integrals or _Integrals(spec.n, cfg.quadrature)
    rows = []
    for u in usable:
        lhs = math.fsum(float(t.coef) * integrals.term(u, t) for t in big)
        rhs = math.fsum(float(t.coef) * integrals.term(u, t) for t in small)
        deficit = lhs - rhs
        scale = max(abs(lhs), abs(rhs))
        rel = deficit / scale if scale > 0 else 0.0
        rows.append(CheckRow(u.name, lhs, rhs, deficit, rel))
    verdict = "pass" if all(r.rel_deficit >= -tol for r in rows) else "fail"
    return CheckReport(spec, tuple(rows), verdict, tol, fp, skipped=tuple(skipped))


# -- suites --------------------------------------------------------------------


def _candidates(spec_id, n, tol):
    if spec_id in _KL_SPECS:
        for k in range(1, SUITE_MAX_K + 1):
            for l in range(k):
                yield InequalitySpec(spec_id, n, k=k, l=l, tolerance=tol)
    elif spec_id in _BETA_SPECS:
        for beta in SUITE_BETAS:
            for a in SUITE_ALPHAS:
                yield InequalitySpec(spec_id, n, alpha=a, beta=beta, tolerance=tol)
    elif spec_id in _ALPHA_SPECS:
        for a in SUITE_ALPHAS:
            yield InequalitySpec(spec_id, n, alpha=a, tolerance=tol)
    else:
        yield InequalitySpec(spec_id, n, tolerance=tol)


def suite_specs(name, n, tolerance=1e-9):
    """``(admissible, inadmissible)`` specs of a named suite at dimension ``n``.

    The suite grid is alpha in {0, 1, 2}, beta in {1, 2}, 0 <= l < k <= 4;
    grid points outside an inequality's hypotheses are returned separately.
    """
    try:
        ids = SUITES[name]
    except KeyError:
        raise co.HypothesisError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    ok, bad = [], []
    for spec_id in ids:
        for spec in _candidates(spec_id, n, tolerance):
            try:
                spec.sides()
                ok.append(spec)
            except co.HypothesisError:
                bad.append(spec)
    return ok, bad


@dataclass(frozen=True)
class SuiteReport:
    name: str
    n: int
    reports: tuple
    inadmissible: tuple
    config_hash: str

    @property
    def verdict(self):
        verdicts = {r.verdict for r in self.reports}
        if "fail" in verdicts:
            return "fail"
        if "spec_error" in verdicts:
            return "spec_error"
        return "pass"

    @property
    def min_rel_deficit(self):
        return min((r.min_rel_deficit for r in self.reports), default=math.inf)

    def to_dict(self):
        rows = []
        for rep in self.reports:
            for r in rep.rows:
                rows.append({**asdict(r), "func": f"{rep.spec.label}:{r.func}"})
        return {
            "meta": {
                "version": __version__,
                "n": self.n,
                "spec": self.name,
                "config_hash": self.config_hash,
                "table_version": co.TABLE_VERSION,
                "verdicts": {rep.spec.label: rep.verdict for rep in self.reports},
                "inadmissible": [s.label for s in self.inadmissible],
            },
            "rows": rows,
            "verdict": self.verdict,
        }


def run_suite(suite, n=None, cfg=None, funcs=None):
    """Run a named suite (or an explicit list of specs) over the default library.

    Specs are processed in order; a spec error does not stop the others.
    """
    cfg = cfg or HarnessConfig()
    if isinstance(suite, str):
        specs, inadmissible = suite_specs(suite, n, cfg.tolerance)
        name = suite
    else:
        specs, inadmissible, name = list(suite), [], "custom"
        if not specs:
            raise co.HypothesisError("empty suite")
        n = specs[0].n if n is None else n
    funcs = default_library(cfg.library_seed) if funcs is None else funcs
    integrals = {}
    reports = []
    for spec in specs:
        cache = integrals.setdefault(spec.n, _Integrals(spec.n, cfg.quadrature))
        reports.append(check_inequality(spec, funcs, cfg, _integrals=cache))
    return SuiteReport(name, n, tuple(reports), tuple(inadmissible), cfg.fingerprint())
