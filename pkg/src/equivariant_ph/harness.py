"""Scenario runner: named end-to-end checks with CSV/JSON reports.

A scenario is a JSON document with a versioned ``schema`` field. Its ``kind``
selects the pipeline (``discrete``, ``analytic``, ``diffeo``, ``forms`` or
``coinvariants``) and ``checks`` lists what to verify. Every check yields a
:class:`CheckResult`; the scenario passes iff all checks pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from . import analytic as an
from . import integral as it
from .coinvariants import (
    CoinvariantClass,
    CoinvariantRep,
    WhyteReport,
    _fmt,
    class_equal,
    class_reduce,
    folner_mean,
    ones,
    ponzi_flow_free_group,
    whyte_check,
    whyte_refute_ones,
)
from .complexes import (
    BaseComplex,
    build_window,
    euler_char,
    facet_generators,
    finite_cover_euler_char,
    fundamental_domain,
    load_complex,
    orientation_opposition_check,
    validate_base,
)
from .discrete import DiscreteField, acyclic_matching_check, critical_index_table
from .errors import ConfigError, InputError
from .groups import GroupSpec, folner_set, free_group, group_from_record, ball
from .tables import IndexTable

SCHEMA = "equivariant-ph/scenario/1"
KINDS = ("discrete", "analytic", "diffeo", "forms", "coinvariants")
_KEYS = {"schema", "name", "description", "kind", "base", "generators", "radius", "field", "checks",
         "tolerances", "quad", "seed", "whyte", "candidate", "folner", "form", "antiderivative",
         "ponzi", "phi", "refute_ones", "expect"}

DEFAULT_TOLERANCES = {
    "thom_gap_1d": 1e-6,
    "thom_gap_2d": 1e-3,
    "winding_margin": 0.5,
    "stokes_1d": 1e-10,
    "stokes_2d": 1e-8,
    "convergence_factor": 4.0,
    "sup_h": 1e-8,
    "slope": 1e-6,
}


@dataclass
class Scenario:
    name: str
    kind: str
    checks: list[str]
    raw: dict
    radius: int = 3
    quad: int | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_record(cls, rec: Mapping) -> Scenario:
        if not isinstance(rec, Mapping):
            raise ConfigError("scenario must be a JSON object")
        if rec.get("schema") != SCHEMA:
            raise ConfigError(f"schema must be {SCHEMA!r}, got {rec.get('schema')!r}")
        unknown = set(rec) - _KEYS
        if unknown:
            raise ConfigError(f"unknown keys: {sorted(unknown)}")
        kind = rec.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
        if "name" not in rec:
            raise ConfigError("scenario needs a name")
        checks = list(rec.get("checks", []))
        bad = [c for c in checks if c not in CHECKS[kind]]
        if bad:
            raise ConfigError(f"unknown checks for kind {kind}: {bad}")
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(rec.get("tolerances", {}))
        R = int(rec.get("radius", 3))
        if R < 2:
            raise ConfigError("radius must be >= 2")
        if R < 3 and any(c in ("facets", "orientation", "stokes") for c in checks):
            raise ConfigError("facet and Stokes checks need radius >= 3")
        return cls(rec["name"], kind, checks, dict(rec), R, rec.get("quad"), int(rec.get("seed", 0)), tol)

    @classmethod
    def load(cls, ref) -> Scenario:
        """A built-in scenario name or a path to a JSON config."""
        from .scenarios import BUILTIN

        if isinstance(ref, Mapping):
            return cls.from_record(ref)
        if str(ref) in BUILTIN:
            return cls.from_record(BUILTIN[str(ref)])
        path = Path(str(ref))
        if not path.exists():
            raise ConfigError(f"no scenario or config file named {ref!r}")
        try:
            rec = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_record(rec)


@dataclass
class CheckResult:
    name: str
    statement: str
    expected: str
    computed: str
    passed: bool


@dataclass
class VerdictReport:
    scenario: str
    checks: list[CheckResult] = field(default_factory=list)
    index_table: IndexTable | None = None
    whyte: list[tuple[str, WhyteReport]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def add(self, name, statement, expected, computed, passed):
        self.checks.append(CheckResult(name, statement, str(expected), str(computed), bool(passed)))

    def to_json(self) -> str:
        rec = {"scenario": self.scenario, "passed": self.passed,
               "checks": [asdict(c) for c in self.checks]}
        return json.dumps(rec, indent=1, sort_keys=True) + "\n"

    def whyte_csv(self) -> str:
        lines = []
        for label, rep in self.whyte:
            body = rep.to_csv().splitlines()
            if not lines:
                lines.append("report,mode," + body[0])
            lines.extend(f"{label},{rep.mode},{row}" for row in body[1:])
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = []
        if self.index_table is not None:
            files.append(out / "index_table.csv")
            files[-1].write_text(self.index_table.to_csv())
        if self.whyte:
            files.append(out / "whyte.csv")
            files[-1].write_text(self.whyte_csv())
        files.append(out / "verdict.json")
        files[-1].write_text(self.to_json())
        return files


# -- theorem-level verifications ------------------------------------------------------------------


@dataclass
class InfinitudeVerdict:
    status: str  # "contradiction" | "no contradiction" | "not applicable"
    message: str
    chi: int
    required: CoinvariantClass | None = None
    candidate: CoinvariantClass | None = None


def _candidate_rep(spec: GroupSpec, candidate) -> CoinvariantRep:
    if isinstance(candidate, IndexTable):
        candidate = candidate.to_coinvariant()
    if isinstance(candidate, CoinvariantRep):
        if candidate.constant != 0:
            raise InputError("candidate index table is not finitely supported")
        return candidate
    return CoinvariantRep(spec, 0, {spec.element(g): v for g, v in dict(candidate).items()})


def verify_infinitude(base: BaseComplex, candidate=None) -> InfinitudeVerdict:
    """Can a field with finitely many zeros exist on the cover?

    Such a field has a finitely supported index table, whose class is 0 for
    infinite G, while the index must equal chi * [1]. For amenable G and
    chi != 0 these differ, so every candidate yields a contradiction.
    """
    spec = base.group
    chi = euler_char(base)
    if chi == 0:
        return InfinitudeVerdict("not applicable", "theorem not applicable: chi(M/G) = 0", chi)
    if spec.is_finite:
        return InfinitudeVerdict("not applicable", "theorem not applicable: finite deck group", chi)
    cand = _candidate_rep(spec, candidate if candidate is not None else {spec.identity: chi})
    required = class_reduce(ones(spec, chi))
    got = class_reduce(cand)
    if required == got:
        return InfinitudeVerdict("no contradiction",
                                 f"no contradiction: [1] = 0 for non-amenable {spec}, so "
                                 "finitely many zeros are not excluded", chi, required, got)
    return InfinitudeVerdict("contradiction",
                             f"contradiction: a finitely supported index has class {got}, "
                             f"but the index must be {required}; the candidate cannot exist",
                             chi, required, got)


@dataclass
class DiffeoVerdict:
    fixed_points: dict  # copy -> list of points
    indices: dict  # copy -> list of local indices
    table: IndexTable
    class_value: CoinvariantClass
    tameness: str

    @property
    def counts(self) -> dict:
        return {g: len(p) for g, p in self.fixed_points.items()}

    @property
    def consistent(self) -> bool:
        # chi of the circle and the torus is 0
        return self.class_value.is_zero


def verify_diffeo(f, R: int = 3, offset=None) -> DiffeoVerdict:
    """Fixed points of f per domain copy, their indices and the index class."""
    n = 1 if isinstance(f, str) else len(f)
    copies = an.window_copies(n, R)
    bx = an._bounding_box(copies, offset, n)
    v = an.diffeo_to_field(f, bx)
    spec = an.model_group(n)
    zs = an.find_zeros(v, bx)
    if not zs.ok:
        raise InputError("; ".join(zs.diagnostics))
    r = an.default_contour_radius(zs, offset)
    pts = {g: [] for g in copies}
    inds = {g: [] for g in copies}
    for z in zs.zeros:
        g = an.copy_of(z.point, offset, spec)
        if g in pts:
            pts[g].append(z.point.tolist() if n == 2 else z.x)
            inds[g].append(an.winding_index(v, z, r))
    table = IndexTable(spec, {g: sum(inds[g]) for g in copies}, "winding",
                       an.winding_index_table(v, R, offset, r).periodic_value)
    tame = an.certify_tameness(v, bx, offset).status
    return DiffeoVerdict(pts, inds, table, class_reduce(table.to_coinvariant()), tame)


# -- runners ------------------------------------------------------------------------------------------


def _whyte_sets(spec: GroupSpec, n_max: int):
    if spec.amenable:
        return {f"F_{N}": folner_set(spec, N) for N in range(0, n_max + 1)}
    return {f"B_{k}": ball(spec, None, k).elements for k in range(0, n_max + 1)}


def _run_discrete(sc: Scenario, rep: VerdictReport):
    cfg = sc.raw
    base = load_complex(cfg.get("base"))
    spec = base.group
    gens = [spec.parse(s) for s in cfg["generators"]] if cfg.get("generators") else None
    window = build_window(base, spec, gens, sc.radius)
    fcfg = cfg.get("field", {"core": "empty"})
    field_ = DiscreteField.from_record(base, fcfg)
    chi = euler_char(base)
    table = rep_coinv = None
    for check in sc.checks:
        if check == "validate":
            v = validate_base(base)
            rep.add(check, "quotient is a closed oriented manifold with a flat labelling", "valid",
                    "valid" if v.valid else "; ".join(map(str, v.violations)), v.valid)
        elif check == "acyclic":
            ok = acyclic_matching_check(field_, window)
            rep.add(check, "discrete field has no closed V-path", True, ok, ok)
        elif check == "index_table":
            table, rep_coinv = critical_index_table(field_, window)
            rep.index_table = table
            want = class_reduce(ones(spec, chi))
            got = class_reduce(rep_coinv)
            rep.add(check, "index equals chi(M/G) times [1] in the coinvariants", f"{want}", f"{got}",
                    class_equal(rep_coinv, ones(spec, chi)))
            if not field_.overrides:
                rep.add("periodic_table", "periodic field has the Euler characteristic in every copy",
                        f"{chi} on {len(table)} copies", f"values {sorted(set(table.values.values()))}",
                        table.is_constant(chi))
        elif check == "folner":
            if table is None:
                table, rep_coinv = critical_index_table(field_, window)
            for N in cfg.get("folner", {}).get("N", [1, 2, 3]):
                # beyond the window the representative is periodic, so large N is fine
                F = folner_set(spec, N)
                got = folner_mean(rep_coinv, N)
                want = rep_coinv.constant + sum(rep_coinv.deviation.get(g, 0) for g in F) / Fraction(len(F))
                rep.add(f"folner_N{N}", "Folner means converge to the ones coefficient",
                        _fmt(want), _fmt(got), got == want)
        elif check == "whyte":
            if table is None:
                table, rep_coinv = critical_index_table(field_, window)
            w = cfg.get("whyte", {})
            dev = CoinvariantRep(spec, 0, rep_coinv.deviation)
            C = w.get("C", max(1, int(math.ceil(dev.deviation_l1()))))
            r = int(w.get("r", 1))
            sets = _whyte_sets(spec, int(w.get("N_max", 10)))
            cert = whyte_check(dev, C, r, sets)
            rep.whyte.append(("deviation", cert))
            rep.add("whyte_deviation", "finitely supported functions vanish in the coinvariants",
                    "certify", cert.mode, cert.mode == "certify")
            if spec.amenable and not spec.is_finite and rep_coinv.constant != 0:
                full = whyte_check(rep_coinv, C, r, sets)
                rep.whyte.append(("table", full))
                rep.add("whyte_table", "[1] is nonzero for amenable groups", "refute", full.mode,
                        full.mode == "refute")
        elif check == "infinitude":
            cand = cfg.get("candidate")
            cand = {spec.parse(str(k)): v for k, v in cand.items()} if cand else None
            verdict = verify_infinitude(base, cand)
            expected = cfg.get("expect", {}).get("infinitude", "contradiction")
            rep.add(check, "a field with finitely many zeros is impossible when chi != 0 and G is amenable",
                    expected, verdict.status, verdict.status == expected)
        elif check == "facets":
            fg = facet_generators(window)
            want = cfg.get("expect", {}).get("S")
            ok = fg.symmetric and fg.partition_ok and fg.generates_window
            if want is not None:
                ok = ok and sorted(map(str, fg.S)) == sorted(want)
            rep.add(check, "facets of D give a symmetric generating set S+ u S- u S0",
                    want if want is not None else "symmetric, partitioned, generating",
                    f"S={[str(s) for s in fg.S]} S0={[str(s) for s in fg.S_zero]}", ok)
            dom = fundamental_domain(base)
            rep.add("facet_pairing", "D meets s^-1 D in the translate of D meet sD", True,
                    dom.facet_pairing_ok(), dom.facet_pairing_ok())
        elif check == "orientation":
            ok = orientation_opposition_check(window)
            rep.add(check, "shared facets inherit opposite orientations", True, ok, ok)
        elif check == "equivariance":
            ok = window.equivariance_check() and window.covering_check()
            rep.add(check, "deck action commutes with boundaries; projection is a covering", True, ok, ok)
        elif check == "finite_sum":
            if table is None:
                table, rep_coinv = critical_index_table(field_, window)
            total = sum(field_.copy_index(g) for g in spec.elements())
            want = finite_cover_euler_char(base)
            rep.add(check, "for finite G the sum functional gives chi of the finite cover", want, total,
                    total == want and class_reduce(rep_coinv).value == want)
        elif check == "ponzi":
            pz = ponzi_flow_free_group(spec.rank if spec.family == "Free" else 2, int(cfg.get("ponzi", {}).get("R", 6)))
            rep.add(check, "[1] is a sum of boundary terms for free groups", "divergence 1, flows < 1/(2k-2)",
                    f"divergence one: {pz.divergence_is_one}, max flow {_fmt(pz.max_flow)}", pz.verified)


def _analytic_field(cfg) -> an.AnalyticField:
    f = cfg.get("field", {})
    if "expression" not in f:
        raise ConfigError("analytic scenarios need field.expression")
    return an.AnalyticField(f["expression"], f.get("deviation_box"))


def _run_analytic(sc: Scenario, rep: VerdictReport):
    cfg = sc.raw
    v = _analytic_field(cfg)
    n = v.dimension
    offset = cfg.get("field", {}).get("offset")
    R = sc.radius
    copies = an.window_copies(n, R)
    bx = an._bounding_box(copies, offset, n)
    wt = None
    for check in sc.checks:
        if check == "tameness":
            t = an.certify_tameness(v, bx, offset)
            rep.add(check, "zeros sit inside single domain copies", "strongly tame", t.status,
                    t.strongly_tame)
        elif check == "winding":
            wt = an.winding_index_table(v, R, offset)
            rep.index_table = wt
            want = cfg.get("expect", {}).get("local_indices")
            zs = an.find_zeros(v, an.domain_box(an.model_group(n).identity, offset))
            r = an.default_contour_radius(zs, offset)
            local = sorted(an.winding_index(v, z, r) for z in zs.zeros)
            ok = class_reduce(wt.to_coinvariant()).is_zero
            if want is not None:
                ok = ok and local == sorted(want)
            rep.add(check, "winding index table has class chi * [1] = 0 on the flat model",
                    f"class 0, local indices {sorted(want) if want else 'any'}",
                    f"class {class_reduce(wt.to_coinvariant())}, local indices {local}", ok)
        elif check == "thom":
            if wt is None:
                wt = an.winding_index_table(v, R, offset)
            tt = it.index_via_thom(v, R, cfg.get("field", {}).get("eps"), sc.quad, offset)
            tol = sc.tolerances["thom_gap_1d" if n == 1 else "thom_gap_2d"]
            rep.add(check, "Thom-form integral equals the sum of local indices per domain",
                    f"tables equal, gap < {tol:g}", f"equal={tt.same_entries(wt)}, gap={tt.max_gap:.2e}",
                    tt.same_entries(wt) and tt.max_gap < tol)
            if rep.index_table is None:
                rep.index_table = tt
        elif check == "homotopy":
            other = cfg.get("field", {}).get("compare")
            if other is None:
                raise ConfigError("homotopy check needs field.compare")
            w = an.AnalyticField(other["expression"], other.get("deviation_box"))
            h = it.homotopy_invariance_check(v, w, R, None, sc.quad, offset, sc.seed)
            rep.add(check, "straight-line homotopic fields have equal index classes", "equal",
                    h.status, h.equal)


def _run_diffeo(sc: Scenario, rep: VerdictReport):
    cfg = sc.raw
    f = cfg.get("field", {}).get("map")
    if f is None:
        raise ConfigError("diffeo scenarios need field.map")
    offset = cfg.get("field", {}).get("offset")
    d = verify_diffeo(f, sc.radius, offset)
    rep.index_table = d.table
    exp = cfg.get("expect", {})
    for check in sc.checks:
        if check == "fixed_points":
            want = exp.get("per_domain")
            counts = sorted(set(d.counts.values()))
            ok = want is None or counts == [want]
            rep.add(check, "fixed points per domain copy", want, counts, ok)
            wi = exp.get("local_indices")
            if wi is not None:
                got = sorted(set(tuple(sorted(i)) for i in d.indices.values()))
                rep.add("fixed_point_indices", "local indices of fixed points", [sorted(wi)],
                        [list(g) for g in got], got == [tuple(sorted(wi))])
        elif check == "class":
            rep.add(check, "index class of f - id equals chi * [1] = 0", "0", str(d.class_value),
                    d.consistent)


def _run_forms(sc: Scenario, rep: VerdictReport):
    cfg = sc.raw
    for check in sc.checks:
        if check == "stokes":
            fr = cfg.get("form")
            if fr is None:
                raise ConfigError("stokes check needs a form")
            om = it.DifferentialForm.from_record(fr)
            offset = fr.get("offset")
            n = om.dimension
            tol = sc.tolerances["stokes_1d" if n == 1 else "stokes_2d"]
            r = it.stokes_check(om, sc.radius, sc.quad, offset)
            rep.add("stokes_residual", "integral of d(omega) over gD equals its facet terms", f"< {tol:g}",
                    f"{r.max_residual:.3e}", r.max_residual < tol)
            rep.add("stokes_pairs", "interior facet terms cancel in +- pairs", "0",
                    f"{r.pair_residual:.3e} over {r.pairs} pairs", r.pair_residual == 0.0)
            rep.add("stokes_telescoping", "window sum reduces to outer facets", "< tol",
                    f"{r.telescoping_residual:.3e}", r.telescoping_residual < tol * len(r.residuals))
            res = it.stokes_convergence(om, (1, 2, 4, 8), offset)
            ratios = it.convergence_ratios(res)
            fac = sc.tolerances["convergence_factor"]
            shown = ", ".join(f"{q:.3g}" for q in ratios) or "all residuals at rounding level"
            rep.add("stokes_convergence", "doubling panels improves residuals", f">= {fac:g}x",
                    shown, all(q >= fac for q in ratios))
        elif check == "antiderivative":
            a = cfg.get("antiderivative")
            if a is None:
                raise ConfigError("antiderivative check needs an antiderivative block")
            r = it.antiderivative_bounded(a["f"], a.get("X", 50))
            ok = r.verdict == a.get("expect", r.verdict)
            if "sup" in a:
                ok = ok and abs(r.sup_abs_h - float(a["sup"])) < sc.tolerances["sup_h"]
            if "slope" in a:
                ok = ok and abs(r.slope - float(a["slope"])) < sc.tolerances["slope"]
            rep.add(check, "h = integral of f is bounded iff f integrates to zero in the coinvariants",
                    f"{a.get('expect', '')} sup={a.get('sup', '-')} slope={a.get('slope', '-')}",
                    f"{r.verdict} sup={r.sup_abs_h:.12g} slope={r.slope:.9g}", ok)


def _run_coinvariants(sc: Scenario, rep: VerdictReport):
    cfg = sc.raw
    for check in sc.checks:
        if check == "whyte_certify":
            p = cfg.get("phi")
            if p is None:
                raise ConfigError("whyte_certify needs phi")
            phi = CoinvariantRep.from_record(p)
            w = cfg.get("whyte", {})
            sets = _whyte_sets(phi.group, int(w.get("N_max", 20)))
            r = whyte_check(phi, w.get("C", 1), int(w.get("r", 1)), sets)
            rep.whyte.append(("phi", r))
            rep.add(check, "Whyte inequality holds for finitely supported functions (evidence, not proof)",
                    "certify", f"{r.mode} over {len(r.rows)} sets", r.mode == "certify")
        elif check == "whyte_refute_ones":
            ro = cfg.get("refute_ones", {})
            for g in ro.get("groups", [{"family": "CyclicZ"}]):
                spec = group_from_record(g)
                misses = []
                for C in ro.get("C", [1, 2, 4, 8]):
                    for r in ro.get("r", [1, 2, 3]):
                        res = whyte_refute_ones(spec, C, r)
                        if not res.found:
                            misses.append((C, r))
                rep.add(f"refute_ones_{spec}", "[1] fails the Whyte inequality on amenable groups",
                        "Folner counterexample for every (C, r)", f"missing: {misses}", not misses)
        elif check == "ponzi":
            pz = cfg.get("ponzi", {})
            flow = ponzi_flow_free_group(int(pz.get("k", 2)), int(pz.get("R", 8)))
            rep.add(check, "[1] is a sum of boundary terms on free groups",
                    f"divergence 1, flows <= {_fmt(flow.bound)}",
                    f"divergence one: {flow.divergence_is_one}, max flow {_fmt(flow.max_flow)}",
                    flow.divergence_is_one and flow.max_flow <= flow.bound)


CHECKS = {
    "discrete": ("validate", "acyclic", "index_table", "folner", "whyte", "infinitude", "facets",
                 "orientation", "equivariance", "finite_sum", "ponzi"),
    "analytic": ("tameness", "winding", "thom", "homotopy"),
    "diffeo": ("fixed_points", "class"),
    "forms": ("stokes", "antiderivative"),
    "coinvariants": ("whyte_certify", "whyte_refute_ones", "ponzi"),
}

_RUNNERS = {"discrete": _run_discrete, "analytic": _run_analytic, "diffeo": _run_diffeo,
            "forms": _run_forms, "coinvariants": _run_coinvariants}


def run_scenario(scenario, out_dir=None, radius: int | None = None, quad: int | None = None,
                 seed: int | None = None, only: tuple[str, ...] | None = None) -> VerdictReport:
    """Run the scenario's checks; write reports to ``out_dir`` if given.

    Input and configuration errors surface as :class:`ConfigError`.
    """
    sc = scenario if isinstance(scenario, Scenario) else Scenario.load(scenario)
    if radius is not None:
        sc.radius = int(radius)
    if quad is not None:
        sc.quad = int(quad)
    if seed is not None:
        sc.seed = int(seed)
    if only is not None:
        sc = Scenario(sc.name, sc.kind, [c for c in sc.checks if c in only], sc.raw, sc.radius, sc.quad,
                      sc.seed, sc.tolerances)
    rep = VerdictReport(sc.name)
    try:
        _RUNNERS[sc.kind](sc, rep)
    except ConfigError:
        raise
    except InputError as exc:
        raise ConfigError(f"{sc.name}: {exc}") from exc
    if out_dir is not None:
        rep.write(out_dir)
    return rep
