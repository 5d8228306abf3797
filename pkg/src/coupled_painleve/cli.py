"""Batch runner producing JSON or markdown verification reports."""

from __future__ import annotations

import argparse
import json
import sys as _sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from . import numeric, verify
from .sampling import Indeterminate, check_rng
from .series import PrecisionError
from .systems import SYSTEM_NAMES, build_system, check_invariant_divisor
from .weyl import (PRESENTATIONS, TRANSLATIONS, NotATranslation, generators, translation_shift,
                   verify_relation)

SCHEMA = 1
SUITES = ("relations", "symmetry", "divisors", "charts", "translations", "degenerations",
          "subgroup-limits", "numeric")
SYMBOLIC_SUITES = SUITES[:-1]
STATUSES = ("pass", "fail", "indeterminate", "warning")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    systems: tuple[str, ...] = SYSTEM_NAMES
    suites: tuple[str, ...] = SYMBOLIC_SUITES
    seed: int = 0
    points: int = 25
    series_order: int = 6
    rel_tol: float = 1e-10
    timings: bool = False
    export_trajectories: str | None = None

    def validate(self) -> None:
        if not self.systems or not self.suites:
            raise UsageError("empty system or suite selection")
        if unknown := set(self.systems) - set(SYSTEM_NAMES):
            raise UsageError(f"unknown systems {sorted(unknown)}")
        if unknown := set(self.suites) - set(SUITES):
            raise UsageError(f"unknown suites {sorted(unknown)}")
        if self.points < 1:
            raise UsageError("points must be >= 1")
        if self.series_order < 3:
            raise UsageError("series order must be >= 3")
        if not 0 < self.rel_tol < 1:
            raise UsageError("rel-tol must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")


@dataclass
class CheckRecord:
    check_id: str
    suite: str
    anchor: str
    status: str
    witness: dict[str, Any] = field(default_factory=dict)
    wall_time: float | None = None


@dataclass
class VerificationReport:
    config: SuiteConfig
    records: list[CheckRecord]

    @property
    def summary(self) -> dict[str, int]:
        counts = {s: 0 for s in STATUSES}
        for r in self.records:
            counts[r.status] += 1
        return counts

    @property
    def ok(self) -> bool:
        s = self.summary
        return s["fail"] == 0 and s["indeterminate"] == 0

    def record(self, check_id: str) -> CheckRecord:
        for r in self.records:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)


def _status(flag: bool | None) -> str:
    return "indeterminate" if flag is None else ("pass" if flag else "fail")


def _fmt(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return float(f"{v:.3e}")
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    if isinstance(v, dict):
        return {k: _fmt(x) for k, x in v.items()}
    return v


class _Runner:
    def __init__(self, config: SuiteConfig):
        self.config = config
        self.records: list[CheckRecord] = []

    def rng(self, check_id: str):
        return check_rng(self.config.seed, check_id)

    def add(self, suite: str, check_id: str, anchor: str, body: Callable[[], tuple[str, dict]]):
        start = time.perf_counter()
        try:
            status, witness = body()
        except Indeterminate as exc:
            status, witness = "indeterminate", {"reason": str(exc)}
        except (PrecisionError, numeric.IntegrationError) as exc:
            status, witness = "indeterminate", {"reason": f"{type(exc).__name__}: {exc}"}
        elapsed = time.perf_counter() - start
        self.records.append(CheckRecord(
            check_id, suite, anchor, status, _fmt(witness),
            round(elapsed, 4) if self.config.timings else None,
        ))

    # suites ---------------------------------------------------------------
    def relations(self, system: str):
        for word, order in PRESENTATIONS[system].relations:
            cid = f"relations/{system}/({word})^{order}"

            def body(word=word, order=order, cid=cid):
                r = verify_relation(system, word, order, min(self.config.points, 10), self.rng(cid))
                status = _status(r.holds)
                if status == "pass" and r.minimal is False:
                    status = "warning"
                return status, {"minimal": r.minimal}

            self.add("relations", cid, f"{system} Weyl group relation", body)

    def symmetry(self, system: str):
        s = build_system(system)
        for name, m in generators(system).items():
            cid = f"symmetry/{system}/{name}"
            self.add("symmetry", cid, f"{system} Backlund generator {name}",
                     lambda m=m, cid=cid: (_status(verify.check_symmetry(m, s, self.config.points, self.rng(cid))),
                                           {"time_action": m.time_action}))

    def divisors(self, system: str):
        s = build_system(system)
        for d in s.divisors:
            cid = f"divisors/{system}/{d.f.to_text()}|{d.condition}=0"
            self.add("divisors", cid, f"{system} invariant divisor",
                     lambda d=d: (_status(check_invariant_divisor(s, d)), {}))

    def charts(self, system: str):
        if system not in ("D5", "B4", "D4_2"):
            return
        s = build_system(system)
        for chart in verify.chart_atlas(system):
            cid = f"charts/{system}/{chart.index}"
            self.add("charts", cid, f"{system} holomorphy chart {chart.index}",
                     lambda chart=chart, cid=cid: (
                         _status(verify.check_chart(s, chart, min(self.config.points, 5), rng=self.rng(cid))),
                         {"degree_bound": 8}))

    def translations(self, system: str):
        for tw in TRANSLATIONS.get(system, ()):
            cid = f"translations/{system}/{tw.name}"

            def body(tw=tw):
                try:
                    shift = translation_shift(tw)
                except NotATranslation:
                    return "fail", {"reason": "linear part is not the identity"}
                witness = {"word": tw.word, "shift": list(shift)}
                if tw.expected_shift is None:
                    return "pass", witness
                witness["expected"] = list(tw.expected_shift)
                return _status(tuple(shift) == tw.expected_shift), witness

            self.add("translations", cid, f"{system} translation {tw.name}", body)

    def _schemes(self):
        for name in verify.SCHEME_NAMES:
            scheme = verify.degeneration_scheme(name)
            if scheme.source in self.config.systems or scheme.target in self.config.systems:
                yield scheme

    def degenerations(self):
        pts = min(self.config.points, 10)
        order = self.config.series_order
        for scheme in self._schemes():
            base = f"degenerations/{scheme.name}"
            self.add("degenerations", f"{base}/limit", f"degeneration {scheme.name}",
                     lambda scheme=scheme: self._degeneration(scheme, pts, order, f"{base}/limit"))
            self.add("degenerations", f"{base}/constraint", f"degeneration {scheme.name} constraint",
                     lambda scheme=scheme: (_status(verify.check_constraint_transport(scheme)), {}))
            self.add("degenerations", f"{base}/symplectic", f"degeneration {scheme.name} symplectic",
                     lambda scheme=scheme, b=base: (
                         _status(verify.check_symplectic(scheme, pts, self.rng(f"{b}/symplectic"))), {}))
            self.add("degenerations", f"{base}/inverse", f"degeneration {scheme.name} inverse",
                     lambda scheme=scheme, b=base: (
                         _status(verify.check_inverse(scheme, pts, self.rng(f"{b}/inverse"))), {}))

    def _degeneration(self, scheme, pts, order, cid):
        r = verify.degeneration_report(scheme, pts, order, self.rng(cid))
        return _status(r.holds), {"min_eps_degree": r.min_degree, "series_order": order,
                                  "witness_points": r.witnesses[:1]}

    def subgroup_limits(self):
        pts = min(self.config.points, 10)
        for scheme in self._schemes():
            for entry in scheme.subgroup:
                cid = f"subgroup-limits/{scheme.name}/{entry.target_gen}"

                def body(entry=entry, scheme=scheme, cid=cid):
                    r = verify.check_subgroup_entry(scheme, entry, pts, self.config.series_order, self.rng(cid))
                    return _status(r.holds), {
                        "source_word": r.source_word, "limit": r.limit_ok, "eps_action": r.consistent,
                        "printed_series": r.printed_ok, "printed_exact": r.printed_exact,
                    }

                self.add("subgroup-limits", cid, f"subgroup {scheme.name} generator {entry.target_gen}", body)

    def numeric(self, system: str):
        s = build_system(system)
        tol = self.config.rel_tol
        for name, m in generators(system).items():
            cid = f"numeric/{system}/flow/{name}"

            def body(m=m, cid=cid):
                errs = numeric.flow_commutation_cases(m, 3, self.rng(cid), tol)
                return _status(max(errs) <= 1e-6), {"errors": errs, "time_action": m.time_action}

            self.add("numeric", cid, f"{system} flow commutation {name}", body)
        for d in s.divisors:
            cid = f"numeric/{system}/divisor/{d.f.to_text()}|{d.condition}=0"
            self.add("numeric", cid, f"{system} invariant surface drift",
                     lambda d=d, cid=cid: self._divisor(s, d, cid, tol))
        if system in ("D5", "B4"):
            cid = f"numeric/{system}/riccati"
            self.add("numeric", cid, f"{system} Riccati reduction", lambda cid=cid: self._riccati(s, cid, tol))
        cid = f"numeric/{system}/energy"
        self.add("numeric", cid, f"{system} energy identity", lambda cid=cid: self._energy(s, cid, tol))

    @staticmethod
    def _retry(rng, fn, tries: int = 50):
        for _ in range(tries):
            try:
                return fn(rng)
            except numeric.IntegrationError:
                continue
        raise numeric.IntegrationError(f"no regular start in {tries} draws")

    def _divisor(self, s, d, cid, tol):
        t0, t1 = numeric.default_window(s)

        def once(rng):
            p = numeric.small_params(s, rng, {d.condition: d.value})
            return numeric.divisor_drift(s, d, p, numeric.divisor_start(s, d, p, rng, t0), t1, tol)

        drift = self._retry(self.rng(cid), once)
        return _status(drift <= 1e-9), {"max_drift": drift}

    def _riccati(self, s, cid, tol):
        t0, t1 = numeric.default_window(s)
        cond, _ = numeric.reduced_system(s)

        def once(rng):
            p = numeric.small_params(s, rng, {cond: Fraction(0)})
            g = numeric.generic_start(s, rng, t0)
            start = numeric.FloatState((g.values[0], 0.0, *g.values[2:]), t0)
            traj = numeric.integrate(s, p, start, t1, tol, samples=numeric.sample_grid(t0, t1, 21))
            return numeric.riccati_residual(s, p, traj)

        res = self._retry(self.rng(cid), once)
        return _status(res <= 1e-8), {"residual": res}

    def _energy(self, s, cid, tol):
        t0, t1 = numeric.default_window(s)

        def once(rng):
            p = numeric.small_params(s, rng)
            return numeric.energy_defect(s, p, numeric.generic_start(s, rng, t0), t1, min(tol, 1e-12))

        gap = self._retry(self.rng(cid), once)
        return _status(gap <= 1e-6), {"relative_gap": gap}

    def export(self, directory: str):
        out = Path(directory)
        for system in self.config.systems:
            s = build_system(system)
            t0, t1 = numeric.default_window(s)

            def once(rng, s=s, t0=t0, t1=t1):
                p = numeric.small_params(s, rng)
                return numeric.integrate(s, p, numeric.generic_start(s, rng, t0), t1, self.config.rel_tol,
                                         samples=numeric.sample_grid(t0, t1, 101))

            traj = self._retry(self.rng(f"export/{system}"), once)
            numeric.export_csv(traj, out / f"{system}.csv")


def run(config: SuiteConfig) -> VerificationReport:
    config.validate()
    r = _Runner(config)
    per_system = ("relations", "symmetry", "divisors", "charts", "translations", "numeric")
    for suite in SUITES:
        if suite not in config.suites:
            continue
        if suite in per_system:
            for system in config.systems:
                getattr(r, suite)(system)
        elif suite == "degenerations":
            r.degenerations()
        else:
            r.subgroup_limits()
    if config.export_trajectories:
        r.export(config.export_trajectories)
    records = sorted(r.records, key=lambda rec: rec.check_id)
    return VerificationReport(config, records)


def render(report: VerificationReport, fmt: str = "json") -> str:
    if fmt == "json":
        cfg = asdict(report.config)
        cfg["systems"], cfg["suites"] = list(cfg["systems"]), list(cfg["suites"])
        doc = {
            "schema": SCHEMA,
            "config": cfg,
            "records": [
                {k: v for k, v in asdict(rec).items() if k != "wall_time" or report.config.timings}
                for rec in report.records
            ],
            "summary": report.summary,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "markdown":
        lines = ["# Verification report", ""]
        summary = ", ".join(f"{k}: {v}" for k, v in report.summary.items())
        lines += [f"Seed {report.config.seed}; {summary}.", ""]
        for suite in SUITES:
            recs = [x for x in report.records if x.suite == suite]
            if not recs:
                continue
            lines += [f"## {suite}", "", "| check | anchor | status | witness |", "|---|---|---|---|"]
            for x in recs:
                wit = json.dumps(x.witness, sort_keys=True).replace("|", "\\|")
                cid = x.check_id.replace("|", "\\|")
                lines.append(f"| `{cid}` | {x.anchor} | {x.status} | {wit} |")
            lines.append("")
        return "\n".join(lines)
    raise UsageError(f"unknown format {fmt!r}")


def _split(text: str, allowed: Iterable[str], everything: Sequence[str]) -> tuple[str, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if "all" in items:
        return tuple(everything)
    lookup = {a.lower(): a for a in allowed}
    try:
        return tuple(lookup[i.lower()] for i in items)
    except KeyError as exc:
        raise UsageError(f"unknown selection {exc.args[0]!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="painleve-verify",
                                description="Exact and numeric checks for coupled Painleve systems.")
    p.add_argument("--system", default="all", help="comma list of d5,b4,d4_2,b3,a4 or 'all'")
    p.add_argument("--suite", default=",".join(SYMBOLIC_SUITES),
                   help=f"comma list of {','.join(SUITES)} or 'all'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--series-order", type=int, default=6)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("json", "markdown"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--export-trajectories", metavar="DIR", help="write one CSV trajectory per system")
    p.add_argument("--timings", action="store_true", help="include wall times (breaks byte-determinism)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = SuiteConfig(
            systems=_split(args.system, SYSTEM_NAMES, SYSTEM_NAMES),
            suites=_split(args.suite, SUITES, SUITES),
            seed=args.seed, points=args.points, series_order=args.series_order, rel_tol=args.rel_tol,
            timings=args.timings, export_trajectories=args.export_trajectories,
        )
        config.validate()
    except UsageError as exc:
        parser.print_usage(_sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=_sys.stderr)
        return 2
    report = run(config)
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        _sys.stdout.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
