"""Command-line front end.

    skewform dims --family sympl-plus --n 2 [--oracle]
    skewform verify rowen --n 2
    skewform verify all --max-n 2
    skewform certify --family orth-plus --m 3
    skewform derive-relation --family orth-plus --m 3
    skewform sphere --n 2 --json
    skewform report --family sympl-minus --n 1

Exit codes: 0 every check holds, 1 a check fails, 2 usage or configuration
error, 3 a check was skipped for budget under ``--strict``, 4 a relation
system turned out inconsistent.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__, diagrams, identities, inv_oracle
from .altforms import evaluate, indices_of, power
from .config import ENV_BUDGET_ENTRIES, Budget, BudgetExceeded
from .matspaces import Family, FamilyError, family_from, make_space
from .reports import FAILS, HOLDS, SKIPPED, CheckReport, config_hash, stopwatch, to_jsonable

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SKIPPED, EXIT_INCONSISTENT = 0, 1, 2, 3, 4

COMMANDS = ("dims", "verify", "certify", "derive-relation", "sphere", "report")
VERIFY_CHECKS = ("all", "amitsur-levitzki", "rowen", "hutchinson", "trace", "relation",
                 "consequences", "parity")
# verify shortcuts that fix the family
NAMED_FAMILY = {"amitsur-levitzki": "full", "rowen": "sympl_plus", "hutchinson": "orth_minus"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    check: str | None = None
    family: str | None = None
    n: int | None = None
    m: int | None = None
    degree: int | None = None
    max_n: int = 2
    oracle: bool = False
    fmt: str = "text"
    jobs: int = 1
    budget: Budget = field(default_factory=Budget)
    strict: bool = False
    seed: int | None = None
    out: str | None = None
    timings: bool = True

    def hashed(self) -> dict:
        """Everything that can change a verdict; output options are left out."""
        return {"command": self.command, "check": self.check, "family": self.family,
                "n": self.n, "m": self.m, "degree": self.degree, "max_n": self.max_n,
                "oracle": self.oracle, "strict": self.strict, "seed": self.seed,
                "budget": self.budget.as_dict(), "version": __version__}

    @property
    def hash(self) -> str:
        return config_hash(self.hashed())


# ---------------------------------------------------------------------------
# job execution

def _call(job: tuple) -> list[CheckReport]:
    label, fn, kwargs = job
    out = fn(**kwargs)
    reports = out if isinstance(out, list) else [out]
    if label:
        for r in reports:
            r.name = f"{label}:{r.name}"
    return reports


def run_jobs(jobs: list[tuple], workers: int) -> list[CheckReport]:
    """Results come back in job order whatever the worker count."""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_call, jobs))
    else:
        chunks = [_call(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


def _resolve_family(cfg: RunConfig, default: str | None = None) -> Family:
    tag = cfg.family or default
    if tag is None:
        raise UsageError("--family is required for this command")
    try:
        fam = family_from(tag, n=cfg.n, m=cfg.m)
    except FamilyError as exc:
        raise UsageError(str(exc)) from None
    if fam.tag == "euclidean" or not fam.structure_supported:
        raise UsageError(f"{fam}: the checks need a matrix family of odd orthogonal size")
    return fam


def trace_degrees(fam: Family) -> list[int]:
    """Degrees where Tr(X^k) is expected to vanish, up to just past the basis range."""
    dim = make_space(fam).dim
    cap = min(dim, max(identities.basis_power_range(fam)) + 2)
    out = []
    for k in range(1, cap + 1):
        if k % 2 == 0:
            out.append(k)
        elif fam.tag in ("sympl_plus", "orth_plus") and k % 4 == 3:
            out.append(k)
        elif fam.tag in ("sympl_minus", "orth_minus") and k % 4 == 1:
            out.append(k)
    return out


def vanishing_degree(fam: Family) -> int:
    r = fam.size if fam.tag == "full" else fam.n
    return {"full": 2 * r, "sympl_plus": 4 * r - 2, "sympl_minus": 4 * r,
            "orth_minus": 4 * r, "orth_plus": 4 * r + 2}[fam.tag]


def family_jobs(fam: Family, cfg: RunConfig, which: str = "all") -> list[tuple]:
    common = {"budget": cfg.budget, "config_hash": cfg.hash}
    jobs = []
    if which in ("all", "amitsur-levitzki", "rowen", "hutchinson"):
        k = cfg.degree if (cfg.degree is not None and which != "all") else vanishing_degree(fam)
        label = which if which != "all" else "vanishing"
        jobs.append((label, identities.check_vanishing_power, dict(family=fam, k=k, **common)))
    if which in ("all", "trace"):
        degrees = [cfg.degree] if (cfg.degree is not None and which == "trace") else trace_degrees(fam)
        for d in degrees:
            jobs.append(("trace", identities.check_trace_vanishing, dict(family=fam, degree=d, **common)))
    if which in ("all", "relation"):
        jobs.append(("", identities.verify_relation, dict(family=fam, **common)))
    if which in ("all", "consequences"):
        jobs.append(("consequence", identities.derived_consequence_checks, dict(family=fam, **common)))
    if which in ("all", "parity") and fam.involution_sign is not None:
        jobs.append(("", identities.check_parity_split, dict(family=fam, **common)))
    return jobs


def certify_jobs(fam: Family, cfg: RunConfig) -> list[tuple]:
    common = {"budget": cfg.budget, "config_hash": cfg.hash}
    jobs = [("", identities.certify_exterior_invariants, dict(family=fam, **common)),
            ("", identities.certify_basis, dict(family=fam, **common))]
    if fam.involution_sign is not None:
        jobs.append(("", identities.check_parity_split, dict(family=fam, **common)))
    return jobs


def suite_families(max_n: int) -> list[Family]:
    fams = []
    for n in range(1, max_n + 1):
        fams += [Family("full", n), Family("sympl_plus", n), Family("sympl_minus", n),
                 Family("orth_plus", 2 * n + 1), Family("orth_minus", 2 * n + 1)]
    return fams


# ---------------------------------------------------------------------------
# dimension tables

def dims_tables(fam: Family, cfg: RunConfig) -> tuple[list[dict], list[CheckReport]]:
    if fam.tag == "full" or fam.tag == "euclidean" or not fam.structure_supported:
        raise UsageError(f"diagram counts cover the involution families with odd orthogonal size, not {fam}")
    r = fam.n
    pair = inv_oracle.family_pair(fam) if cfg.oracle else None
    tables, checks = [], []
    for kind, counts, target in (("invariants", diagrams.invariant_dims(fam), "trivial"),
                                 ("covariants", diagrams.covariant_dims(fam), "full")):
        with stopwatch() as ms:
            predicted = identities.structure_series(fam, kind=kind)
            degrees = sorted(set(counts) | set(predicted))
            if cfg.degree is not None:
                degrees = [cfg.degree]
            rows, mismatches, skipped = [], [], []
            for d in degrees:
                row = {"degree": d, "count": counts.get(d, 0), "closed_form": predicted.get(d, 0)}
                if pair is not None:
                    try:
                        row["oracle"] = inv_oracle.invariant_dimension(pair, d, target, cfg.budget)
                    except BudgetExceeded:
                        row["oracle"] = None
                        skipped.append(d)
                if row["count"] != row["closed_form"] or row.get("oracle") not in (None, row["count"]):
                    mismatches.append(row)
                rows.append(row)
            total = sum(counts.values())
            expected_total = diagrams.closed_form(fam, kind=kind)
            if total != expected_total:
                mismatches.append({"degree": "total", "count": total, "closed_form": expected_total})
        details = {"total": total, "closed_form_total": expected_total}
        if skipped:
            details["oracle_skipped_degrees"] = skipped
        verdict = FAILS if mismatches else HOLDS
        witness = mismatches[0] if mismatches else None
        checks.append(CheckReport(f"dims[{kind}]", str(fam), r, verdict, witness, ms[0], cfg.hash, details))
        tables.append({"kind": kind, "family": str(fam), "rows": rows})
    return tables, checks


# ---------------------------------------------------------------------------
# sphere case

def _listing(F) -> list[dict]:
    return [{"subset": list(indices_of(k)), "value": v} for k, v in sorted(F.table.items())]


def sphere_checks(n: int, cfg: RunConfig) -> tuple[list[dict], list[CheckReport]]:
    tables, checks = [], []
    try:
        pair = inv_oracle.sphere_pair(n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    label = f"so({2 * n})/so({2 * n - 1})"
    with stopwatch() as ms:
        try:
            cov = inv_oracle.sphere_covariants(n, verify=False)
            bad = [name for name, F in cov.as_dict().items()
                   if not inv_oracle.is_invariant(pair, F, "k" if name.startswith("omega") else "p")]
            det = inv_oracle.determinant_invariant(n)
            if not inv_oracle.is_invariant(pair, det, "trivial"):
                bad.append("determinant")
            details = {"degrees": {k: F.degree for k, F in cov.as_dict().items()}}
            if cfg.fmt == "json":
                details["coefficients"] = {k: _listing(F) for k, F in cov.as_dict().items()}
            verdict = FAILS if bad else HOLDS
            witness = {"not_invariant": bad} if bad else None
        except BudgetExceeded as exc:
            verdict, witness, details = SKIPPED, None, {"reason": str(exc)}
            cov = None
    checks.append(CheckReport("sphere_covariants", label, n, verdict, witness, ms[0], cfg.hash, details))
    for target, names in (("k", ("omega1", "omega2")), ("p", ("theta1", "theta2"))):
        with stopwatch() as ms:
            table = inv_oracle.invariant_table(pair, target, budget=cfg.budget)
            if any(v is None for v in table.values()) or cov is None:
                verdict, witness = SKIPPED, None
                span = None
            else:
                forms = [cov.as_dict()[x] for x in names]
                span = inv_oracle.span_rank(pair, forms, target)
                total = sum(table.values())
                per_degree_ok = all(table[F.degree] >= 1 for F in forms)
                ok = total == 2 and span == 2 and per_degree_ok
                verdict = HOLDS if ok else FAILS
                witness = None if ok else {"kernel_total": total, "span": span}
        rows = [{"degree": d, "count": c, "closed_form": sum(1 for x in names if cov and cov.as_dict()[x].degree == d)}
                for d, c in table.items()]
        tables.append({"kind": f"sphere_{target}", "family": label, "rows": rows})
        checks.append(CheckReport(f"sphere_span[{target}]", label, n, verdict, witness, ms[0], cfg.hash,
                                  {"span": span, "covariants": list(names)}))
    return tables, checks


# ---------------------------------------------------------------------------
# advisory random-tuple precheck

def fuzz_precheck(fams: list[Family], seed: int, samples: int = 3, max_k: int = 4) -> list[dict]:
    """Random integer tuples: X^k against the permutation sum.  Never decides a verdict."""
    rng = random.Random(seed)
    out = []
    for fam in fams:
        if fam.tag == "euclidean":
            continue
        space = make_space(fam)
        agree = True
        for k in range(1, min(max_k, space.dim) + 1):
            Xk = power(space, k)
            for _ in range(samples):
                coords = [[rng.randint(-3, 3) for _ in range(space.dim)] for _ in range(k)]
                mats = [space.vector(c) for c in coords]
                if evaluate(Xk, coords) != identities.standard_poly_direct(mats):
                    agree = False
        out.append({"family": str(fam), "seed": seed, "samples": samples, "max_k": max_k, "agree": agree})
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_dims(cfg: RunConfig):
    fam = _resolve_family(cfg)
    return dims_tables(fam, cfg) + ([fam],)


def cmd_verify(cfg: RunConfig):
    which = cfg.check or "all"
    if which == "all" and cfg.family is None:
        fams = suite_families(cfg.max_n)
        jobs = [j for fam in fams for j in family_jobs(fam, cfg)]
        return [], run_jobs(jobs, cfg.jobs), fams
    fam = _resolve_family(cfg, NAMED_FAMILY.get(which))
    if which in NAMED_FAMILY and fam.tag != NAMED_FAMILY[which]:
        raise UsageError(f"{which} is stated for {NAMED_FAMILY[which]}, not {fam.tag}")
    if which == "parity" and fam.involution_sign is None:
        raise UsageError(f"{fam} has no involution")
    return [], run_jobs(family_jobs(fam, cfg, which), cfg.jobs), [fam]


def cmd_certify(cfg: RunConfig):
    fam = _resolve_family(cfg)
    return [], run_jobs(certify_jobs(fam, cfg), cfg.jobs), [fam]


def cmd_derive_relation(cfg: RunConfig):
    fam = _resolve_family(cfg)
    with stopwatch() as ms:
        try:
            derived = identities.derive_relation(fam, budget=cfg.budget)
        except BudgetExceeded as exc:
            rep = CheckReport("derive_relation", str(fam), fam.n, SKIPPED, None, 0.0, cfg.hash,
                              {"reason": str(exc)})
            return [], [rep], [fam]
        image = identities.apply_pi(derived.expr, cfg.budget)
    details = derived.as_dict()
    ok = derived.unique and image.is_zero()
    witness = None if ok else {"unique": derived.unique, "image_zero": image.is_zero()}
    r = fam.size if fam.tag == "full" else fam.n
    rep = CheckReport("derive_relation", str(fam), r, HOLDS if ok else FAILS, witness, ms[0],
                      cfg.hash, details)
    return [], [rep], [fam]


def cmd_sphere(cfg: RunConfig):
    n = cfg.n
    if n is None:
        if cfg.m is None or cfg.m % 2 == 0:
            raise UsageError("sphere needs --n (or an odd --m = 2n-1)")
        n = (cfg.m + 1) // 2
    tables, checks = sphere_checks(n, cfg)
    return tables, checks, []


def cmd_report(cfg: RunConfig):
    fam = _resolve_family(cfg)
    tables, checks = [], []
    if fam.tag != "full":
        tables, checks = dims_tables(fam, cfg)
    jobs = certify_jobs(fam, cfg) + [j for j in family_jobs(fam, cfg) if j[1] is not identities.check_parity_split]
    return tables, checks + run_jobs(jobs, cfg.jobs), [fam]


HANDLERS = {"dims": cmd_dims, "verify": cmd_verify, "certify": cmd_certify,
            "derive-relation": cmd_derive_relation, "sphere": cmd_sphere, "report": cmd_report}


# ---------------------------------------------------------------------------
# report assembly and rendering

def assemble(cfg: RunConfig, tables: list[dict], checks: list[CheckReport], advisory=None) -> dict:
    failed = [c.name for c in checks if c.verdict == FAILS]
    skipped = [f"{c.family}:{c.name}" for c in checks if c.verdict == SKIPPED]
    report = {
        "version": __version__,
        "config_hash": cfg.hash,
        "config": to_jsonable(cfg.hashed()),
        "checks": [c.as_dict(timings=cfg.timings) for c in checks],
        "tables": to_jsonable(tables),
        "overall": FAILS if failed else HOLDS,
        "skipped": skipped,
    }
    if advisory is not None:
        report["advisory"] = {"fuzz_precheck": advisory}
    stable = json.loads(json.dumps(report))
    for c in stable["checks"]:
        c.pop("timing_ms", None)
    blob = json.dumps(stable, sort_keys=True, separators=(",", ":")).encode()
    report["digest"] = hashlib.sha256(blob).hexdigest()
    return report


def render_text(report: dict) -> str:
    lines = [f"skewform {report['version']}  config {report['config_hash']}"]
    for t in report["tables"]:
        lines.append(f"\n{t['kind']} for {t['family']}")
        has_oracle = any("oracle" in r for r in t["rows"])
        head = f"  {'degree':>6} {'count':>6} {'closed':>6}" + (f" {'oracle':>6}" if has_oracle else "")
        lines.append(head)
        for r in t["rows"]:
            line = f"  {r['degree']:>6} {r['count']:>6} {str(r['closed_form']):>6}"
            if has_oracle:
                line += f" {str(r.get('oracle', '-')):>6}"
            lines.append(line)
    if report["checks"]:
        lines.append("")
    for c in report["checks"]:
        extra = ""
        if "witness" in c:
            extra = "  witness=" + json.dumps(c["witness"], sort_keys=True)
        lines.append(f"{c['verdict']:<15} {c['family']:<16} {c['name']}{extra}")
        d = c.get("details", {})
        if "derived" in d:
            lines.append(f"{'':15} derived: {d['derived']} = 0  unique={d['unique']} "
                         f"printed_homogeneous={d['printed_homogeneous']} printed_match={d['printed_match']}")
    if report.get("advisory"):
        for a in report["advisory"]["fuzz_precheck"]:
            lines.append(f"advisory        {a['family']:<16} random tuples agree={a['agree']}")
    if report["skipped"]:
        lines.append(f"skipped: {', '.join(report['skipped'])}")
    lines.append(f"overall: {report['overall']}")
    return "\n".join(lines) + "\n"


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "family", "degree", "count", "closed_form", "oracle"])
    for t in report["tables"]:
        for r in t["rows"]:
            oracle = r.get("oracle", "")
            w.writerow([t["kind"], t["family"], r["degree"], r["count"], r["closed_form"],
                        "" if oracle is None else oracle])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="skewform",
        description="Exact invariants and covariants of alternating forms on matrix spaces.",
        epilog=f"{ENV_BUDGET_ENTRIES} sets the default --budget-entries.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("check", nargs="?", help=f"verify only: one of {', '.join(VERIFY_CHECKS)}")
    p.add_argument("--family", help="full, sympl-plus, sympl-minus, orth-plus, orth-minus")
    size = p.add_mutually_exclusive_group()
    size.add_argument("--n", type=int, help="rank index (symplectic size 2n, orthogonal size 2n+1)")
    size.add_argument("--m", type=int, help="ambient matrix size")
    p.add_argument("--degree", type=int)
    p.add_argument("--max-n", type=int, default=2, help="verify all: largest rank index")
    p.add_argument("--oracle", action="store_true", help="add Lie-kernel dimensions to tables")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget-entries", type=int, help="cap on power-table entries")
    p.add_argument("--force", action="store_true", help="lift all budgets")
    p.add_argument("--strict", action="store_true", help="exit 3 when a check is skipped for budget")
    p.add_argument("--seed", type=int, help="run the advisory random-tuple precheck")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-timings", dest="timings", action="store_false",
                   help="omit timing fields so reruns are byte-identical")
    return p


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.check is not None and args.command != "verify":
        raise UsageError(f"unexpected argument {args.check!r} for {args.command}")
    if args.check is not None and args.check not in VERIFY_CHECKS:
        raise UsageError(f"unknown check {args.check!r}; choose from {', '.join(VERIFY_CHECKS)}")
    for name in ("n", "m", "jobs", "budget_entries", "max_n"):
        v = getattr(args, name)
        if v is not None and v <= 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if args.degree is not None and args.degree < 0:
        raise UsageError("--degree must be non-negative")
    fmt = args.fmt or "text"
    if fmt == "csv" and args.command not in ("dims", "sphere"):
        raise UsageError("--csv is available for dimension tables only (dims, sphere)")
    try:
        budget = Budget(max_table_entries=args.budget_entries or 0, force=args.force)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(command=args.command, check=args.check, family=args.family, n=args.n, m=args.m,
                     degree=args.degree, max_n=args.max_n, oracle=args.oracle, fmt=fmt,
                     jobs=args.jobs, budget=budget, strict=args.strict, seed=args.seed,
                     out=args.out, timings=args.timings)


def run(cfg: RunConfig) -> tuple[dict, int]:
    try:
        tables, checks, fams = HANDLERS[cfg.command](cfg)
    except identities.InconsistentSystem as exc:
        rep = CheckReport("derive_relation", cfg.family or "", cfg.n or cfg.m or 0, FAILS,
                          {"reason": str(exc)}, 0.0, cfg.hash)
        return assemble(cfg, [], [rep]), EXIT_INCONSISTENT
    advisory = fuzz_precheck(fams, cfg.seed) if cfg.seed is not None else None
    report = assemble(cfg, tables, checks, advisory)
    if report["overall"] == FAILS:
        code = EXIT_FAIL
    elif cfg.strict and report["skipped"]:
        code = EXIT_SKIPPED
    else:
        code = EXIT_OK
    return report, code


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        report, code = run(cfg)
    except SystemExit as exc:  # argparse usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, FamilyError) as exc:
        print(f"skewform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    elif cfg.fmt == "csv":
        text = render_csv(report)
    else:
        text = render_text(report)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        print(f"{report['overall']}: report written to {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
