"""Command-line front end.

Exit codes: 0 success, 1 criterion failure, 2 usage, 3 limit or resource.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .acceptance import DEFAULT_SEED, run_all
from .core import SparseTotientOracle, get_oracle, resolve_limit
from .errors import LimitError, PreconditionError, ResourceError, UnsupportedInputError
from .families import primorial_element, scan_e3, scan_fractional, scan_thm3, x_np, y_pk

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
MIN_LIMIT = 100
# Integers at or above this go to JSON as strings so no consumer rounds them.
JSON_SAFE = 1 << 53


@dataclass(frozen=True)
class RunConfig:
    sieve_limit: int
    output_format: Optional[str]
    output_path: Optional[str]
    seed: int
    parallelism: int

    def __post_init__(self):
        if self.sieve_limit < MIN_LIMIT:
            raise PreconditionError(f"sieve limit must be >= {MIN_LIMIT}")
        if self.parallelism < 1:
            raise PreconditionError("--jobs must be >= 1")


def to_json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v) if abs(v) >= JSON_SAFE else v
    if isinstance(v, Fraction):
        return {"num": str(v.numerator), "den": str(v.denominator)}
    if isinstance(v, (list, tuple)):
        return [to_json_value(x) for x in v]
    raise TypeError(f"cannot serialize {type(v).__name__}")


def from_json_value(v):
    """Inverse of to_json_value for ints, rationals and lists (strings of digits become ints)."""
    if isinstance(v, dict) and set(v) == {"num", "den"}:
        return Fraction(int(v["num"]), int(v["den"]))
    if isinstance(v, str) and v.lstrip("-").isdigit():
        return int(v)
    if isinstance(v, list):
        return [from_json_value(x) for x in v]
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_csv_cell(x) for x in v)
    return str(v)


def render(header: list, rows: list, fmt: str) -> str:
    if fmt == "json":
        recs = [{k: to_json_value(v) for k, v in zip(header, row)} for row in rows]
        return json.dumps(recs, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([_csv_cell(v) for v in row] for row in rows)
    else:
        for row in rows:
            buf.write(" ".join(_csv_cell(v) for v in row) + "\n")
    return buf.getvalue()


@contextmanager
def _sink(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


class Runner:
    def __init__(self, cfg: RunConfig, oracle: Optional[SparseTotientOracle] = None):
        self.cfg = cfg
        self._oracle = oracle

    @property
    def oracle(self) -> SparseTotientOracle:
        if self._oracle is None:
            self._oracle = get_oracle(self.cfg.sieve_limit)
        return self._oracle

    def emit(self, header, rows, default_fmt="csv", plain: Optional[str] = None):
        fmt = self.cfg.output_format or default_fmt
        text = plain if fmt == "plain" and plain is not None else render(header, rows, fmt)
        with _sink(self.cfg.output_path) as fh:
            fh.write(text)

    def list_n1(self, a):
        recs = self.oracle.enumerate_n1(a.up_to)
        rows = [(k, r.n, r.phi_n, r.block_start) for k, r in enumerate(recs, 1)]
        self.emit(["k", "n", "phi", "block_start"], rows)

    def check(self, a):
        ok = self.oracle.is_sparsely_totient(a.n)
        b = None if ok else self.oracle.blocker(a.n)
        text = f"{a.n} is sparsely totient" if ok else f"{a.n} is not sparsely totient (blocked by {b})"
        self.emit(["n", "sparsely_totient", "blocker"], [(a.n, ok, b)], "plain", text + "\n")

    def n1(self, a):
        v = self.oracle.n1_of(a.m)
        self.emit(["m", "n1"], [(a.m, v)], "plain", f"{v}\n")

    def bn1(self, a):
        rows = [(k, m, n, k * k) for k, m, n in self.oracle.enumerate_bn1(a.up_to)]
        self.emit(["k", "m_k", "n1", "k_squared"], rows)

    def tn1(self, a):
        r = self.oracle.tn1(a.p)
        word = "CERTIFIED" if r.certified else "UNCERTIFIED"
        self.emit(["p", "value", "certified", "certificate_bound", "last_exception"],
                  [(r.p, r.value, r.certified, r.certificate_bound, r.last_exception)],
                  "plain", f"{r.value} {word}\n")

    def preimage(self, a):
        xs = self.oracle.phi_preimage(a.m)
        self.emit(["x"], [(x,) for x in xs], "plain", " ".join(map(str, xs)) + "\n")

    def family(self, a):
        if a.kind == "x":
            if a.n is None:
                raise PreconditionError("family x needs --n")
            e = x_np(a.n, a.p)
        elif a.kind == "y":
            e = y_pk(a.p, a.k)
        else:
            e = primorial_element(a.p)
        e = e.with_verdict(self.oracle)
        fac = " * ".join(f"{q}^{k}" if k > 1 else str(q) for q, k in e.value.pairs) or "1"
        verdict = "unknown" if e.oracle_verdict is None else _csv_cell(e.oracle_verdict)
        plain = (f"value={e.integer}\nfactorization={fac}\n"
                 f"structural={_csv_cell(e.structural_member)}\noracle={verdict}\n")
        self.emit(["kind", "params", "value", "factorization", "structural", "oracle"],
                  [(e.kind, list(e.params), e.integer, fac, e.structural_member, e.oracle_verdict)],
                  "plain", plain)

    def scan(self, a):
        jobs = self.cfg.parallelism
        if a.what == "frac":
            header = ["p", "p1", "p2", "frac_num", "frac_den", "frac_decimal"]
            rows = [(r.p, r.p1, r.p2, r.frac.numerator, r.frac.denominator, r.frac_decimal)
                    for r in scan_fractional(a.max_p, jobs)]
        elif a.what == "e2":
            header = ["p", "in_set", "blocking_prime"]
            rows = [(r.p, r.in_e2, r.blocking_prime) for r in scan_fractional(a.max_p, jobs)]
        elif a.what == "e3":
            header = ["p", "in_set", "blocking_prime"]
            rows = [(r.p, r.in_e3, r.blocking[1] if r.blocking else None) for r in scan_e3(a.max_p, jobs)]
        else:
            header = ["p", "p1", "p2", "clause_i", "clause_ii", "clause_iii"]
            rows = [(f.p, f.p1, f.p2, f.clause_i is not None, f.clause_ii, f.clause_iii is not None)
                    for f in scan_thm3(a.max_p, jobs)]
        self.emit(header, rows)

    def verify_all(self, a):
        with _sink(self.cfg.output_path) as fh:
            def line(text):
                fh.write(text + "\n")
                fh.flush()

            results = run_all(self.oracle, self.cfg.seed, emit=line)
            failed = sum(r.status == "FAIL" for r in results)
            skipped = sum(r.status == "SKIPPED" for r in results)
            line(f"{len(results) - failed - skipped} passed, {failed} failed, {skipped} skipped")
        return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit", type=int, default=argparse.SUPPRESS,
                        help="sieve limit (default: $STN_SIEVE_LIMIT or 2100000)")
    common.add_argument("--format", choices=["csv", "json", "plain"], default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output to this file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes for scans")

    p = argparse.ArgumentParser(prog="stn", parents=[common],
                                description="Sparsely totient numbers: queries, families and scans.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list-n1", parents=[common], help="sparsely totient numbers up to N")
    s.add_argument("--up-to", type=int, required=True)
    s = sub.add_parser("check", parents=[common], help="is N sparsely totient")
    s.add_argument("n", type=int)
    s = sub.add_parser("n1", parents=[common], help="largest x with phi(x) <= M")
    s.add_argument("m", type=int)
    s = sub.add_parser("bn1", parents=[common], help="totient values of N_1 up to M")
    s.add_argument("--up-to", type=int, required=True)
    s = sub.add_parser("tn1", parents=[common], help="TN_1(P) with certification status")
    s.add_argument("p", type=int)
    s = sub.add_parser("preimage", parents=[common], help="all x with phi(x) = M")
    s.add_argument("m", type=int)

    s = sub.add_parser("family", parents=[common], help="build an X, Y or primorial element")
    s.add_argument("kind", choices=["x", "y", "primorial"])
    s.add_argument("--n", type=int)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--k", type=int, default=1)

    s = sub.add_parser("scan", parents=[common], help="per-prime scans from 11 up to --max-p")
    s.add_argument("what", choices=["e2", "e3", "frac", "thm3"])
    s.add_argument("--max-p", type=int, required=True)

    sub.add_parser("verify-all", parents=[common], help="run the acceptance criteria")
    return p


def _config(a) -> RunConfig:
    return RunConfig(
        sieve_limit=resolve_limit(getattr(a, "limit", None)),
        output_format=getattr(a, "format", None),
        output_path=getattr(a, "out", None),
        seed=getattr(a, "seed", DEFAULT_SEED),
        parallelism=getattr(a, "jobs", 1),
    )


def main(argv: Optional[list] = None, oracle: Optional[SparseTotientOracle] = None) -> int:
    """Entry point; ``oracle`` lets tests inject a prebuilt (or deliberately broken) oracle."""
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(a)
        runner = Runner(cfg, oracle)
        handler = getattr(runner, a.command.replace("-", "_"))
        code = handler(a)
        return EXIT_OK if code is None else code
    except (LimitError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (PreconditionError, UnsupportedInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
