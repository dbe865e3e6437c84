"""``phasekit`` command line.

Subcommands: verify, moments, coherent, phase-dist, dump, legacy.
Exit codes: 0 success, 1 failed check or computation error, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from contextlib import nullcontext
from fractions import Fraction
from pathlib import Path

from . import dynamics, io, legacy, observables, operators
from .errors import ConfigError, ParseError, PhasekitError, TruncationInsufficient, UnknownOperator
from .fock import TruncationConfig, coherent_state, fock_state
from .phase_states import build_phase_table
from .special import build_quadrature
from .verification import DEFAULT_TOLERANCES, run_identity_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclasses.dataclass
class RunConfig:
    n_max: int = 256
    quad: int = 2048
    interior_margin: int = 4
    tolerances: dict = dataclasses.field(default_factory=dict)
    format: str = "csv"
    out: str | None = None

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        try:
            self.truncation()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not isinstance(self.quad, int) or self.quad < 64:
            raise ConfigError(f"quad must be an integer >= 64, got {self.quad!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if not isinstance(self.tolerances, dict):
            raise ConfigError("tolerances must be an object")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")

    def truncation(self) -> TruncationConfig:
        return TruncationConfig(n_max=self.n_max, interior_margin=self.interior_margin)


def load_run_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    cfg = RunConfig.from_mapping(data)
    for name in ("n_max", "quad", "interior_margin", "format", "out"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    for item in args.tol or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects KEY=VALUE, got {item!r}")
        try:
            cfg.tolerances[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--tol {key}: {exc}") from exc
    cfg.validate()
    return cfg


def parse_state_spec(spec: str, cfg: TruncationConfig):
    """``fock:<n>`` or ``coherent:<|alpha|>,<phi>``."""
    kind, sep, rest = spec.partition(":")
    try:
        if sep and kind == "fock":
            return fock_state(cfg, int(rest))
        if sep and kind == "coherent":
            a, ph = rest.split(",")
            return coherent_state(cfg, float(a), float(ph))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, PhasekitError):
            raise
        raise ParseError(f"bad state spec {spec!r}: {exc}") from exc
    raise ParseError(f"bad state spec {spec!r}; expected fock:<n> or coherent:<abs>,<phi>")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _emit(rows: list[dict], cfg: RunConfig) -> None:
    text = io.render_rows(rows, cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args, cfg: RunConfig) -> int:
    checks = run_identity_suite(cfg.truncation(), cfg.quad, cfg.tolerances)
    _emit([c.as_row() for c in checks], cfg)
    for c in checks:
        if not c.passed:
            print(f"FAILED {c.check_id} [{c.paper_eq}]: measured {io.fmt(c.measured)} "
                  f"> tolerance {io.fmt(c.tolerance)}", file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def _moment_tag(k: int) -> str:
    return {1: "3.16", 2: "3.17/3.21", 3: "3.18/3.22"}.get(k, "3.15")


def cmd_moments(args, cfg: RunConfig) -> int:
    n_list, k_list = _int_list(args.n), _int_list(args.k)
    trunc = cfg.truncation()
    if args.n_max is None and not _explicit_config_n_max(args):
        # the band walk is local, so a wide enough basis costs nothing
        need = max(n + 2 * k for n in n_list for k in k_list) + trunc.interior_margin
        if need > trunc.n_max:
            trunc = TruncationConfig(need + need % 2, trunc.interior_margin)
    rows, status = [], EXIT_OK
    for n in n_list:
        for k in k_list:
            row = {"n": n, "k": k, "paper_eq": _moment_tag(k)}
            try:
                rep = observables.moment_report(n, k, trunc, exact=args.exact)
            except TruncationInsufficient as exc:
                row.update(value="ERROR", uniform_value="", side="", error=str(exc))
                status = EXIT_FAIL
            else:
                conv = str if args.exact else float
                row.update(value=conv(rep.value), uniform_value=conv(rep.uniform_value),
                           side=rep.side.value, error="")
            rows.append(row)
    _emit(rows, cfg)
    return status


def _explicit_config_n_max(args) -> bool:
    if not args.config:
        return False
    return "n_max" in json.loads(Path(args.config).read_text())


COHERENT_TAGS = {"cos2phi": "3.26", "comm_cos2phi_H": "3.27", "comm_cos_sq_H": "3.28",
                 "comm_sin_sq_H": "3.29"}


def cmd_coherent(args, cfg: RunConfig) -> int:
    report = observables.classical_limit_report(_float_list(args.alpha), args.phase, cfg.truncation())
    rows = [{"quantity": r.quantity, "paper_eq": COHERENT_TAGS[r.quantity], "abs_alpha": r.abs_alpha,
             "series": r.series, "matrix": r.matrix, "classical": r.classical,
             "deviation": r.deviation} for r in report]
    _emit(rows, cfg)
    return EXIT_OK


def cmd_phase_dist(args, cfg: RunConfig) -> int:
    trunc = cfg.truncation()
    state = parse_state_spec(args.state, trunc)
    table = build_phase_table(trunc, build_quadrature(cfg.quad))
    dist = observables.phase_distribution(state, table)
    _emit([{"phi": phi, "branch": br, "density": d} for phi, br, d in dist.rows()], cfg)
    print(f"integral {io.fmt(dist.total())}", file=sys.stderr)
    return EXIT_OK


def _named_operator(name: str, cfg: RunConfig):
    trunc = cfg.truncation()
    banded = {
        "cos2phi": operators.build_cos2phi,
        "cos_sq": operators.build_cos_sq,
        "sin_sq": operators.build_sin_sq,
        "sg_c": lambda c: legacy.build_sg(c)[0],
        "sg_s": lambda c: legacy.build_sg(c)[1],
    }
    spectral = {
        "phi": operators.build_phi,
        "phi_display": lambda t: operators.build_phi(t, display=True),
        "cos_phi": operators.build_cos_phi,
        "sin_phi": operators.build_sin_phi,
        "tan_phi": operators.build_tan_phi,
    }
    if name in banded:
        return banded[name](trunc)
    if name in spectral:
        return spectral[name](build_phase_table(trunc, build_quadrature(cfg.quad)))
    raise UnknownOperator(f"unknown operator {name!r}; choose from {sorted(banded) + sorted(spectral)}")


OPERATOR_NAMES = ("phi", "phi_display", "cos2phi", "cos_sq", "sin_sq", "cos_phi", "sin_phi",
                  "tan_phi", "sg_c", "sg_s")


def cmd_dump(args, cfg: RunConfig) -> int:
    if not cfg.out:
        raise ConfigError("dump needs --out PATH")
    op = dynamics.heisenberg(_named_operator(args.operator, cfg), args.time)
    if args.matrix_format == "bin":
        io.write_matrix_binary(cfg.out, op.entries)
    else:
        io.write_matrix_csv(cfg.out, op.entries)
    return EXIT_OK


def cmd_legacy(args, cfg: RunConfig) -> int:
    trunc = cfg.truncation()
    rows = [{"quantity": f"sg_{k}", "paper_eq": "1.12-1.17", "value": v}
            for k, v in legacy.sg_defects(trunc).items()]
    rows.append({"quantity": "sg_C_S_commutator_printed_sign", "paper_eq": "1.16",
                 "value": legacy.sg_printed_sign_deviation(trunc)})
    for s in args.s:
        rows.append({"quantity": f"pb_divergence_s{s}", "paper_eq": "1.23",
                     "value": legacy.pb_divergence(s)})
    _emit(rows, cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--n-max", dest="n_max", type=int)
    common.add_argument("--quad", type=int, help="quadrature node count")
    common.add_argument("--interior-margin", dest="interior_margin", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out")
    common.add_argument("--tol", action="append", metavar="CHECK=VALUE", help="tolerance override")

    parser = argparse.ArgumentParser(prog="phasekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the identity suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("moments", parents=[common], help="number-state phase moments")
    p.add_argument("--n", default="0,1,2")
    p.add_argument("--k", default="1,2,3")
    p.add_argument("--exact", action="store_true", help="print reduced fractions")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("coherent", parents=[common], help="coherent-state classical limit")
    p.add_argument("--alpha", default="2,4,8", help="comma-separated |alpha| values")
    p.add_argument("--phase", type=float, default=math.pi / 6)
    p.set_defaults(func=cmd_coherent)

    p = sub.add_parser("phase-dist", parents=[common], help="phase distribution of a state")
    p.add_argument("--state", default="fock:0")
    p.set_defaults(func=cmd_phase_dist)

    p = sub.add_parser("dump", parents=[common], help="write an operator matrix")
    p.add_argument("--operator", required=True)
    p.add_argument("--time", type=float, default=0.0)
    p.add_argument("--matrix-format", choices=("csv", "bin"), default="csv")
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("legacy", parents=[common], help="Susskind-Glogower / Pegg-Barnett demos")
    p.add_argument("--s", type=_int_list, default=[1, 10, 100, 1000])
    p.set_defaults(func=cmd_legacy)
    return parser


def _thread_limit():
    value = os.environ.get("PHASEKIT_THREADS")
    if not value:
        return nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=int(value))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args)
    except ConfigError as exc:
        print(f"phasekit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with _thread_limit():
            return args.func(args, cfg)
    except ConfigError as exc:
        print(f"phasekit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhasekitError as exc:
        print(f"phasekit: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
