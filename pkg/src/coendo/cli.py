"""Command line surface.

A single JSON config file describes the group, field, curve and character
data; scalar flags override config fields.  Every report embeds the hash
of the effective config and the sign convention, is emitted with sorted
keys, and is byte-identical across runs and thread counts.

Exit codes: 0 success, 1 computation error, 2 config error, 3 oracle
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys

from . import coendoscopy, coefficients, oracle, predictions, rootsys

FORMAT_VERSION = "1"

DEFAULT_CONFIG = {
    "group": {"factors": ["A1"], "lattice": "sc"},
    "q": 5,
    "curve": {"genus": 1, "place_degrees": [1, 1]},
    "characters": None,
    "convention": "uniform-inverse",
    "route": "enumerate",
    "caps": {"weyl": rootsys.DEFAULT_WEYL_CAP, "points": 1_000_000,
             "orbits": 1_000_000},
    "threads": 1,
}


class ConfigError(ValueError):
    pass


def _merge(base, override):
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        elif value is not None:
            out[key] = value
    return out


def load_config(args) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg = _merge(cfg, file_cfg)
    overrides = {}
    if getattr(args, "type", None):
        overrides["group"] = {"factors": args.type.split(",")}
    if getattr(args, "lattice", None):
        overrides.setdefault("group", {})["lattice"] = args.lattice
    if getattr(args, "q", None):
        overrides["q"] = args.q
    if getattr(args, "genus", None) is not None:
        overrides["curve"] = {"genus": args.genus}
    if getattr(args, "degrees", None):
        overrides.setdefault("curve", {})["place_degrees"] = [
            int(x) for x in args.degrees.split(",")
        ]
    if getattr(args, "convention", None):
        overrides["convention"] = args.convention
    if getattr(args, "route", None):
        overrides["route"] = args.route
    if getattr(args, "threads", None):
        overrides["threads"] = args.threads
    return _merge(cfg, overrides)


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class Context:
    """Validated computation inputs derived from a config."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        q = cfg["q"]
        if not isinstance(q, int) or q < 3:
            raise ConfigError(f"q must be a prime power >= 3, got {q!r}")
        try:
            self.p = coendoscopy._char_of(q)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        group = cfg["group"]
        declared = group.get("p")
        if declared is not None and declared != self.p:
            raise ConfigError(
                f"config p = {declared} is not the characteristic of q = {q}"
            )
        self.q = q
        try:
            self.datum = rootsys.make_datum(
                group["factors"], group.get("lattice", "sc"), self.p
            )
        except (rootsys.IllegalType, rootsys.NotASublattice,
                rootsys.BadCharacteristic, ValueError) as exc:
            raise ConfigError(f"invalid group datum: {exc}") from exc
        self.convention = cfg["convention"]
        if self.convention not in coefficients.CONVENTIONS:
            raise ConfigError(f"unknown convention {self.convention!r}")
        self.route = cfg["route"]
        if self.route not in ("enumerate", "classify"):
            raise ConfigError(f"unknown route {self.route!r}")
        curve = cfg["curve"]
        try:
            self.curve = predictions.CurveData(
                curve["genus"], curve["place_degrees"]
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"invalid curve data: {exc}") from exc
        rank = self.datum.root_system.rank
        chars = cfg.get("characters")
        try:
            if chars is None:
                self.spec = coefficients.CharacterSpec.trivial(
                    rank, max(self.curve.num_places - 1, 0)
                )
            else:
                self.spec = coefficients.CharacterSpec.from_record(chars, rank)
        except (KeyError, ValueError, NotImplementedError) as exc:
            raise ConfigError(f"invalid character spec: {exc}") from exc
        if self.spec.num_places != self.curve.num_places:
            raise ConfigError(
                f"character spec has {self.spec.num_places} places but the "
                f"curve has {self.curve.num_places}"
            )
        caps = cfg["caps"]
        self.weyl_cap = caps.get("weyl", rootsys.DEFAULT_WEYL_CAP)
        self.point_cap = caps.get("points", 1_000_000)
        self.orbit_cap = caps.get("orbits", 1_000_000)
        self._weyl = None
        self._poset = None

    @property
    def weyl(self):
        if self._weyl is None:
            self._weyl = rootsys.weyl_generate(
                self.datum.root_system, self.weyl_cap
            )
        return self._weyl

    @property
    def poset(self):
        if self._poset is None:
            self._poset = coendoscopy.strata_poset(
                self.datum, self.q, self.route, weyl=self.weyl,
                point_cap=self.point_cap, weyl_cap=self.weyl_cap,
            )
        return self._poset

    def envelope(self, command: str) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "command": command,
            "config_hash": config_hash(self.cfg),
            "convention": self.convention,
            "group": repr(self.datum.root_system),
            "lattice": self.datum.cochar.name,
            "q": self.q,
        }


def cmd_classify(ctx: Context) -> dict:
    report = ctx.envelope("classify")
    rows = []
    for cl in coendoscopy.classify(ctx.datum, ctx.q):
        rows.append(
            {
                "signature": cl.signature,
                "deleted_node": (
                    None if cl.is_whole_group else
                    list(cl.deleted_node) if isinstance(cl.deleted_node, tuple)
                    else cl.deleted_node
                ),
                "whole_group": cl.is_whole_group,
                "rational": cl.rational_over_fq,
                "equivalent_nodes": [list(g) for g in cl.equivalent_nodes],
            }
        )
    report["classes"] = rows
    report["rational_count"] = sum(1 for r in rows if r["rational"])
    return report


def cmd_strata(ctx: Context) -> dict:
    report = ctx.envelope("strata")
    poset = ctx.poset
    report["route"] = poset.route
    report["warnings"] = list(poset.warnings)
    report["strata"] = poset.summary()
    mob = [
        [i, j, v] for (i, j), v in sorted(poset.mobius_table.items())
    ]
    report["mobius"] = mob
    return report


def cmd_coeffs(ctx: Context) -> dict:
    report = ctx.envelope("coeffs")
    table = coefficients.n_table(
        ctx.datum, ctx.q, ctx.spec, ctx.poset, ctx.convention,
        orbit_cap=ctx.orbit_cap,
    )
    report["central_product_trivial"] = coefficients.central_product_test(
        ctx.spec, ctx.datum, ctx.q
    )
    report["rows"] = table.to_records()
    report["total_abs"] = table.total_abs
    report["bound_constant"] = coefficients.bound_constant(
        ctx.datum, ctx.spec.num_places
    )
    return report


def cmd_predict(ctx: Context, counts_path: str | None, approx: bool) -> dict:
    report = ctx.envelope("predict")
    table = coefficients.n_table(
        ctx.datum, ctx.q, ctx.spec, ctx.poset, ctx.convention,
        orbit_cap=ctx.orbit_cap,
    )
    if approx or counts_path is None:
        counts = predictions.LEADING_TERM_APPROX
    else:
        with open(counts_path) as fh:
            raw = json.load(fh)
        counts = {
            (row["stratum_type"], tuple(row["orbit_rep"])): row["count"]
            for row in raw["rows"]
        }
    pred = predictions.assemble_prediction(
        ctx.datum, ctx.q, ctx.curve, table, counts
    )
    report["prediction"] = pred.to_record()
    report["leading_term"] = {
        key: str(value) if not isinstance(value, (int, bool, type(None))) else value
        for key, value in predictions.leading_term(
            ctx.datum, ctx.q, ctx.curve
        ).items()
    }
    return report


def cmd_verify(manifest_path: str) -> dict:
    if manifest_path == "default":
        manifest = oracle.default_manifest()
    else:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    verdicts = oracle.run_manifest(manifest)
    return {
        "format_version": FORMAT_VERSION,
        "command": "verify",
        "manifest": manifest_path,
        "config_hash": config_hash({"manifest": manifest}),
        "instances": len(verdicts),
        "failures": sum(1 for v in verdicts if not v.passed),
        "verdicts": [v.to_record() for v in verdicts],
    }


_CSV_COLUMNS = {
    "classify": ("classes", ["signature", "deleted_node", "whole_group",
                             "rational"]),
    "strata": ("strata", ["signature", "roots", "z_order", "s_size",
                          "z_invariants", "canonical"]),
    "coeffs": ("rows", ["stratum_type", "orbit_rep", "orbit_size", "n",
                        "n_sum"]),
    "verify": ("verdicts", ["check", "instance", "passed"]),
}


def emit(report: dict, fmt: str, command: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2, default=str))
        out.write("\n")
        return
    if fmt == "csv":
        if command == "predict":
            rows = report["prediction"]["rows"]
            cols = ["stratum_type", "orbit_rep", "orbit_size", "n_sum",
                    "components", "exponent", "count"]
        else:
            key, cols = _CSV_COLUMNS[command]
            rows = report[key]
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(cols)
        for row in rows:
            writer.writerow([json.dumps(row.get(c), default=str)
                             if isinstance(row.get(c), (list, dict))
                             else row.get(c) for c in cols])
        return
    # text
    head = {k: v for k, v in report.items()
            if not isinstance(v, (list, dict))}
    for k in sorted(head):
        out.write(f"{k}: {head[k]}\n")
    for k, v in report.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            out.write(f"{k}:\n")
            for row in v:
                out.write("  " + json.dumps(row, sort_keys=True, default=str))
                out.write("\n")
        elif isinstance(v, dict):
            out.write(f"{k}: " + json.dumps(v, sort_keys=True, default=str))
            out.write("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coendo",
        description="split elliptic coendoscopic classification and "
                    "multiplicity coefficients over F_q",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--type", help="comma-separated simple types, e.g. G2 or A2,A1")
        p.add_argument("--lattice", choices=["sc", "ad"])
        p.add_argument("--q", type=int)
        p.add_argument("--genus", type=int)
        p.add_argument("--degrees", help="comma-separated place degrees")
        p.add_argument("--convention", choices=list(coefficients.CONVENTIONS))
        p.add_argument("--route", choices=["enumerate", "classify"])
        p.add_argument("--format", choices=["json", "csv", "text"],
                       default="json")
        p.add_argument("--threads", type=int, help="worker bound (results are "
                       "deterministic and order-independent)")
        p.add_argument("--out", help="output file (default stdout)")

    for name in ("classify", "strata", "coeffs"):
        common(sub.add_parser(name))
    pp = sub.add_parser("predict")
    common(pp)
    pp.add_argument("--counts", help="JSON file with fiber point counts")
    pp.add_argument("--approx", action="store_true",
                    help="leading-term approximation for all counts")
    pv = sub.add_parser("verify")
    pv.add_argument("--manifest", default="default")
    pv.add_argument("--format", choices=["json", "csv", "text"],
                    default="json")
    pv.add_argument("--out", help="output file (default stdout)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buffer = io.StringIO()
    try:
        if args.command == "verify":
            report = cmd_verify(args.manifest)
            emit(report, args.format, "verify", buffer)
            code = 3 if report["failures"] else 0
        else:
            cfg = load_config(args)
            ctx = Context(cfg)
            if args.command == "classify":
                report = cmd_classify(ctx)
            elif args.command == "strata":
                report = cmd_strata(ctx)
            elif args.command == "coeffs":
                report = cmd_coeffs(ctx)
            elif args.command == "predict":
                report = cmd_predict(ctx, args.counts, args.approx)
            else:  # pragma: no cover
                raise AssertionError(args.command)
            emit(report, args.format, args.command, buffer)
            code = 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (rootsys.CapExceeded, coefficients.MissingCount,
            NotImplementedError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = buffer.getvalue()
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
