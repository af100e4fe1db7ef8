"""Command-line front end.

Subcommands: ``validate-group``, ``check-symbol``, ``cocycle``, ``dilate``,
``hcalc``. Exit codes: 0 pass, 1 verified failure, 2 usage or I/O error.

Groups are given as ``--group "cyclic 3"`` (families: ``cyclic n``,
``dihedral n``, ``symmetric n`` with n <= 5, products joined by `` x ``) or
``--group-file table.txt``. A builtin psi (``--psi z3-circle``) carries its
own group; ``--psi-file`` needs a group.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .cocycle import CocycleConstructionError, extract_cocycle, verify_cocycle_law, verify_norm_identity
from .dilation import DEFAULT_T_GRID, crossed_consistency, verify_dilation, verify_markov_semigroup, verify_weight_compat
from .groups import CayleyParseError, FiniteGroup, GroupAxiomError, left_regular, load_group, load_group_file, matrix_to_csv
from .hcalc import GeneratorData, QuadConfig, QuadratureError, builtin_family, calculus_norm_estimate, hinfty_apply, hinfty_apply_direct, rational_bump
from .report import SCHEMA_VERSION, config_hash, dumps
from .symbols import SymbolFunction, SymbolParseError, builtin_psi, is_cond_negative_type, load_symbol_file, schoenberg_check

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CSV_COLUMNS = ["function", "element", "psi_value", "contour", "oracle", "abs_error", "p", "p2_exact", "lower_bound", "hinf_norm"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    group: str | None = None
    group_file: str | None = None
    psi: str | None = None
    psi_file: str | None = None
    t_grid: list[float] = field(default_factory=lambda: list(DEFAULT_T_GRID))
    cert_tol: float = 1e-10
    dilation_tol: float = 1e-10
    quad_tol: float = 1e-9
    mc_samples: int = 100_000
    seed: int = 0
    conventions: list[str] = field(default_factory=lambda: ["A", "B"])
    angle: float = math.pi / 4
    family: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    p: float | None = None
    inject_fault: str | None = None
    output: str | None = None
    schema_version: int = SCHEMA_VERSION

    def validate(self):
        for name in ("cert_tol", "dilation_tol", "quad_tol"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be > 0")
        if self.mc_samples < 1:
            raise UsageError("mc_samples must be >= 1")
        bad = [c for c in self.conventions if c not in ("A", "B")]
        if bad:
            raise UsageError(f"unknown conventions {bad}")
        if self.schema_version != SCHEMA_VERSION:
            raise UsageError(f"config schema {self.schema_version} unsupported (expected {SCHEMA_VERSION})")
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown config keys: {sorted(extra)}")
        return cls(**data).validate()

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as e:
            raise UsageError(f"{args.config}: line {e.lineno}: {e.msg}") from None
    cfg = RunConfig.from_json(data)
    for name in ("group", "group_file", "psi", "psi_file", "seed", "mc_samples", "cert_tol",
                 "dilation_tol", "quad_tol", "angle", "p", "inject_fault", "output"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "t_grid", None) is not None:
        cfg.t_grid = _floats(args.t_grid)
    if getattr(args, "conventions", None) is not None:
        cfg.conventions = [c.strip().upper() for c in args.conventions.split(",") if c.strip()]
    if getattr(args, "family", None) is not None:
        cfg.family = _floats(args.family)
    return cfg.validate()


def resolve_group(cfg: RunConfig) -> FiniteGroup | None:
    if cfg.group_file:
        return load_group_file(cfg.group_file)
    if cfg.group:
        return load_group(cfg.group)
    return None


def resolve_psi(cfg: RunConfig) -> SymbolFunction:
    G = resolve_group(cfg)
    if cfg.psi_file:
        if G is None:
            raise UsageError("--psi-file needs --group or --group-file")
        return load_symbol_file(cfg.psi_file, G)
    if cfg.psi:
        try:
            psi = builtin_psi(cfg.psi)
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        if G is not None and G != psi.group:
            raise UsageError(f"builtin {cfg.psi!r} lives on {psi.group.name}, not on the given group")
        return psi
    raise UsageError("no psi given (use --psi NAME or --psi-file PATH)")


def _emit(text: str, cfg: RunConfig | None = None, path: str | None = None):
    path = path or (cfg.output if cfg else None)
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _envelope(cfg: RunConfig, command: str, body: dict) -> dict:
    # output paths do not affect results; keep them out so reports written to
    # different places stay byte-identical
    conf = {k: v for k, v in cfg.to_json().items() if k != "output"}
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": conf,
        "config_hash": config_hash(conf),
        **body,
    }


def cmd_validate_group(args) -> int:
    try:
        G = load_group_file(args.group_file) if args.group_file else load_group(args.group or "")
    except GroupAxiomError as e:
        _emit(dumps({"verdict": "FAIL", "axiom": e.axiom, "witness": list(e.witness), "message": str(e)}), path=args.output)
        return EXIT_FAIL
    body = {
        "verdict": "PASS",
        "name": G.name,
        "order": G.order,
        "identity": G.identity,
        "inverse": G.inverse.tolist(),
        "cayley": G.cayley.tolist(),
    }
    if args.matrix is not None:
        if not 0 <= args.matrix < G.order:
            raise UsageError(f"element {args.matrix} out of range")
        text = matrix_to_csv(left_regular(G, args.matrix))
        if args.matrix_out:
            Path(args.matrix_out).write_text(text)
        else:
            body["left_regular_csv"] = text
    _emit(dumps(body), path=args.output)
    return EXIT_PASS


def cmd_check_symbol(cfg: RunConfig) -> int:
    psi = resolve_psi(cfg)
    if not psi.is_real(cfg.cert_tol):
        cert = None
    else:
        cert = is_cond_negative_type(psi, cfg.cert_tol)
    body = {"group": psi.group.name, "psi": psi.name, "values": psi.values.real.tolist()}
    if cert is None:
        body.update(verdict="FAIL", failed_invariants=["real_valued"], reason="psi is not real-valued")
        _emit(dumps(_envelope(cfg, "check-symbol", body)), cfg)
        return EXIT_FAIL
    body["cond_negative_type"] = {
        "verdict": cert.verdict,
        "max_constrained_value": cert.max_constrained_value,
        "normalization_residual": cert.normalization_residual,
        "symmetry_residual": cert.symmetry_residual,
        "witness": None if cert.witness is None else cert.witness.tolist(),
        "witness_value": cert.witness_value,
        "reason": cert.reason,
    }
    ok = cert.verdict
    failed = [] if cert.verdict else ["cond_negative_type"]
    if cert.normalization_residual <= cfg.cert_tol:
        sch = schoenberg_check(psi, cfg.t_grid, cfg.cert_tol)
        body["schoenberg"] = {
            "verdict": sch.verdict,
            "t_grid": sch.t_grid,
            "min_eigenvalues": sch.min_eigenvalues,
            "warnings": sch.warnings,
            "note": "finite t-grid sampler; the exact certificate is cond_negative_type",
        }
        ok = ok and sch.verdict
        failed += [] if sch.verdict else ["schoenberg"]
    body.update(failed_invariants=failed, verdict="PASS" if ok else "FAIL")
    _emit(dumps(_envelope(cfg, "check-symbol", body)), cfg)
    return EXIT_PASS if ok else EXIT_FAIL


def _certified(psi: SymbolFunction, cfg: RunConfig, command: str) -> bool:
    cert = is_cond_negative_type(psi, cfg.cert_tol)
    if not cert.verdict:
        body = {"group": psi.group.name, "psi": psi.name, "verdict": "FAIL",
                "failed_invariants": ["cond_negative_type"], "reason": cert.reason}
        _emit(dumps(_envelope(cfg, command, body)), cfg)
    return cert.verdict


def _inject(c, spec: str | None):
    if not spec:
        return c
    kind, _, arg = spec.partition(":")
    if kind != "pi-sign":
        raise UsageError(f"unknown fault {spec!r} (supported: pi-sign[:element])")
    s = int(arg) if arg else 1
    if not 0 <= s < c.group.order:
        raise UsageError(f"fault element {s} out of range")
    return c.with_pi(s, -c.pi[s])


def cmd_cocycle(cfg: RunConfig) -> int:
    psi = resolve_psi(cfg)
    if not _certified(psi, cfg, "cocycle"):
        return EXIT_FAIL
    try:
        c = _inject(extract_cocycle(psi), cfg.inject_fault)
    except CocycleConstructionError as e:
        _emit(dumps(_envelope(cfg, "cocycle", {"verdict": "FAIL", "error": str(e)})), cfg)
        return EXIT_FAIL
    law = verify_cocycle_law(c, cfg.dilation_tol)
    norm = verify_norm_identity(c, psi, cfg.dilation_tol)
    ok = law.verdict and norm.verdict
    failed = [k for k, v in (("cocycle_law", law.cocycle_residual), ("pi_homomorphism", law.homomorphism_residual),
                             ("pi_orthogonality", law.orthogonality_residual), ("norm_identity", norm.max_residual))
              if not v <= cfg.dilation_tol]
    body = {
        "group": psi.group.name, "psi": psi.name, "cocycle": c.to_json(),
        "residuals": {
            "cocycle_law": law.cocycle_residual, "pi_homomorphism": law.homomorphism_residual,
            "pi_orthogonality": law.orthogonality_residual, "norm_identity": norm.max_residual,
        },
        "failed_invariants": failed,
        "verdict": "PASS" if ok else "FAIL",
    }
    _emit(dumps(_envelope(cfg, "cocycle", body)), cfg)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_dilate(cfg: RunConfig) -> int:
    psi = resolve_psi(cfg)
    if not _certified(psi, cfg, "dilate"):
        return EXIT_FAIL
    c = _inject(extract_cocycle(psi), cfg.inject_fault)
    markov = verify_markov_semigroup(psi, cfg.t_grid, cfg.dilation_tol)
    dil = verify_dilation(psi, cfg.t_grid, cfg.conventions, cfg.dilation_tol, cfg.seed,
                          cocycle=c, mc_samples=cfg.mc_samples)
    body = {"markov_semigroup": markov, "dilation": dil}
    ok = markov.verdict and dil.verdict
    failed = [f"markov_semigroup.{k}" for k in markov.failed] + [f"dilation.{k}" for k in dil.failed]
    if dil.aborted is None:
        wc = verify_weight_compat(psi, cfg.dilation_tol, cfg.seed, cocycle=c)
        cc = crossed_consistency(c, cfg.seed)
        body.update(weight_compat=wc, crossed_consistency=cc)
        ok = ok and wc.verdict and cc.verdict
        failed += [f"weight_compat.{k}" for k in wc.failed] + [f"crossed_consistency.{k}" for k in cc.failed]
    body.update(group=psi.group.name, psi=psi.name, cocycle_dim=c.dim,
                failed_invariants=failed, verdict="PASS" if ok else "FAIL")
    _emit(dumps(_envelope(cfg, "dilate", body)), cfg)
    return EXIT_PASS if ok else EXIT_FAIL


def _g(x: float) -> str:
    return format(float(x), ".17g")


def cmd_hcalc(cfg: RunConfig) -> int:
    psi = resolve_psi(cfg)
    gen = GeneratorData(SymbolFunction(psi.group, psi.values.real, name=psi.name))
    quad = QuadConfig(tol=cfg.quad_tol)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    worst = 0.0
    for a in cfg.family:
        f = rational_bump(a)
        try:
            contour = hinfty_apply(f, gen, cfg.angle, quad).values
        except QuadratureError as e:
            sys.stderr.write(f"{f.name}: {e}\n")
            _emit(buf.getvalue(), cfg)
            return EXIT_FAIL
        oracle = hinfty_apply_direct(f, gen).values
        norm = calculus_norm_estimate(f, gen, cfg.p, seed=cfg.seed) if cfg.p is not None else None
        for s in psi.group.elements:
            err = abs(contour[s] - oracle[s])
            worst = max(worst, err)
            w.writerow([
                f.name, s, _g(gen.values[s]), _g(contour[s].real), _g(oracle[s].real), _g(err),
                "" if norm is None else _g(cfg.p),
                "" if norm is None else _g(norm.p2_exact),
                "" if norm is None else _g(norm.lower_bound),
                "" if norm is None else _g(norm.hinf_norm),
            ])
    _emit(buf.getvalue(), cfg)
    return EXIT_PASS if worst < 1e-6 else EXIT_FAIL


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON RunConfig file; command-line flags override it")
    p.add_argument("--group", help='group family, e.g. "cyclic 3" or "cyclic 2 x symmetric 3"')
    p.add_argument("--group-file", help="Cayley-table file ('order n' then n rows)")
    p.add_argument("--psi", help="builtin psi: z2-delta, z<n>-circle, z<n>-word, z<n>-zero, s<n>-displacement")
    p.add_argument("--psi-file", help="symbol file with lines 'element re [im]'")
    p.add_argument("--t-grid", help="comma-separated times")
    p.add_argument("--seed", type=int)
    p.add_argument("--cert-tol", type=float)
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="markovdil", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-group", help="load and validate a group")
    p.add_argument("--group")
    p.add_argument("--group-file")
    p.add_argument("--matrix", type=int, help="also export λ_s for this element as CSV of re,im pairs")
    p.add_argument("--matrix-out")
    p.add_argument("--output", "-o")

    p = sub.add_parser("check-symbol", help="certify conditional negative type")
    _add_common(p)

    p = sub.add_parser("cocycle", help="extract and verify the cocycle of psi")
    _add_common(p)
    p.add_argument("--dilation-tol", type=float)
    p.add_argument("--inject-fault", help="pi-sign[:element] flips the sign of one pi_s")

    p = sub.add_parser("dilate", help="verify T_t = E U_t J end to end")
    _add_common(p)
    p.add_argument("--dilation-tol", type=float)
    p.add_argument("--conventions", help="comma-separated subset of A,B")
    p.add_argument("--mc-samples", type=int)
    p.add_argument("--inject-fault", help="pi-sign[:element] flips the sign of one pi_s")

    p = sub.add_parser("hcalc", help="contour vs direct H-infinity calculus; CSV output")
    _add_common(p)
    p.add_argument("--angle", type=float, help="contour half-angle nu in radians (default pi/4)")
    p.add_argument("--quad-tol", type=float)
    p.add_argument("--p", type=float, help="also estimate L^p norms for this p in (1, inf)")
    p.add_argument("--family", help="comma-separated exponents a of z^a/(1+z)^{2a}; empty for none")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "validate-group":
            return cmd_validate_group(args)
        cfg = build_config(args)
        handler = {"check-symbol": cmd_check_symbol, "cocycle": cmd_cocycle,
                   "dilate": cmd_dilate, "hcalc": cmd_hcalc}[args.command]
        return handler(cfg)
    except (UsageError, CayleyParseError, SymbolParseError, GroupAxiomError, OSError) as e:
        sys.stderr.write(f"markovdil {args.command}: error: {e}\n")
        return EXIT_USAGE
    except ValueError as e:
        sys.stderr.write(f"markovdil {args.command}: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
