"""Command-line front end: ``endoconj <subcommand> ...``.

Exit codes: 0 success, 1 malformed input, 2 numerical failure. Diagnostics
go to stderr as a single JSON object; reports are written with sorted keys
so repeated runs with the same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, NumericalFailure, StageError
from .jets import Jet
from .linearization import ProjectionSystem, build_theta
from .localization import LocalizedSemigroup
from .reconstruct import (ConjugationIso, PipelineConfig, RecordingIso, collapsing_stub,
                          demonstrate_mixed_contradiction, epimorphism_separation, iso_from_dict,
                          mixed_map, run_pipeline)
from .sampling import DEFAULT_SEED
from .tolerances import DEFAULT_DEGREE, EPS_EVAL, EPS_FIT, MAX_DEGREE, MIN_DEGREE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


@dataclass
class RunConfig:
    degree: int = DEFAULT_DEGREE
    samples: int = 12
    grid: int = 100
    seed: int = DEFAULT_SEED
    eps_eval: float = EPS_EVAL
    eps_fit: float = EPS_FIT
    report: str | None = None
    json: bool = False

    def __post_init__(self):
        if not MIN_DEGREE <= self.degree <= MAX_DEGREE:
            raise InputError(f"degree must lie in [{MIN_DEGREE}, {MAX_DEGREE}], got {self.degree}")
        if self.eps_eval <= 0 or self.eps_fit <= 0:
            raise InputError("tolerances must be positive")
        if self.samples < 8:
            raise InputError("need at least 8 character samples")
        if self.grid < 1:
            raise InputError("grid size must be positive")

    @classmethod
    def from_args(cls, args) -> RunConfig:
        return cls(degree=getattr(args, "degree", DEFAULT_DEGREE), samples=getattr(args, "samples", 12),
                   grid=getattr(args, "grid", 100), seed=args.seed, eps_eval=args.eps_eval,
                   eps_fit=args.eps_fit, report=args.report, json=args.json)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([complex(t.strip().replace("i", "j")) for t in text.split(",")], dtype=np.complex128)
    except ValueError as exc:
        raise InputError(f"cannot parse complex vector {text!r}") from exc


def _emit(report: dict, summary: str, cfg: RunConfig) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.report:
        Path(cfg.report).write_text(text)
    sys.stdout.write(text if cfg.json else summary + "\n")


def _jet(data) -> Jet:
    try:
        return Jet.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed jet JSON: {exc}") from exc


# -- subcommands ---------------------------------------------------------------

def cmd_linearize(args, cfg: RunConfig) -> int:
    g = _jet(_read_json(args.jet))
    if g.n_in != g.n_out:
        raise InputError("linearize needs a square jet")
    if args.projections:
        sys_ = ProjectionSystem.from_projections([_jet(p) for p in _read_json(args.projections)])
    else:
        sys_ = ProjectionSystem.coordinate(g.n_in, g.degree)
    data = build_theta(g, sys_)
    lam = ", ".join(f"{v:.6g}" for v in data.lam.entries)
    _emit(data.to_dict(), f"lambda=({lam}) residual={data.residual:.3e}", cfg)
    return 0


def cmd_localize(args, cfg: RunConfig) -> int:
    data = _read_json(args.input)
    try:
        f = _jet(data["f"])
        S = LocalizedSemigroup([_jet(b) for b in data.get("base", [])], f)
        elems = [S.element(_jet(e["h"]), int(e.get("k", 0))) for e in data.get("elements", [])]
    except KeyError as exc:
        raise InputError(f"localize input lacks {exc}") from exc
    product = S.unit()
    for e in elems:
        product = product * e
    report = {"base_size": len(S.base), "elements": [e.to_dict() for e in elems],
              "product": product.to_dict(), "universal_map": S.universal_map(product).to_dict()}
    _emit(report, f"base={len(S.base)} elements={len(elems)} product_k={product.k}", cfg)
    return 0


def cmd_reconstruct(args, cfg: RunConfig) -> int:
    phi = iso_from_dict(_read_json(args.phi))
    if args.dim is not None and args.dim != phi.dim_in:
        raise InputError(f"--dim {args.dim} does not match phi (dimension {phi.dim_in})")
    truth = phi.psi0 if isinstance(phi, ConjugationIso) else None
    recorder = None
    if args.record_table:
        if truth is None:
            raise InputError("--record-table needs a test-mode phi")
        phi = recorder = RecordingIso(phi)
    pcfg = PipelineConfig(degree=cfg.degree, samples=cfg.samples, grid_size=cfg.grid, seed=cfg.seed,
                          eps_eval=cfg.eps_eval, eps_fit=cfg.eps_fit)
    rep = run_pipeline(phi, pcfg, ground_truth=truth)
    if recorder is not None:
        Path(args.record_table).write_text(json.dumps(recorder.table().to_dict(), sort_keys=True) + "\n")
    out = rep.to_dict()
    out["mode"] = "test" if truth is not None else "blind"
    perm = " ".join(str(j + 1) for j in rep.reconstruction.permutation)
    resid = max(rep.reconstruction.max_residual, rep.conjugacy_residual)
    summary = f"classification={rep.classification} permutation=({perm}) max_residual={resid:.3e}"
    if rep.ground_truth_error is not None:
        summary += f" ground_truth_error={rep.ground_truth_error:.3e}"
    _emit(out, summary, cfg)
    return 0


def cmd_contradict(args, cfg: RunConfig) -> int:
    n = args.dim
    if n < 2:
        raise InputError("contradict needs --dim >= 2")
    point = _vector(args.point) if args.point else None
    runs = {
        "mixed": mixed_map(n, (1,)),
        "holomorphic": mixed_map(n, ()),
        "antiholomorphic": mixed_map(n, tuple(range(n))),
    }
    report = {k: demonstrate_mixed_contradiction(n, form=v, lam=args.lam, point=point,
                                                 degree=cfg.degree).to_dict()
              for k, v in runs.items()}
    summary = " ".join(f"{k}: dbar={v['dbar_conjugated']:.3e}" for k, v in report.items())
    _emit(report, summary, cfg)
    return 0


def cmd_separate(args, cfg: RunConfig) -> int:
    z1, z2, zeta = _vector(args.z1), _vector(args.z2), _vector(args.zeta)
    if not z1.size == z2.size == zeta.size:
        raise InputError("z1, z2 and zeta must have the same length")
    phi = iso_from_dict(_read_json(args.phi)) if args.phi else ConjugationIso(np.eye(z1.size))
    if phi.dim_in != z1.size:
        raise InputError("points do not match phi's dimension")
    if args.collapse:
        phi = collapsing_stub(phi, z2, z1)
    rep = epimorphism_separation(z1, z2, zeta, phi, eps=cfg.eps_eval)
    verdict = "contradiction" if rep.contradiction else ("consistent" if rep.consistent else "inconsistent")
    _emit(rep.to_dict(), f"{verdict} max_residual={max(rep.residual_z1, rep.residual_z2):.3e}", cfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--report", help="write the JSON report to this path")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    common.add_argument("--eps-eval", type=float, default=EPS_EVAL)
    common.add_argument("--eps-fit", type=float, default=EPS_FIT)
    common.add_argument("--degree", type=int, default=DEFAULT_DEGREE)

    parser = _Parser(prog="endoconj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("linearize", parents=[common], help="Koenigs linearization of a germ")
    p.add_argument("--jet", required=True, help="jet JSON file ('-' for stdin)")
    p.add_argument("--projections", help="JSON list of projection jets (default: coordinate)")
    p.set_defaults(run=cmd_linearize)

    p = sub.add_parser("localize", parents=[common], help="canonical forms in a localized semigroup")
    p.add_argument("--input", required=True, help='JSON {"f": jet, "base": [jets], "elements": [{"h", "k"}]}')
    p.set_defaults(run=cmd_localize)

    p = sub.add_parser("reconstruct", parents=[common], help="recover psi from a semigroup map")
    p.add_argument("--phi", required=True, help="phi JSON (test mode psi0 or blind-mode table)")
    p.add_argument("--dim", type=int)
    p.add_argument("--samples", type=int, default=12)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--record-table", help="write the blind-mode table of every query made (test mode)")
    p.set_defaults(run=cmd_reconstruct)

    p = sub.add_parser("contradict", parents=[common], help="mixed-orientation Cauchy-Riemann check")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--lam", type=complex, default=0.1)
    p.add_argument("--point", help="comma-separated complex point (default 0.05 in each coordinate)")
    p.set_defaults(run=cmd_contradict)

    p = sub.add_parser("separate", parents=[common], help="homothety separation check")
    p.add_argument("--z1", required=True)
    p.add_argument("--z2", required=True)
    p.add_argument("--zeta", required=True)
    p.add_argument("--phi", help="phi JSON (default: identity)")
    p.add_argument("--collapse", action="store_true", help="plant a stub sending c_z2 to c_z1")
    p.set_defaults(run=cmd_separate)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    diag = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, StageError):
        diag["stage"] = exc.stage
    sys.stderr.write(json.dumps(diag, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig.from_args(args)
        return args.run(args, cfg)
    except InputError as exc:
        return _fail(1, exc)
    except NumericalFailure as exc:
        return _fail(2, exc)
    except (np.linalg.LinAlgError, ZeroDivisionError, FloatingPointError) as exc:
        return _fail(2, exc)


if __name__ == "__main__":
    sys.exit(main())
