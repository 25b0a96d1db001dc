"""Command-line entry point: generate, estimate, qestimate, compare-fft, diagnose.

Exit status 0 on success, 2 for invalid input, 3 for numerical failure. On
failure a single line ``error: <code>: <message>`` goes to stderr.
"""
import argparse
import csv
import io as _io
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import io
from .classical import (
    RankSpec,
    bauer_fike_bound,
    estimate,
    matched_displacement,
    pencil_matrix,
    solve_pencil,
    truncate,
)
from .errors import ContractError, NumericalError, QPencilError
from .hankel import berry_diagnostics, build_hankel_pair, extend
from .numerics import eig_general, spectral_norm, svd
from .qsim import qpca_closed_form, qpca_embedding
from .quantum import QuantumConfig, parse_pe, qmpm_estimate
from .signal import SignalModel, add_noise, dft_baseline, sample

COMMANDS = ("generate", "estimate", "qestimate", "compare-fft", "diagnose")
TRUTH_MATCH_TOL = 1e-4


@dataclass
class RunConfig:
    """Parameters of one CLI run; also embedded in every report."""

    command: str = ""
    input: str = None
    output: str = None
    model: str = None
    model_out: str = None
    truth: str = None
    poles: str = None
    coeffs: str = None
    n: int = None
    dt: float = 1.0
    sigma: float = 0.0
    rank: str = "auto"
    mode: str = "exact"
    shots: int = 1_000_000
    seed: int = 0
    pe: str = "ideal"
    offset: float = None
    max_n: int = 64
    t: float = 1.0
    eps: float = 1e-3
    perturbation: float = 1e-6

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ContractError("config JSON must be an object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ContractError(f"unknown config keys {unknown}")
        return cls(**data)

    def to_dict(self):
        return asdict(self)


def _parse_complex_list(text, name):
    try:
        return np.array([complex(item.replace(" ", "")) for item in text.split(",") if item.strip()])
    except ValueError:
        raise ContractError(f"cannot parse {name} {text!r}; use e.g. '-0.1+1j,-0.2-0.5j'") from None


def _check_paths(cfg, needs_input):
    if needs_input:
        if not cfg.input:
            raise ContractError(f"{cfg.command} needs an input signal CSV")
        if not Path(cfg.input).is_file():
            raise ContractError(f"input file {cfg.input} does not exist")
    for name in ("model", "truth"):
        value = getattr(cfg, name)
        if value and not Path(value).is_file():
            raise ContractError(f"{name} file {value} does not exist")
    for name in ("output", "model_out"):
        value = getattr(cfg, name)
        if value and not Path(value).resolve().parent.is_dir():
            raise ContractError(f"directory for {name} {value} does not exist")


def _emit(cfg, text):
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _truth_check(truth, poles, coeffs):
    if truth.p != len(poles):
        return {"matched": False, "reason": f"recovered {len(poles)} poles, truth has {truth.p}"}
    order = _best_matching(truth.poles, poles)
    return {
        "matched": True,
        "pole_error": float(np.max(np.abs(truth.poles - poles[order]))),
        "coeff_error": float(np.max(np.abs(truth.coeffs - coeffs[order]))),
    }


def _best_matching(target, values):
    """Index array pairing each target with a distinct value, minimising cost."""
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(np.asarray(target)[:, None] - np.asarray(values)[None, :])
    rows, cols = linear_sum_assignment(cost)
    out = np.empty(len(target), dtype=int)
    out[rows] = cols
    return out


def cmd_generate(cfg):
    _check_paths(cfg, needs_input=False)
    if cfg.model:
        model = io.read_model(cfg.model)
    else:
        if cfg.poles is None or cfg.coeffs is None or cfg.n is None:
            raise ContractError("generate needs --model or all of --poles, --coeffs, --n")
        model = SignalModel(
            poles=_parse_complex_list(cfg.poles, "poles"),
            coeffs=_parse_complex_list(cfg.coeffs, "coeffs"),
            dt=cfg.dt,
            n=cfg.n,
        )
    signal = add_noise(sample(model), cfg.sigma, cfg.seed)
    if cfg.model_out:
        io.write_model(cfg.model_out, model)
    _emit(cfg, io.signal_to_csv(signal))
    return 0


def _report(cfg, result, truth=None):
    out = result.as_dict()
    if truth is not None:
        out["truth_check"] = _truth_check(truth, result.poles, result.coeffs)
    out["config"] = cfg.to_dict()
    return io.dumps_json(out)


def cmd_estimate(cfg):
    _check_paths(cfg, needs_input=True)
    rank = RankSpec.parse(cfg.rank)
    truth = io.read_model(cfg.truth) if cfg.truth else None
    signal = io.read_signal(cfg.input)
    _emit(cfg, _report(cfg, estimate(signal, rank), truth))
    return 0


def _quantum_config(cfg):
    return QuantumConfig(
        mode=cfg.mode,
        shots=cfg.shots,
        seed=cfg.seed,
        register_bits=parse_pe(cfg.pe),
        rank=RankSpec.parse(cfg.rank),
        reference_offset=cfg.offset,
        max_n=cfg.max_n,
    )


def cmd_qestimate(cfg):
    _check_paths(cfg, needs_input=True)
    qcfg = _quantum_config(cfg)
    truth = io.read_model(cfg.truth) if cfg.truth else None
    signal = io.read_signal(cfg.input)
    _emit(cfg, _report(cfg, qmpm_estimate(signal, qcfg), truth))
    return 0


def compare_fft_rows(signal, rank=None, truth=None):
    """Rows ``(method, index, frequency, damping, magnitude, resolved)``.

    The reference count is the true number of poles when known, else the
    MPM effective rank. DFT resolves when it finds that many peaks; MPM when
    its rank matches and, with a known truth, every pole is within 1e-4.
    """
    report = estimate(signal, rank)
    p_ref = truth.p if truth is not None else report.effective_rank
    spectrum = dft_baseline(signal)
    dft_ok = len(spectrum.peaks) == p_ref
    mpm_ok = report.effective_rank == p_ref
    if mpm_ok and truth is not None:
        order = _best_matching(truth.poles, report.poles)
        mpm_ok = bool(np.max(np.abs(truth.poles - report.poles[order])) < TRUTH_MATCH_TOL)
    rows = []
    for k, (lam, c) in enumerate(zip(report.poles, report.coeffs)):
        rows.append(("mpm", k, float(lam.imag), float(-lam.real), float(abs(c)), mpm_ok))
    for k, (freq, mag) in enumerate(spectrum.peaks):
        rows.append(("dft", k, freq, "", mag, dft_ok))
    return rows


def cmd_compare_fft(cfg):
    _check_paths(cfg, needs_input=True)
    rank = RankSpec.parse(cfg.rank)
    truth = io.read_model(cfg.truth) if cfg.truth else None
    signal = io.read_signal(cfg.input)
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("method", "index", "frequency", "damping", "magnitude", "resolved"))
    for method, k, freq, damp, mag, ok in compare_fft_rows(signal, rank, truth):
        writer.writerow((method, k, repr(freq), damp if damp == "" else repr(damp), repr(mag),
                         "true" if ok else "false"))
    _emit(cfg, buf.getvalue())
    return 0


def diagnose(signal, rank=None, t=1.0, eps=1e-3, perturbation=1e-6, seed=0):
    """Berry norms, a Bauer-Fike check and the QPCA spectrum check."""
    pair = build_hankel_pair(signal)
    t1 = truncate(svd(pair.f1), rank)
    pm = pencil_matrix(pair.f2, t1)
    mus, _ = solve_pencil(pm, signal.dt)
    rng = np.random.default_rng(seed)
    size = pm.matrix.shape
    noise = rng.normal(size=size) + 1j * rng.normal(size=size)
    delta = noise / spectral_norm(noise) * perturbation * spectral_norm(pm.matrix)
    if perturbation == 0:
        delta = np.zeros(size, dtype=np.complex128)
    bound = bauer_fike_bound(pm, delta)
    moved, _ = eig_general(pm.matrix + delta)
    displacement = matched_displacement(moved, mus)
    _, _, z = qpca_embedding(pair.f1)
    qpca_err = float(np.max(np.abs(z.eigenvalues() - qpca_closed_form(pair.f1))))
    return {
        "berry": {
            "f1": berry_diagnostics(extend(pair.f1), t, eps).as_dict(),
            "f2": berry_diagnostics(extend(pair.f2), t, eps).as_dict(),
            "t": t,
            "eps": eps,
        },
        "bauer_fike": {
            "perturbation_norm": float(spectral_norm(delta)),
            "bound": bound,
            "displacement": displacement,
            "holds": bool(displacement <= bound * (1 + 1e-9) + 1e-15),
        },
        "qpca": {
            "max_abs_error": qpca_err,
            "trace": float(np.trace(z.matrix).real),
            "min_eigenvalue": float(z.eigenvalues().min()),
            "passes": bool(qpca_err < 1e-10),
        },
    }


def cmd_diagnose(cfg):
    _check_paths(cfg, needs_input=True)
    rank = RankSpec.parse(cfg.rank)
    signal = io.read_signal(cfg.input)
    out = diagnose(signal, rank, cfg.t, cfg.eps, cfg.perturbation, cfg.seed)
    out["config"] = cfg.to_dict()
    _emit(cfg, io.dumps_json(out))
    return 0


HANDLERS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "qestimate": cmd_qestimate,
    "compare-fft": cmd_compare_fft,
    "diagnose": cmd_diagnose,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qpencil", description="Matrix pencil pole estimation.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
        p.add_argument("--output", "-o", help="output path (default stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--rank", help="auto | p=K | thresh=X")
        if name == "generate":
            p.add_argument("--model", help="model JSON")
            p.add_argument("--model-out", dest="model_out", help="write the model JSON here")
            p.add_argument("--poles", help="comma separated complex poles, e.g. -0.1+1j")
            p.add_argument("--coeffs", help="comma separated complex coefficients")
            p.add_argument("--n", type=int)
            p.add_argument("--dt", type=float)
            p.add_argument("--sigma", type=float, help="noise per real component")
        else:
            p.add_argument("input", nargs="?", help="signal CSV")
        if name in ("estimate", "qestimate", "compare-fft"):
            p.add_argument("--truth", help="model JSON for a ground-truth comparison")
        if name == "qestimate":
            p.add_argument("--mode", choices=("exact", "shots"))
            p.add_argument("--shots", type=int, help="shots per measurement setting")
            p.add_argument("--pe", help="ideal | register:BITS")
            p.add_argument("--offset", type=float, help="reference constant (default max |f|)")
            p.add_argument("--max-n", dest="max_n", type=int, help="simulator sample cap")
        if name == "diagnose":
            p.add_argument("--t", type=float, help="evolution time for the query estimate")
            p.add_argument("--eps", type=float, help="target simulation error")
            p.add_argument("--perturbation", type=float,
                           help="relative size of the injected pencil perturbation")
    return parser


def load_config(args):
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ContractError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ContractError(f"config {args.config} is not valid JSON: {exc.msg}") from None
    cfg = RunConfig.from_dict(data)
    cfg.command = args.command
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        setattr(cfg, key, value)
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return HANDLERS[cfg.command](cfg)
    except QPencilError as exc:
        sys.stderr.write(f"error: {exc.code}: {exc}\n")
        return exc.exit_status
    except (TypeError, ValueError) as exc:
        sys.stderr.write(f"error: contract: {exc}\n")
        return ContractError.exit_status
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: {NumericalError.code}: {exc}\n")
        return NumericalError.exit_status


if __name__ == "__main__":
    sys.exit(main())
