"""Command-line interface.

Exit status: 0 success, 1 the math says no (invalid process, failed check),
2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import classical, game, hs, io, process
from .cj import cj_from_unitary, identity_channel
from .sampling import haar_unitary
from .tensor import DimensionError

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2

_S = 1 / np.sqrt(2)
STATES_2Q = {
    "singlet": np.array([0, _S, -_S, 0]),
    "phi-plus": np.array([_S, 0, 0, _S]),
    "zero": np.array([1, 0, 0, 0]),
    "mixed": None,
}
STATES_1Q = {
    "zero": np.array([1, 0]),
    "one": np.array([0, 1]),
    "plus": np.array([_S, _S]),
    "minus": np.array([_S, -_S]),
    "mixed": None,
}
UNITARIES_1Q = {
    "identity": np.eye(2),
    "x": np.array([[0, 1], [1, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
    "hadamard": np.array([[1, 1], [1, -1]]) * _S,
}


# second spelling kept for compatibility with existing scripts
PROTOCOLS = ("basis-switch", "appendix-e")


class UsageError(Exception):
    pass


def _density(name: str, table: dict, d: int) -> np.ndarray:
    if name not in table:
        raise UsageError(f"unknown state {name!r}; choose from {', '.join(table)}")
    v = table[name]
    if v is None:
        return np.eye(d) / d
    return np.outer(v, np.conj(v))


def _unitary(name: str, seed) -> np.ndarray:
    if name == "random":
        return haar_unitary(2, seed)
    if name not in UNITARIES_1Q:
        raise UsageError(f"unknown unitary {name!r}; choose from {', '.join(UNITARIES_1Q)}, random")
    return UNITARIES_1Q[name]


def _emit(args, command: str, verdict: str, metrics: dict, artifacts=(), lines=()) -> None:
    if getattr(args, "json", False):
        out = {"command": command, "verdict": verdict, "metrics": metrics, "artifacts": list(artifacts)}
        print(json.dumps(out, indent=2, default=_jsonable))
    else:
        for line in lines:
            print(line)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


# commands --------------------------------------------------------------------


def cmd_validate(args) -> int:
    pm = io.read_process(args.path)
    rec = process.validate(pm, mode=args.mode, tol=args.tol, n_probes=args.probes, seed=args.seed)
    verdict = "valid" if rec else "invalid"
    lines = [
        f"verdict: {verdict}",
        f"dims (A1, A2, B1, B2): {pm.systems.dims}",
        f"min eigenvalue: {rec.min_eigenvalue:.6g}",
        f"trace: {rec.trace:.12g} (expected {pm.systems.normalization}, residual {rec.trace_residual:.3g})",
    ]
    if rec.structural is not None:
        st = rec.structural
        lines.append(f"structural: {'ACCEPT' if st.ok else 'REJECT'} "
                     f"(identity coefficient residual {st.normalization_residual:.3g})")
        if st.forbidden:
            for t, wgt in st.forbidden.items():
                lines.append(f"  forbidden term type {t}: weight {wgt:.6g}")
        else:
            lines.append("  forbidden term types: none")
        lines.append(f"  signalling terms: {', '.join(st.signalling) or 'none'}")
    if rec.probe_worst_residual is not None:
        lines.append(f"probe: worst |P - 1| = {rec.probe_worst_residual:.3g} over {rec.n_probes} random CPTP pairs")
    _emit(args, "validate", verdict, rec.to_dict(), lines=lines)
    return EXIT_OK if rec else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    pm = io.read_process(args.path)
    report = pm.hs_report
    st = hs.classify_validity(report)
    verdict = "accept" if st.ok else "reject"
    lines = [f"{'type':<10} {'basis (A1,A2,B1,B2)':<22} {'coefficient':>22}  status"]
    for t in report.terms():
        status = "forbidden" if t.type in hs.FORBIDDEN else "allowed"
        lines.append(f"{t.type:<10} {','.join(t.names):<22} {t.coefficient:>22.17g}  {status}")
    lines.append(f"structural verdict: {'ACCEPT' if st.ok else 'REJECT'}")
    if st.forbidden:
        lines.append("forbidden types: " + ", ".join(f"{k} (weight {v:.6g})" for k, v in st.forbidden.items()))
    if st.bidirectional:
        lines.append("terms signalling in both directions: may not be a mixture of one-way processes")
    metrics = {
        "terms": report.table(),
        "identity_coefficient": report.identity_coefficient,
        "normalization_residual": st.normalization_residual,
        "forbidden_terms": st.forbidden,
        "signalling": list(st.signalling),
        "weights": report.weights,
    }
    _emit(args, "classify", verdict, metrics, lines=lines)
    return EXIT_OK if st.ok else EXIT_NEGATIVE


def _load_optional_channel(name: str):
    if name == "identity":
        return identity_channel(2)
    return cj_from_unitary(_unitary(name, None))


def _build(args) -> process.ProcessMatrix:
    name = args.name.replace("-", "_")
    if name in ("nonseparable", "ocb"):
        return process.nonseparable()
    if name == "state":
        return process.state(_density(args.rho or "singlet", STATES_2Q, 4))
    if name == "channel_b_to_a":
        return process.channel_b_to_a(_load_optional_channel(args.channel),
                                      _density(args.rho or "zero", STATES_1Q, 2))
    if name == "channel_a_to_b":
        return process.channel_a_to_b(_load_optional_channel(args.channel),
                                      _density(args.rho or "zero", STATES_1Q, 2))
    if name == "mixture":
        if args.q is None or not args.w1 or not args.w2:
            raise UsageError("mixture needs --q, --w1 and --w2")
        return process.mixture(args.q, io.read_process(args.w1), io.read_process(args.w2))
    if name == "ctc":
        return process.ctc(_density(args.sigma or "mixed", STATES_1Q, 2), _unitary(args.u, args.seed))
    if name == "channel_with_memory":
        if not args.tripartite:
            raise UsageError("channel-with-memory needs --tripartite FILE")
        data = json.loads(Path(args.tripartite).read_text())
        dims = data["dims"]
        m = io.matrix_from_json(data["matrix"])
        return process.channel_with_memory(m, int(dims["A1"]), int(dims["B1"]), int(dims["B2"]),
                                           int(dims.get("A2", 2)))
    raise UsageError(f"unknown builtin {args.name!r}; choose from "
                     + ", ".join(n.replace("_", "-") for n in process.BUILTIN_NAMES))


def cmd_builtin(args) -> int:
    try:
        pm = _build(args)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad parameters for {args.name}: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, io.FormatError):
            raise
        raise UsageError(str(exc)) from exc
    artifacts = []
    if args.out:
        io.write_process(pm, args.out)
        artifacts.append(str(args.out))
        lines = [f"wrote {args.name} ({pm.systems.dims}) to {args.out}"]
    else:
        lines = [io.dumps(pm)]
    _emit(args, "builtin", "written" if args.out else "printed",
          {"name": args.name, "dims": pm.systems.to_dict(), "trace": pm.trace}, artifacts, lines)
    return EXIT_OK


def cmd_game_run(args) -> int:
    if args.protocol not in PROTOCOLS:
        raise UsageError(f"unknown protocol {args.protocol!r}; choose from basis-switch")
    pm = io.read_process(args.path)
    if pm.systems.dims != (2, 2, 2, 2):
        raise UsageError("the basis-switch protocol needs four qubit systems")
    rec = process.validate(pm, mode="structural")
    res = game.success_probability(pm, game.basis_switch_strategy())
    violates = res.p_succ > 0.75 + 1e-9
    lines = [
        f"p_succ = {res.p_succ:.15f}",
        f"P(x = b | b' = 0) = {res.p_alice_guesses_b:.15f}",
        f"P(y = a | b' = 1) = {res.p_bob_guesses_a:.15f}",
        f"causal bound 3/4: {'violated' if violates else 'respected'}",
    ]
    if not rec:
        lines.append("warning: input is not a valid process matrix")
    metrics = {"p_succ": res.p_succ, "p_x_eq_b_given_bp0": res.p_alice_guesses_b,
               "p_y_eq_a_given_bp1": res.p_bob_guesses_a, "valid_process": rec.valid,
               "causal_bound": 0.75}
    _emit(args, "game run", "violation" if violates else "no-violation", metrics, lines=lines)
    return EXIT_OK if rec else EXIT_NEGATIVE


def cmd_bruteforce(args) -> int:
    try:
        res = game.causal_bruteforce(args.message_dim, backend=args.backend)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    w = res.witness
    lines = [
        f"max p_succ over causal deterministic strategies (message dim {args.message_dim}): {res.max_p_succ}",
        f"  Alice first: {res.by_order['A_first']}, Bob first: {res.by_order['B_first']}",
        f"  strategies enumerated: {res.n_strategies} ({res.backend} kernel)",
        f"witness: order={w.order}",
        f"  encoding: {w.encoding}",
        f"  receiver guess: {w.receiver_guess}",
        f"  sender guess: {w.sender_guess}",
    ]
    metrics = {
        "max_p_succ": str(res.max_p_succ),
        "max_p_succ_float": float(res.max_p_succ),
        "by_order": {k: str(v) for k, v in res.by_order.items()},
        "n_strategies": res.n_strategies,
        "backend": res.backend,
        "witness": {
            "order": w.order,
            "encoding": {str(k): v for k, v in w.encoding.items()},
            "receiver_guess": {str(k): v for k, v in w.receiver_guess.items()},
            "sender_guess": {str(k): v for k, v in w.sender_guess.items()},
        },
    }
    _emit(args, "game brute-force", str(res.max_p_succ), metrics, lines=lines)
    return EXIT_OK


def cmd_decompose(args) -> int:
    pm = io.read_process(args.path)
    try:
        cp = classical.ClassicalProcess.from_process(pm)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not process.validate(pm, mode="structural"):
        _emit(args, "decompose-classical", "invalid", {}, lines=["verdict: invalid process matrix"])
        return EXIT_NEGATIVE
    dec = classical.decompose(cp, check=False)
    prefix = args.out_prefix
    p1 = f"{prefix}b_not_before_a.json"
    p2 = f"{prefix}a_not_before_b.json"
    io.write_process(dec.w_b_not_before_a, p1)
    io.write_process(dec.w_a_not_before_b, p2)
    lines = [
        f"q = {dec.q:.15g}",
        f"m = {dec.m:.15g}",
        f"recombination residual (max norm) = {dec.residual:.3g}",
        f"wrote {p1} (no signalling B->A) and {p2} (no signalling A->B)",
    ]
    metrics = {"q": dec.q, "m": dec.m, "recombination_residual": dec.residual,
               "shifts": dec.shift}
    _emit(args, "decompose-classical", "separable", metrics, [p1, p2], lines)
    return EXIT_OK


# parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="procmat", description="Bipartite process matrix toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    v = sub.add_parser("validate", help="check positivity and normalization of a process file")
    v.add_argument("path")
    v.add_argument("--mode", choices=("structural", "probe", "both"), default="both")
    v.add_argument("--tol", type=float, default=process.PROB_ATOL)
    v.add_argument("--probes", type=int, default=process.N_PROBES)
    v.add_argument("--seed", type=int, default=0)
    common(v)
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("classify", help="Hilbert-Schmidt term table and structural verdict")
    c.add_argument("path")
    common(c)
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("builtin", help="write a named process matrix")
    b.add_argument("name")
    b.add_argument("--out")
    b.add_argument("--rho", help="state: singlet|phi-plus|zero|mixed; channels: zero|one|plus|minus|mixed")
    b.add_argument("--channel", default="identity", help="identity|x|z|hadamard")
    b.add_argument("--q", type=float)
    b.add_argument("--w1")
    b.add_argument("--w2")
    b.add_argument("--sigma", help="ctc: state of the chronology-respecting qubit")
    b.add_argument("--u", default="hadamard", help="ctc: identity|x|z|hadamard|random")
    b.add_argument("--tripartite", help="channel-with-memory: JSON file with dims A1,B1,B2 and matrix")
    b.add_argument("--seed", type=int, default=0)
    common(b)
    b.set_defaults(func=cmd_builtin)

    g = sub.add_parser("game", help="causal game")
    gsub = g.add_subparsers(dest="game_command", required=True)
    gr = gsub.add_parser("run", help="success probability of a protocol on a process")
    gr.add_argument("path")
    gr.add_argument("--protocol", default="basis-switch",
                    help="basis-switch: Bob's measurement basis decides who signals")
    common(gr)
    gr.set_defaults(func=cmd_game_run)
    gb = gsub.add_parser("brute-force", help="exact best causal classical strategy")
    gb.add_argument("--message-dim", type=int, default=2)
    gb.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    common(gb)
    gb.set_defaults(func=cmd_bruteforce)

    d = sub.add_parser("decompose-classical", help="causal decomposition of a diagonal process")
    d.add_argument("path")
    d.add_argument("--out-prefix", default="")
    common(d)
    d.set_defaults(func=cmd_decompose)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, io.FormatError, DimensionError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
