"""Command-line interface: scenario files in, deterministic JSON/CSV out.

Five analysis commands (analyze-gate, trajectory, map, divisibility, qft)
each run one batch analysis and print a JSON report to stdout; ``--out``
also writes it to a file, and the commands that produce a time series or
audit table (trajectory, qft) write a CSV next to it with the extension
swapped to .csv. Numbers are serialized with 15 significant digits so that
reruns of the same scenario and seed are byte-identical.

Exit codes: 0 success, 2 input/scenario error, 3 internal invariant
violation. The UDMLAB_TOL_OVERRIDE environment variable may hold a JSON
object of tolerance overrides; it is applied last and echoed in the
report whenever set.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

import numpy as np

from . import circuits, dynamics, gates, linalg, maps, states
from .tolerances import DEFAULT, Tolerances

ENV_TOL_OVERRIDE = "UDMLAB_TOL_OVERRIDE"

_TOL_FIELDS = {f.name for f in dataclass_fields(Tolerances)}


# ---------------------------------------------------------------------------
# serialization


def _sig15(x: float) -> float:
    # round-trip through 15 significant digits for stable golden output
    return float(f"{float(x):.15g}")


def _cnum(z) -> list[float]:
    z = complex(z)
    return [_sig15(z.real), _sig15(z.imag)]


def _cmatrix(m) -> list:
    return [[_cnum(z) for z in row] for row in np.asarray(m)]


def _cvector(v) -> list:
    return [_cnum(z) for z in np.asarray(v).reshape(-1)]


def _reals(v) -> list[float]:
    return [_sig15(x) for x in np.asarray(v, dtype=float).reshape(-1)]


def _fmt_csv(x: float) -> str:
    return f"{float(x):.15g}"


# ---------------------------------------------------------------------------
# scenario parsing


def _parse_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(x, (int, float)) for x in value)
    ):
        return complex(value[0], value[1])
    raise ValueError(f"expected a number or [re, im] pair, got {value!r}")


def _parse_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ValueError("matrix must be a non-empty list of rows")
    return np.array([[_parse_complex(v) for v in row] for row in rows], dtype=complex)


def _load_scenario(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("scenario file must contain a JSON object")
    return data


def _resolve_tolerances(scenario: dict, args) -> tuple[Tolerances, dict | None]:
    tol = DEFAULT
    overrides = scenario.get("tolerances", {})
    if overrides:
        _check_tol_keys(overrides, "scenario tolerances")
        tol = tol.override(**{k: float(v) for k, v in overrides.items()})
    if getattr(args, "tol_cp", None) is not None:
        tol = tol.override(cp=args.tol_cp)
    env_raw = os.environ.get(ENV_TOL_OVERRIDE)
    env_echo = None
    if env_raw:
        try:
            env_echo = json.loads(env_raw)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{ENV_TOL_OVERRIDE} is not valid JSON: {exc}") from exc
        if not isinstance(env_echo, dict):
            raise ValueError(f"{ENV_TOL_OVERRIDE} must hold a JSON object")
        _check_tol_keys(env_echo, ENV_TOL_OVERRIDE)
        tol = tol.override(**{k: float(v) for k, v in env_echo.items()})
    return tol, env_echo


def _check_tol_keys(mapping: dict, where: str):
    unknown = set(mapping) - _TOL_FIELDS
    if unknown:
        raise ValueError(
            f"{where}: unknown tolerance name(s) {sorted(unknown)}; "
            f"expected among {sorted(_TOL_FIELDS)}"
        )


def _resolve_seed(scenario: dict, args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    seed = scenario.get("seed", 0)
    if not isinstance(seed, int):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    return seed


_NAMED_GATES = ("cphase", "local-phase", "swap", "identity", "x", "hadamard")


def _gate_from_scenario(scenario: dict) -> gates.Gate:
    if "gate" in scenario and "generator" in scenario:
        raise ValueError("scenario must give either 'gate' or 'generator', not both")
    if "gate" in scenario:
        spec = scenario["gate"]
        if not isinstance(spec, dict) or "name" not in spec:
            raise ValueError("'gate' must be an object with a 'name'")
        name = spec["name"]
        duration = float(spec.get("duration", 1.0))
        if name == "cphase":
            return gates.c_phase(_require_phi(spec), duration)
        if name == "local-phase":
            return gates.local_phase(_require_phi(spec), duration)
        if name == "swap":
            return gates.swap_gate(duration)
        if name == "identity":
            return gates.identity_gate(int(spec.get("n_qubits", 2)), duration)
        if name == "x":
            return gates.x_gate(duration)
        if name == "hadamard":
            return gates.hadamard(duration)
        raise ValueError(f"unknown gate name {name!r}; expected one of {_NAMED_GATES}")
    if "generator" in scenario:
        spec = scenario["generator"]
        if not isinstance(spec, dict) or "matrix" not in spec:
            raise ValueError("'generator' must be an object with a 'matrix'")
        k = _parse_matrix(spec["matrix"])
        return gates.gate_from_generator(k, float(spec.get("duration", 1.0)))
    raise ValueError("scenario must specify a 'gate' or a 'generator'")


def _require_phi(spec: dict) -> float:
    if "phi" not in spec:
        raise ValueError(f"gate {spec['name']!r} requires a 'phi' value (radians)")
    return float(spec["phi"])


def _input_from_scenario(scenario: dict, n_qubits: int | None = None) -> states.PureState:
    if "input" not in scenario:
        raise ValueError("scenario must specify an 'input' state")
    spec = scenario["input"]
    if isinstance(spec, list) and all(isinstance(s, str) for s in spec):
        psi = states.product_state(spec)
    elif isinstance(spec, dict) and "amplitudes" in spec:
        psi = states.PureState([_parse_complex(v) for v in spec["amplitudes"]])
    else:
        raise ValueError(
            "'input' must be a list of per-qubit state names "
            f"({sorted(states.NAMED_AMPLITUDES)}) or an object with 'amplitudes'"
        )
    if n_qubits is not None and psi.n_qubits != n_qubits:
        raise ValueError(f"input has {psi.n_qubits} qubits, expected {n_qubits}")
    return psi


def _grid_from_scenario(scenario: dict, args, duration: float) -> dynamics.TimeGrid:
    spec = scenario.get("grid", {})
    if not isinstance(spec, dict):
        raise ValueError("'grid' must be an object")
    t_start = float(spec.get("t_start", 0.0))
    t_end = float(spec.get("t_end", t_start + duration))
    steps = spec.get("steps", dynamics.DEFAULT_STEPS)
    if getattr(args, "steps", None) is not None:
        steps = args.steps
    return dynamics.TimeGrid(t_start, t_end, int(steps))


def _two_qubit_gate(scenario: dict) -> gates.Gate:
    g = _gate_from_scenario(scenario)
    if g.n_qubits != 2:
        raise ValueError("this command needs a 2-qubit gate or a 4x4 generator")
    return g


def _product_input(scenario: dict, tol: Tolerances) -> states.PureState:
    psi = _input_from_scenario(scenario, n_qubits=2)
    tau = states.pure_entanglement(psi)
    if tau > tol.separability:
        raise ValueError(
            f"input state is entangled (determinant diagnostic {tau:.3g}): a "
            "state-independent map exists only when the composite starts in a "
            "product state rho_1 (x) rho_2 with a fixed environment state"
        )
    return psi


def _envelope(command: str, seed: int, tol: Tolerances, env_echo: dict | None) -> dict:
    report = {
        "command": command,
        "seed": seed,
        "tolerances": {k: _sig15(v) for k, v in tol.as_dict().items()},
    }
    if env_echo is not None:
        report["env_tol_override"] = env_echo
    return report


# ---------------------------------------------------------------------------
# commands


def _cmd_analyze_gate(args) -> tuple[dict, str | None]:
    scenario = _load_scenario(args.scenario)
    tol, env_echo = _resolve_tolerances(scenario, args)
    gate = _two_qubit_gate(scenario)
    schmidt = gates.operator_schmidt_values(gate.unitary)
    entangling, rank = gates.is_entangling(gate, tol=tol.separability)
    report = _envelope("analyze-gate", _resolve_seed(scenario, args), tol, env_echo)
    report.update(
        {
            "n_qubits": gate.n_qubits,
            "duration": _sig15(gate.duration),
            "unitary": _cmatrix(gate.unitary),
            "operator_schmidt_values": _reals(schmidt),
            "operator_schmidt_rank": rank,
            "entangling": entangling,
            "generator_principal_log": _cmatrix(
                gates.generator_from_unitary(gate.unitary, gate.duration)
            ),
        }
    )
    return report, None


def _cmd_trajectory(args) -> tuple[dict, str | None]:
    scenario = _load_scenario(args.scenario)
    tol, env_echo = _resolve_tolerances(scenario, args)
    gate = _two_qubit_gate(scenario)
    psi = _input_from_scenario(scenario, n_qubits=2)
    grid = _grid_from_scenario(scenario, args, gate.duration)
    traj = dynamics.evolve_trajectory(gate.generator, states.densify(psi), grid)
    profile = dynamics.entanglement_profile(traj)
    hit = dynamics.find_entangled_instant(traj, tol=tol.entanglement)

    lines = ["t,negativity,tau,purity"]
    for p in profile:
        tau = "" if p.tau is None else _fmt_csv(p.tau)
        lines.append(
            f"{_fmt_csv(p.t)},{_fmt_csv(p.negativity)},{tau},{_fmt_csv(p.purity)}"
        )
    csv_text = "\n".join(lines) + "\n"

    report = _envelope("trajectory", _resolve_seed(scenario, args), tol, env_echo)
    report.update(
        {
            "grid": {
                "t_start": _sig15(grid.t_start),
                "t_end": _sig15(grid.t_end),
                "steps": grid.steps,
                "epsilon": _sig15(grid.epsilon),
            },
            "t1": None if hit is None else _sig15(hit[0]),
            "t1_negativity": None if hit is None else _sig15(hit[1]),
            "max_negativity": _sig15(max(p.negativity for p in profile)),
            "endpoint_purity": _sig15(profile[-1].purity),
        }
    )
    return report, csv_text


def _map_report(m: maps.DynamicalMap, tol: Tolerances, rng) -> dict:
    c = maps.choi(m)
    cp, tp, min_eig = maps.is_cptp(m, tol=tol.cp)
    kraus = maps.kraus_decompose(c)
    residual = 0.0
    for _ in range(20):
        rho = _random_density(rng)
        direct = maps.apply_map(m, rho).matrix
        rebuilt = sum(op @ rho.matrix @ op.conj().T for op in kraus.operators)
        residual = max(residual, float(np.max(np.abs(rebuilt - direct))))
    completeness = sum(op.conj().T @ op for op in kraus.operators)
    return {
        "which_qubit": m.which_qubit,
        "interval": [_sig15(m.interval[0]), _sig15(m.interval[1])],
        "environment_state": _cmatrix(m.environment_state.matrix),
        "superoperator": _cmatrix(m.superoperator),
        "choi_eigenvalues": _reals(c.eigenvalues),
        "cp": cp,
        "tp": tp,
        "min_choi_eigenvalue": _sig15(min_eig),
        "kraus_count": len(kraus.operators),
        "kraus_reconstruction_residual": _sig15(residual),
        "kraus_completeness_residual": _sig15(
            float(np.max(np.abs(completeness - np.eye(2))))
        ),
    }


def _random_density(rng) -> states.DensityMatrix:
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    m = a @ a.conj().T
    return states.DensityMatrix(m / float(np.trace(m).real))


def _cmd_map(args) -> tuple[dict, str | None]:
    scenario = _load_scenario(args.scenario)
    tol, env_echo = _resolve_tolerances(scenario, args)
    seed = _resolve_seed(scenario, args)
    gate = _two_qubit_gate(scenario)
    psi = _product_input(scenario, tol)
    grid = _grid_from_scenario(scenario, args, gate.duration)
    t = grid.t_end - grid.t_start
    rho = states.densify(psi)
    marg1 = states.DensityMatrix(linalg.partial_trace(rho.matrix, keep=1))
    marg2 = states.DensityMatrix(linalg.partial_trace(rho.matrix, keep=2))
    which = int(scenario.get("which_qubit", 1))

    report = _envelope("map", seed, tol, env_echo)
    report["evolution_time"] = _sig15(t)
    if args.both_qubits:
        e1, e2 = maps.local_pair_maps(gate.generator, marg1, marg2, t)
        rng = np.random.default_rng(seed)
        report["map_qubit1"] = _map_report(e1, tol, rng)
        report["map_qubit2"] = _map_report(e2, tol, rng)
        report["superoperator_distance"] = _sig15(
            float(np.linalg.norm(e1.superoperator - e2.superoperator))
        )
    else:
        env = marg2 if which == 1 else marg1
        m = maps.induced_map(gate.generator, env, t, which=which)
        report["map"] = _map_report(m, tol, np.random.default_rng(seed))
    return report, None


def _cmd_divisibility(args) -> tuple[dict, str | None]:
    scenario = _load_scenario(args.scenario)
    tol, env_echo = _resolve_tolerances(scenario, args)
    gate = _two_qubit_gate(scenario)
    psi = _product_input(scenario, tol)
    grid = _grid_from_scenario(scenario, args, gate.duration)
    if "t1" not in scenario:
        raise ValueError("divisibility needs a 't1' intermediate time in the scenario")
    t1 = float(scenario["t1"])
    if not grid.t_start < t1 < grid.t_end:
        raise ValueError(
            f"t1={t1} must lie strictly inside ({grid.t_start}, {grid.t_end}); "
            "the sub-interval must be non-empty"
        )
    rho = states.densify(psi)
    marg1 = states.DensityMatrix(linalg.partial_trace(rho.matrix, keep=1))
    marg2 = states.DensityMatrix(linalg.partial_trace(rho.matrix, keep=2))
    which = int(scenario.get("which_qubit", 1))
    env = marg2 if which == 1 else marg1

    k = gate.generator
    e_short = maps.induced_map(k, env, t1 - grid.t_start, which=which)
    e_long = maps.induced_map(k, env, grid.t_end - grid.t_start, which=which)
    inter = maps.intermediate_map(e_short, e_long, cutoff=tol.pinv_cutoff, cp_tol=tol.cp)
    witness = maps.udm_witness_subinterval(
        k, rho, t1 - grid.t_start, grid.t_end - grid.t_start
    )

    if inter.indeterminate:
        verdict = "indeterminate"
    elif (not inter.cp) or witness.trace_distance > tol.entanglement:
        verdict = "non-markovian"
    else:
        verdict = "markovian"

    report = _envelope("divisibility", _resolve_seed(scenario, args), tol, env_echo)
    report.update(
        {
            "t1": _sig15(t1),
            "t_star": _sig15(grid.t_end),
            "which_qubit": which,
            "intermediate_map": {
                "cp": inter.cp,
                "min_choi_eigenvalue": _sig15(inter.min_choi_eigenvalue),
                "short_map_rank": inter.short_map_rank,
                "verdict": inter.verdict,
                "superoperator": _cmatrix(inter.candidate.superoperator),
            },
            "witness": {
                "trace_distance": _sig15(witness.trace_distance),
                "correlation_at_t1": _sig15(witness.correlation_at_t1),
            },
            "verdict": verdict,
        }
    )
    return report, None


def _cmd_qft(args) -> tuple[dict, str | None]:
    scenario = _load_scenario(args.scenario)
    tol, env_echo = _resolve_tolerances(scenario, args)
    n = args.n if args.n is not None else scenario.get("n_qubits")
    if n is None:
        raise ValueError("qft needs --n or an 'n_qubits' scenario entry")
    circuit = circuits.build_qft(int(n))
    if "input" in scenario:
        psi = _input_from_scenario(scenario, n_qubits=circuit.n_qubits)
    else:
        psi = states.product_state(["0"] * circuit.n_qubits)
    out, audit = circuits.run_circuit(circuit, psi, tol=tol.separability)
    residual = float(
        np.linalg.norm(circuits.circuit_unitary(circuit) - circuits.dft_matrix(circuit.n_qubits))
    )

    audit_rows = [
        {
            "position": r.position,
            "name": r.name,
            "qubits": list(r.qubits),
            "negativity_in": _sig15(r.negativity_in),
            "negativity_out": _sig15(r.negativity_out),
            "separable_in": r.separable_in,
            "separable_out": r.separable_out,
        }
        for r in audit.records
    ]
    lines = ["position,name,qubits,negativity_in,negativity_out,separable_in,separable_out"]
    for r in audit.records:
        lines.append(
            f"{r.position},{r.name},{r.qubits[0]};{r.qubits[1]},"
            f"{_fmt_csv(r.negativity_in)},{_fmt_csv(r.negativity_out)},"
            f"{str(r.separable_in).lower()},{str(r.separable_out).lower()}"
        )
    csv_text = "\n".join(lines) + "\n"

    circuit_dict = circuits.circuit_to_dict(circuit)
    for g in circuit_dict["gates"]:
        if "phi" in g:
            g["phi"] = _sig15(g["phi"])

    report = _envelope("qft", _resolve_seed(scenario, args), tol, env_echo)
    report.update(
        {
            "n_qubits": circuit.n_qubits,
            "gate_count": len(circuit.gates),
            "circuit": circuit_dict,
            "dft_residual": _sig15(residual),
            "output_amplitudes": _cvector(out.amplitudes),
            "audit": audit_rows,
            "all_separable": audit.all_separable(),
        }
    )
    return report, csv_text


_COMMANDS = {
    "analyze-gate": _cmd_analyze_gate,
    "trajectory": _cmd_trajectory,
    "map": _cmd_map,
    "divisibility": _cmd_divisibility,
    "qft": _cmd_qft,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udmlab",
        description="Gate dynamics, reduced dynamical maps and QFT audits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("analyze-gate", "operator Schmidt analysis and entangling verdict of a 2-qubit gate"),
        ("trajectory", "joint-state evolution over a time grid with entanglement profile"),
        ("map", "tomographic reduced dynamical map with Choi/Kraus/CPTP report"),
        ("divisibility", "intermediate-map CP check and sub-interval witness"),
        ("qft", "build and audit a QFT circuit"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--scenario", help="path to a JSON scenario file")
        p.add_argument("--out", help="write the JSON report here (CSV beside it when produced)")
        p.add_argument("--tol-cp", type=float, default=None, help="override the CP tolerance")
        p.add_argument("--steps", type=int, default=None, help="override the grid step count")
        p.add_argument("--both-qubits", action="store_true",
                       help="map: report the maps of both qubits")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized sweeps")
        if name == "qft":
            p.add_argument("--n", type=int, default=None, help="number of qubits (2..8)")
    return parser


def _emit(report: dict, csv_text: str | None, out: str | None):
    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    if out:
        path = Path(out)
        path.write_text(text, encoding="utf-8")
        if csv_text is not None:
            path.with_suffix(".csv").write_text(csv_text, encoding="utf-8")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        report, csv_text = _COMMANDS[args.command](args)
        _emit(report, csv_text, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - invariant violations exit 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
