"""Command-line front end: run simulations, norm evaluations and verification sweeps from manifests.

Exit codes: 0 success / all checks passed, 1 usage or invalid manifest,
2 blow-up (or divergent Picard iteration), 3 a verification check failed.

Outputs go to ``--out`` (or the manifest's ``out``) under fixed names:
``report.json``, ``series.csv`` and ``fields/``.  Every output records the
SHA-256 of the canonical manifest and the seed; identical manifest and seed
give byte-identical files.
"""
import argparse
import hashlib
import json
import os
import re
import sys

import jsonschema
import numpy as np

from . import harness
from .errors import BlowUpError, DKGError
from .grid import GridSpec, ScalarField, SpaceTimeField, dft_forward, load_field, save_field
from .norms import NormSpec, fourier_lebesgue_norm, xsb_norm
from .report import _clean, norm_record
from .solver import (
    PhysicsParams,
    SolverConfig,
    evolve,
    make_data,
    picard_iterate,
    reassemble,
    series_csv,
    split_data,
    time_series,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_BLOWUP, EXIT_FAILED = 0, 1, 2, 3
COMMANDS = ("simulate", "verify", "norms", "region", "scaling")
CHECKS = ("angle14", "angle15", "angle16", "nullform13", "bilinear11", "bilinear12", "product", "cone", "transfer")

_num = {"type": "number"}
_int = {"type": "integer"}
_pos_int = {"type": "integer", "minimum": 1}
_norm_item = {
    "type": "object",
    "properties": {"label": {"type": "string"}, "field": {"enum": ["psi", "phi", "dtphi"]}, "s": _num,
                   "r": _num},
    "required": ["field", "s", "r"],
    "additionalProperties": False,
}
_grid = {
    "type": "object",
    "properties": {"n_x": _int, "period_L": _num, "n_t": _int, "window_T": _num},
    "required": ["n_x"],
    "additionalProperties": False,
}
_data = {
    "type": "object",
    "properties": {"family": {"enum": ["zero", "gaussian", "single_mode", "random_spectrum"]},
                   "amplitude": _num, "width": _num, "center": {"type": "array", "items": _num},
                   "mode": {"type": "array", "items": _int}, "decay": _num},
    "additionalProperties": False,
}
_sampling = {
    "type": "object",
    "properties": {"count": _int, "magnitude": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                   "chunk": _pos_int},
    "additionalProperties": False,
}

PARAMETER_SCHEMAS = {
    "simulate": {
        "type": "object",
        "properties": {
            "grid": _grid,
            "physics": {"type": "object", "properties": {"M": _num, "m": _num, "coupling": _num},
                        "additionalProperties": False},
            "solver": {"type": "object",
                       "properties": {"dt": _num, "steps": _int, "mode": {"enum": ["exponential_step", "picard"]},
                                      "dealias": {"type": "boolean"}, "save_every": _pos_int,
                                      "picard_iters": _pos_int, "tol": _num, "T_local": _num, "n_t": _pos_int},
                       "additionalProperties": False},
            "data": _data,
            "norms": {"type": "array", "items": _norm_item},
            "save_fields": {"type": "boolean"},
            "trajectory_stride": _pos_int,
        },
        "required": ["grid"],
        "additionalProperties": False,
    },
    "verify": {
        "type": "object",
        "properties": {
            "check": {"enum": list(CHECKS)},
            "sampling": _sampling,
            "grid": _grid,
            "s": _num, "l": _num, "r": _num, "b": _num,
            "resolutions": {"type": "array", "items": _pos_int, "minItems": 1},
            "phases": {"enum": ["gaussian", "coherent"]},
            "precision": {"enum": ["double", "single"]},
            "denominator": {"enum": ["xi", "eta"]},
            "which": {"enum": ["prop_2_3", "prop_1_4", "reductions_1_to_6"]},
            "alphas": {"type": "array", "items": _num},
            "betas": {"type": "array", "items": _num},
            "validate_only": {"type": "boolean"},
            "branch": {"enum": ["difference", "sum"]},
            "exponents": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
            "region": {"enum": ["all", "inner", "outer"]},
            "tolerance": _num,
            "signs": {"type": "array", "items": {"enum": [1, -1]}, "minItems": 2, "maxItems": 2},
            "p": _num, "q": _num, "s1": _num, "s2": _num,
            "modes": {"type": "array", "items": {"type": "array", "items": _int, "minItems": 2, "maxItems": 2},
                      "minItems": 2, "maxItems": 2},
            "compare_samples": {"type": "integer", "minimum": 0},
        },
        "required": ["check"],
        "additionalProperties": False,
    },
    "norms": {
        "type": "object",
        "properties": {
            "grid": _grid,
            "data": _data,
            "field_file": {"type": "string"},
            "norms": {"type": "array", "minItems": 1, "items": {
                "type": "object",
                "properties": {"label": {"type": "string"}, "field": {"enum": ["psi", "phi", "dtphi", "file"]},
                               "s": _num, "r": _num, "b": _num,
                               "branch": {"enum": ["none", "plus", "minus", "wave"]},
                               "homogeneous": {"type": "boolean"}},
                "required": ["field", "s", "r"],
                "additionalProperties": False}},
        },
        "required": ["norms"],
        "additionalProperties": False,
    },
    "region": {
        "type": "object",
        "properties": {"r": {"type": ["number", "string"]}, "delta": {"type": ["number", "string"]},
                       "variant": {"enum": ["minimal_s", "minimal_l"]}},
        "required": ["r", "delta", "variant"],
        "additionalProperties": False,
    },
    "scaling": {
        "type": "object",
        "properties": {"s": _num, "r": _num, "field_kind": {"enum": ["spinor", "kg_field"]},
                       "lambdas": {"type": "array", "items": _num, "minItems": 1}, "tolerance": _num,
                       "n_x": _int},
        "required": ["s", "r"],
        "additionalProperties": False,
    },
}

MANIFEST_SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "command": {"enum": list(COMMANDS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "out": {"type": "string"},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "override_hypotheses": {"type": "boolean"},
        "parameters": {"type": "object"},
    },
    "required": ["schema", "command", "parameters"],
    "additionalProperties": False,
}


class ManifestError(DKGError):
    """Invalid manifest; the message carries ``path:line:`` when known."""


# -- manifest handling -----------------------------------------------------------

def _key_line(text, path):
    """Line number of the deepest key of ``path`` found in the JSON text (1-based)."""
    keys = [p for p in path if isinstance(p, str)]
    pos = 0
    line = 1
    for key in keys:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if not m:
            break
        pos = m.end()
        line = text.count("\n", 0, m.start()) + 1
    return line


def load_manifest(path):
    """Parse and validate a manifest; returns (manifest dict, canonical sha256 hex)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read manifest ({exc.strerror})") from exc
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(MANIFEST_SCHEMA).iter_errors(manifest))
    if err is not None:
        raise ManifestError(f"{path}:{_key_line(text, list(err.absolute_path))}: {_describe(err)}")
    cmd = manifest["command"]
    validator = jsonschema.Draft202012Validator(PARAMETER_SCHEMAS[cmd])
    err = jsonschema.exceptions.best_match(validator.iter_errors(manifest["parameters"]))
    if err is not None:
        where = ["parameters"] + list(err.absolute_path)
        raise ManifestError(f"{path}:{_key_line(text, where)}: {_describe(err, 'parameters')}")
    return manifest, manifest_hash(manifest)


def _describe(err, prefix=None):
    loc = ".".join(str(p) for p in ([prefix] if prefix else []) + list(err.absolute_path))
    return f"{loc or '<root>'}: {err.message}"


def manifest_hash(manifest):
    canon = json.dumps(manifest, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class Run:
    """Resolved run context: manifest, effective seed/epsilon, output directory."""

    def __init__(self, manifest, digest, seed=None, out=None, epsilon=None, override=None):
        self.manifest = manifest
        self.digest = digest
        self.params = manifest["parameters"]
        self.seed = int(seed if seed is not None else manifest.get("seed", 0))
        self.epsilon = float(epsilon if epsilon is not None else manifest.get("epsilon", 0.01))
        self.override = bool(override or manifest.get("override_hypotheses", False))
        self.out = out or manifest.get("out") or "dkglab_out"

    def meta(self):
        return {"manifest_sha256": self.digest, "seed": self.seed, "command": self.manifest["command"],
                "schema": SCHEMA_VERSION}

    def write_report(self, payload):
        os.makedirs(self.out, exist_ok=True)
        doc = {"meta": self.meta(), **_clean(payload)}
        with open(os.path.join(self.out, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def write_csv(self, text):
        if not text:
            return
        os.makedirs(self.out, exist_ok=True)
        head = f"# manifest_sha256={self.digest} seed={self.seed}\n"
        with open(os.path.join(self.out, "series.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(head + text)

    def write_fields(self, fields):
        d = os.path.join(self.out, "fields")
        os.makedirs(d, exist_ok=True)
        index = {"meta": self.meta(), "files": {}}
        for name, f in fields.items():
            path = os.path.join(d, f"{name}.dkgf")
            save_field(path, f)
            with open(path, "rb") as fh:
                index["files"][f"{name}.dkgf"] = hashlib.sha256(fh.read()).hexdigest()
        with open(os.path.join(d, "index.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(index, indent=2, sort_keys=True) + "\n")


# -- commands ------------------------------------------------------------------------

def _grid(p, default_n=64):
    g = p.get("grid", {"n_x": default_n})
    return GridSpec(g["n_x"], g.get("period_L", 2 * np.pi), g.get("n_t", 1), g.get("window_T", 2 * np.pi))


def _norm_specs(items):
    out = []
    for it in items:
        label = it.get("label") or f"{it['field']}_s{it['s']}_r{it['r']}"
        out.append((label, it["field"], NormSpec(it["s"], it["r"])))
    return out


def cmd_simulate(run):
    p = run.params
    grid = _grid(p).spatial()
    phys = PhysicsParams(**p.get("physics", {}))
    solver = dict(p.get("solver", {}))
    T_local = solver.pop("T_local", None)
    n_t = solver.pop("n_t", 64)
    cfg = SolverConfig(**solver)
    rng = np.random.default_rng(run.seed)
    psi0, phi0, phi1 = make_data(grid, p.get("data", {"family": "gaussian"}), rng)
    state = split_data(psi0, phi0, phi1)
    norms = _norm_specs(p.get("norms", [{"label": "psi_L2", "field": "psi", "s": 0.0, "r": 2.0},
                                        {"label": "phi_H1", "field": "phi", "s": 1.0, "r": 2.0}]))
    summary = {"parameters": p, "grid": grid.as_dict()}
    try:
        if cfg.mode == "picard":
            T = T_local if T_local is not None else cfg.dt * cfg.steps
            res = picard_iterate(state, phys, T, iters=cfg.picard_iters, tol=cfg.tol, n_t=n_t,
                                 dealias=cfg.dealias)
            keep = [k for k, t in enumerate(res.times) if -1e-12 <= t <= T + 1e-12]
            states = [res.state_at(res.times[k]) for k in keep]
            summary["picard"] = {"converged": res.converged, "diverged": res.diverged,
                                 "differences": res.differences, "ratios": res.ratios}
            if res.diverged:
                raise BlowUpError(T)
        else:
            states = []
            traj = evolve(state, phys, cfg, keep_states=False, monitor=states.append)
    except BlowUpError as exc:
        summary["status"] = "blow-up"
        summary["blowup_time"] = exc.time
        run.write_report(summary)
        print(f"blow-up detected at t={exc.time:.6g}", file=sys.stderr)
        return EXIT_BLOWUP
    rows = time_series(states, norms)
    q = np.array([r["charge"] for r in rows])
    summary.update({"status": "completed", "final_time": rows[-1]["t"], "samples": len(rows),
                    "charge_initial": float(q[0]), "charge_final": float(q[-1]),
                    "charge_drift": float(np.max(np.abs(q - q[0])))})
    run.write_report(summary)
    run.write_csv(series_csv(rows))
    if p.get("save_fields", True):
        run.write_fields(trajectory_fields(states, p.get("trajectory_stride")))
    return EXIT_OK


def trajectory_fields(states, stride=None):
    """Physical snapshots of (psi, phi, d_t phi) as space-time containers.

    The time axis holds every ``stride``-th state (default: at most 65
    snapshots); the container's window is the snapshot spacing times the count.
    """
    stride = stride or max(1, -(-(len(states) - 1) // 64))
    picked = states[::stride]
    snaps = [reassemble(st) for st in picked]
    g0 = picked[0].grid
    K = len(picked)
    spacing = picked[1].time - picked[0].time if K > 1 else 1.0
    g = GridSpec(g0.n_x, g0.period_L, K, spacing * K)
    psi = np.stack([sn[0].values for sn in snaps], axis=1)
    out = {"psi": SpaceTimeField(g, psi, False)}
    for j, name in ((1, "phi"), (2, "dtphi")):
        out[name] = SpaceTimeField(g, np.stack([sn[j].values for sn in snaps]), False)
    return out


def _sample_cfg(run, default_count):
    s = run.params.get("sampling", {})
    return harness.SampleConfig(count=s.get("count", default_count), magnitude=tuple(s.get("magnitude", (0.1, 10.0))),
                                seed=run.seed, chunk=s.get("chunk", 250_000))


def _verify(run):
    p = run.params
    check = p["check"]
    eps = run.epsilon
    if check in ("angle14", "angle15"):
        which = "hyperbolic" if check == "angle14" else "elliptic"
        return harness.verify_angle_equivalences(_sample_cfg(run, 100_000), which=which)
    if check == "angle16":
        return harness.verify_angle_bound_16(_sample_cfg(run, 100_000), p.get("denominator", "eta"))
    if check == "nullform13":
        g = _grid(p, 16)
        grid = g if g.n_t > 1 else g.with_time(16, 2 * np.pi)
        return harness.verify_nullform_13(_sample_cfg(run, 3), grid)
    if check in ("bilinear11", "bilinear12"):
        fn = harness.bilinear_constant_11 if check == "bilinear11" else harness.bilinear_constant_12
        return fn(p.get("s", 0.0), p.get("l", 0.26), p.get("r", 2.0), p.get("b", 0.51),
                  grid=_grid(p, 16), cfg=_sample_cfg(run, 200), eps=eps, override=run.override,
                  resolutions=tuple(p.get("resolutions", (16, 32, 64))), phases=p.get("phases", "gaussian"),
                  precision=p.get("precision", "single"))
    if check == "product":
        return harness.product_estimate_check(p.get("alphas", [0.4, 0.4]), p.get("betas", [0.4, 0.4]),
                                              p.get("r", 2.0), p.get("which", "prop_2_3"),
                                              cfg=_sample_cfg(run, 50), eps=eps, override=run.override,
                                              validate_only=p.get("validate_only", False),
                                              resolutions=tuple(p.get("resolutions", (16, 32))))
    if check == "cone":
        branch = p.get("branch", "difference")
        r = p.get("r", 1.01)
        return harness.fit_cone_exponents(branch, r, p.get("exponents"), p.get("region"),
                                          tol=p.get("tolerance", 0.05))
    if check == "transfer":
        g = _grid(p, 16).spatial()
        modes = p.get("modes", [[1, 2], [3, 0]])
        fields = []
        for k in modes:
            v = np.zeros((g.n_x, g.n_x), dtype=np.complex128)
            v[k[0] % g.n_x, k[1] % g.n_x] = 1.0
            fields.append(ScalarField(g, v, True))
        return harness.free_wave_mode(fields[0], fields[1], tuple(p.get("signs", (1, 1))), p.get("p", 2.0),
                                      p.get("q", 2.0), p.get("r", 2.0), p.get("s1", 0.0), p.get("s2", 0.0),
                                      compare_samples=p.get("compare_samples", 0), seed=run.seed)
    raise ManifestError(f"unknown check {check!r}")


def cmd_verify(run):
    report = _verify(run)
    run.write_report({"report": report.as_dict()})
    run.write_csv(report.table_csv())
    status = "passed" if report.passed is not False else "FAILED"
    print(f"{report.operation}: {status}")
    return EXIT_OK if report.passed is not False else EXIT_FAILED


def cmd_norms(run):
    p = run.params
    records = []
    fields = {}
    if "field_file" in p:
        fields["file"] = load_field(p["field_file"])
    if "data" in p or "grid" in p:
        grid = _grid(p).spatial()
        psi, phi, dtphi = make_data(grid, p.get("data", {"family": "gaussian"}), np.random.default_rng(run.seed))
        fields.update({"psi": psi, "phi": phi, "dtphi": dtphi})
    for it in p["norms"]:
        if it["field"] not in fields:
            raise ManifestError(f"norm requests field {it['field']!r} which the manifest does not provide")
        f = fields[it["field"]]
        spec = NormSpec(it["s"], it["r"], it.get("b", 0.0), it.get("branch", "none"), it.get("homogeneous", False))
        ff = f if f.fourier else dft_forward(f)
        val = xsb_norm(ff, spec) if isinstance(ff, SpaceTimeField) else fourier_lebesgue_norm(ff, spec)
        records.append(norm_record(spec, ff.grid, val, label=it.get("label", it["field"])))
    run.write_report({"norms": records})
    for rec in records:
        print(f"{rec['label']}: {rec['value']!r}")
    return EXIT_OK


def _fraction_text(x):
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def cmd_region(run):
    p = run.params
    q = harness.RegionQuery(p["r"], p["delta"], p["variant"])
    s, l = harness.admissible_region(q)
    s0, l0 = harness.threshold_pair(q.r, q.variant)
    delta = harness.region.exact(q.delta)
    payload = {"r": str(harness.region.exact(q.r)), "delta": str(delta), "variant": q.variant,
               "s0": _fraction_text(s0), "l0": _fraction_text(l0), "s": _fraction_text(s), "l": _fraction_text(l),
               "s_float": float(s), "l_float": float(l)}
    line = f"({float(s0):.6g}+δ, {float(l0):.6g}+δ) with δ={float(delta):.6g}: (s, l) = ({float(s):.6g}, {float(l):.6g})"
    if harness.region.exact(q.r) == 2:
        inside = harness.in_l2_region(s, l)
        payload["r2_region_member"] = inside
        line += f"; r=2 region: {'inside' if inside else 'outside'}"
    run.write_report({"region": payload})
    print(line)
    return EXIT_OK


def cmd_scaling(run):
    p = run.params
    kind = p.get("field_kind", "spinor")
    field = harness.modulated_gaussian(GridSpec(p.get("n_x", 64)), kind)
    rep = harness.scaling_check(p["s"], p["r"], kind, field, tuple(p.get("lambdas", (2, 4, 8))),
                                p.get("tolerance", 1e-2))
    run.write_report({"report": rep.as_dict()})
    run.write_csv(rep.table_csv())
    print(f"scaling exponent {rep.constants['exponent']:.6g} (expected {rep.constants['expected']:.6g})")
    return EXIT_OK if rep.passed else EXIT_FAILED


HANDLERS = {"simulate": cmd_simulate, "verify": cmd_verify, "norms": cmd_norms, "region": cmd_region,
            "scaling": cmd_scaling}


# -- argument parsing ----------------------------------------------------------------

def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="JSON run manifest")
    common.add_argument("--seed", type=_u64, help="override the manifest seed")
    common.add_argument("--out", help="output directory (default: manifest 'out' or ./dkglab_out)")
    common.add_argument("--override-hypotheses", action="store_true",
                        help="run checks outside the admissible parameter region (exploratory)")
    common.add_argument("--epsilon", type=_positive, help="value of the '+' offsets (default 0.01)")
    ap = argparse.ArgumentParser(prog="dkglab", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command")
    sub.add_parser("run", parents=[common], help="run the command named in the manifest")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=f"{name} (manifest command must match)")
        if name == "region":
            sp.add_argument("--r", help="Lebesgue index in (1, 2]")
            sp.add_argument("--delta", help="offset delta > 0 (default: --epsilon or 0.01)")
            sp.add_argument("--variant", choices=("minimal_s", "minimal_l"), default="minimal_l")
    return ap


def _region_manifest(args):
    m = {"schema": SCHEMA_VERSION, "command": "region",
         "parameters": {"r": args.r, "delta": args.delta or str(args.epsilon or 0.01), "variant": args.variant}}
    return m, manifest_hash(m)


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "region" and args.manifest is None:
            if args.r is None:
                ap.error("region needs --manifest or --r")
            manifest, digest = _region_manifest(args)
        elif args.manifest is None:
            ap.error("--manifest is required")
        else:
            manifest, digest = load_manifest(args.manifest)
        if args.command not in (None, "run") and manifest["command"] != args.command:
            raise ManifestError(f"{args.manifest}: manifest command {manifest['command']!r} "
                                f"does not match subcommand {args.command!r}")
        run = Run(manifest, digest, args.seed, args.out, args.epsilon, args.override_hypotheses)
        return HANDLERS[manifest["command"]](run)
    except (ManifestError, DKGError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
