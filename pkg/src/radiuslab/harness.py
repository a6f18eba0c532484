"""Experiment orchestration: seeded ensembles -> chains -> CSV/JSON reports.

Per-sample generators are derived from (root seed, chain, ensemble, dim,
index), so results are independent of evaluation order and thread count;
rows are emitted in sorted (chain_id, ensemble, dim, index) order and floats
are serialized with shortest round-trip repr, making reports byte-stable.
"""

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import chains as chains_mod
from .backend import active_backend
from .chains import CHAIN_IDS, tightness_report
from .core import matrix_from_json_dict, matrix_to_json_dict
from .ensembles import (
    ENSEMBLES,
    RNG_ALGORITHM,
    derive_key_hex,
    derive_rng,
    gen_random,
    haar_isometry,
)
from .errors import ConfigError
from .funcalc import function_from_config, parse_function, power
from .maps import (
    PositiveMap,
    _rect_from_json as _rect_from_payload,
    _rect_to_json as _rect_payload,
    map_from_config,
    random_map,
)

_NEEDS_MAP = {"THM_PHI_SUP", "PROP_PHI_OPCONVEX"}
_NEEDS_ITEMS = {"MULTI_OP", "MULTI_OP_NORMAL"}
_NEEDS_OPCONVEX = {"THM_MAIN", "COR_POWER_R", "PROP_PHI_OPCONVEX", "TWO_OP_OPCONVEX"}
_NEEDS_CONVEX = {"THM_PHI_SUP", "MULTI_OP", "MULTI_OP_NORMAL", "TWO_OP_SUP"}

CSV_COLUMNS = [
    "id",
    "chain_id",
    "ensemble",
    "n",
    "sample_index",
    "seed",
    "term1",
    "term2",
    "term3",
    "margin1",
    "margin2",
    "sup_lower",
    "sup_upper",
    "sufficient_left",
    "holds",
    "tol",
]


@dataclass
class ExperimentConfig:
    chains: list
    dims: list
    samples: int
    seed: int
    ensembles: list
    function: object = field(default_factory=lambda: power(2))
    map_spec: object = "random"
    tol_scale: float = 1e-9
    out_csv: str = None
    out_json: str = None

    def validate(self):
        if not self.chains:
            raise ConfigError("chains: must list at least one chain id")
        for c in self.chains:
            if c not in CHAIN_IDS:
                raise ConfigError(f"chains: unknown id {c!r}; expected {CHAIN_IDS}")
        if not self.dims:
            raise ConfigError("dims: must list at least one dimension")
        for n in self.dims:
            if not (2 <= int(n) <= 64):
                raise ConfigError(f"dims: {n} outside the supported range [2, 64]")
        if int(self.samples) < 1:
            raise ConfigError(f"samples: must be >= 1, got {self.samples}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed: must fit an unsigned 64-bit integer")
        if not self.ensembles:
            raise ConfigError("ensembles: must list at least one ensemble")
        for e in self.ensembles:
            if e not in ENSEMBLES:
                raise ConfigError(
                    f"ensembles: unknown {e!r}; expected one of {ENSEMBLES}"
                )
        if not float(self.tol_scale) > 0.0:
            raise ConfigError(f"tol_scale: must be positive, got {self.tol_scale}")
        fn = self.function
        for c in self.chains:
            if c in _NEEDS_OPCONVEX and not (fn.increasing and fn.operator_convex):
                raise ConfigError(
                    f"function: {fn.label()} is not increasing operator convex, "
                    f"required by chain {c}"
                )
            if c in _NEEDS_CONVEX and not (fn.increasing and fn.convex):
                raise ConfigError(
                    f"function: {fn.label()} is not increasing convex, "
                    f"required by chain {c}"
                )
            if c == "COR_POWER_R":
                if fn.kind != "power" or not 1.0 <= fn.params[0] <= 2.0:
                    raise ConfigError(
                        "function: COR_POWER_R needs power(r) with r in [1, 2]"
                    )
        if isinstance(self.map_spec, PositiveMap):
            for c in self.chains:
                if c in _NEEDS_MAP:
                    for n in self.dims:
                        if self.map_spec.input_dim != int(n):
                            raise ConfigError(
                                f"map: fixed map has input dim "
                                f"{self.map_spec.input_dim}, config dim {n}"
                            )
        elif self.map_spec not in ("random", None):
            raise ConfigError("map: expected a map, 'random', or null")
        return self

    def to_dict(self):
        if isinstance(self.map_spec, PositiveMap):
            map_repr = self.map_spec.to_config()
        else:
            map_repr = self.map_spec
        return {
            "chains": list(self.chains),
            "dims": [int(n) for n in self.dims],
            "samples": int(self.samples),
            "seed": int(self.seed),
            "ensembles": list(self.ensembles),
            "function": self.function.to_config(),
            "map": map_repr,
            "tol_scale": float(self.tol_scale),
            "out_csv": self.out_csv,
            "out_json": self.out_json,
        }

    @classmethod
    def from_dict(cls, d):
        known = {
            "chains",
            "dims",
            "samples",
            "seed",
            "ensembles",
            "ensemble",
            "function",
            "map",
            "tol_scale",
            "out_csv",
            "out_json",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        ensembles = d.get("ensembles")
        if ensembles is None:
            single = d.get("ensemble")
            ensembles = [single] if isinstance(single, str) else single
        if isinstance(ensembles, str):
            ensembles = [ensembles]
        fn = d.get("function", {"kind": "power", "r": 2})
        fn = parse_function(fn) if isinstance(fn, str) else function_from_config(fn)
        map_spec = d.get("map", "random")
        if isinstance(map_spec, dict):
            map_spec = map_from_config(map_spec)
        return cls(
            chains=list(d.get("chains", [])),
            dims=[int(n) for n in d.get("dims", [])],
            samples=int(d.get("samples", 1)),
            seed=int(d.get("seed", 0)),
            ensembles=list(ensembles or []),
            function=fn,
            map_spec=map_spec,
            tol_scale=float(d.get("tol_scale", 1e-9)),
            out_csv=d.get("out_csv"),
            out_json=d.get("out_json"),
        )

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def standard_config(seed=20250811, out_csv=None, out_json=None):
    """The `verify` default: every chain, adversarial ensembles included."""
    return ExperimentConfig(
        chains=list(CHAIN_IDS),
        dims=[2, 3, 4],
        samples=6,
        seed=seed,
        ensembles=["ginibre", "normal", "unitary", "nilpotent_jordan"],
        function=power(2),
        map_spec="random",
        tol_scale=1e-9,
        out_csv=out_csv,
        out_json=out_json,
    )


def _draw_map(cfg, rng, n):
    if isinstance(cfg.map_spec, PositiveMap):
        return cfg.map_spec
    return random_map(rng, n)


def _eval_simple(cfg, chain_id, ensemble, n, rng):
    a = gen_random(ensemble, n, rng)
    if chain_id == "EQUIV":
        res = chains_mod.chain_equiv(a, cfg.tol_scale)
    elif chain_id == "KITTANEH":
        res = chains_mod.chain_kittaneh(a, cfg.tol_scale)
    elif chain_id == "THM_MAIN":
        res = chains_mod.chain_thm_main(a, cfg.function, cfg.tol_scale)
    else:
        res = chains_mod.chain_power_r(a, cfg.function.params[0], cfg.tol_scale)
    return res, {"a": matrix_to_json_dict(a)}


def _eval_with_map(cfg, chain_id, ensemble, n, rng):
    a = gen_random(ensemble, n, rng)
    phi = _draw_map(cfg, rng, n)
    if chain_id == "THM_PHI_SUP":
        res = chains_mod.chain_thm_phi_sup(a, cfg.function, phi, cfg.tol_scale)
    else:
        res = chains_mod.chain_prop_phi_opconvex(a, cfg.function, phi, cfg.tol_scale)
    return res, {"a": matrix_to_json_dict(a), "map": phi.to_config()}


def _eval_pair(cfg, chain_id, ensemble, n, rng):
    a = gen_random(ensemble, n, rng)
    b = gen_random(ensemble, n, rng)
    if chain_id == "TWO_OP_SUP":
        res = chains_mod.chain_two_op_sup(a, b, cfg.function, cfg.tol_scale)
    else:
        res = chains_mod.chain_two_op_opconvex(a, b, cfg.function, cfg.tol_scale)
    return res, {"a": matrix_to_json_dict(a), "b": matrix_to_json_dict(b)}


def _eval_items(cfg, chain_id, ensemble, n, rng):
    normal = chain_id == "MULTI_OP_NORMAL"
    k = 2 + int(rng.integers(0, 2))
    # Normal variant requires normal operators regardless of the configured
    # ensemble; the plain variant follows the configuration.
    op_ensemble = "normal" if normal else ensemble
    ops = [gen_random(op_ensemble, n, rng) for _ in range(k)]
    w = haar_isometry(rng, k * n, n)
    contractions = [w[i * n : (i + 1) * n, :] for i in range(k)]
    items = list(zip(contractions, ops))
    res = chains_mod.chain_multi_op(items, cfg.function, normal, cfg.tol_scale)
    inputs = {
        "items": [
            {
                "p": _rect_payload(p_i),
                "a": matrix_to_json_dict(a_i),
            }
            for p_i, a_i in items
        ]
    }
    return res, inputs


EVALUATORS = {
    "EQUIV": _eval_simple,
    "KITTANEH": _eval_simple,
    "THM_MAIN": _eval_simple,
    "COR_POWER_R": _eval_simple,
    "THM_PHI_SUP": _eval_with_map,
    "PROP_PHI_OPCONVEX": _eval_with_map,
    "MULTI_OP": _eval_items,
    "MULTI_OP_NORMAL": _eval_items,
    "TWO_OP_SUP": _eval_pair,
    "TWO_OP_OPCONVEX": _eval_pair,
}


def replay(chain_id, inputs, function_config, tol_scale=1e-9):
    """Re-evaluate a persisted violation record; returns the ChainResult."""
    fn = function_from_config(function_config)
    if chain_id in _NEEDS_ITEMS:
        items = [
            (_rect_from_payload(item["p"]), matrix_from_json_dict(item["a"]))
            for item in inputs["items"]
        ]
        return chains_mod.chain_multi_op(
            items, fn, chain_id == "MULTI_OP_NORMAL", tol_scale
        )
    a = matrix_from_json_dict(inputs["a"])
    if chain_id == "EQUIV":
        return chains_mod.chain_equiv(a, tol_scale)
    if chain_id == "KITTANEH":
        return chains_mod.chain_kittaneh(a, tol_scale)
    if chain_id == "THM_MAIN":
        return chains_mod.chain_thm_main(a, fn, tol_scale)
    if chain_id == "COR_POWER_R":
        return chains_mod.chain_power_r(a, fn.params[0], tol_scale)
    if chain_id in _NEEDS_MAP:
        phi = map_from_config(inputs["map"])
        if chain_id == "THM_PHI_SUP":
            return chains_mod.chain_thm_phi_sup(a, fn, phi, tol_scale)
        return chains_mod.chain_prop_phi_opconvex(a, fn, phi, tol_scale)
    b = matrix_from_json_dict(inputs["b"])
    if chain_id == "TWO_OP_SUP":
        return chains_mod.chain_two_op_sup(a, b, fn, tol_scale)
    return chains_mod.chain_two_op_opconvex(a, b, fn, tol_scale)


def _fmt(x):
    return repr(float(x))


def _row(result, chain_id, ensemble, n, index, seed_hex):
    terms = list(result.terms) + [""] * (3 - len(result.terms))
    margins = list(result.margins) + [""] * (2 - len(result.margins))
    bracket = result.sup_bracket or ("", "")
    return {
        "id": f"{chain_id}:{ensemble}:n{n}:s{index}",
        "chain_id": chain_id,
        "ensemble": ensemble,
        "n": str(n),
        "sample_index": str(index),
        "seed": seed_hex,
        "term1": _fmt(terms[0]) if terms[0] != "" else "",
        "term2": _fmt(terms[1]) if terms[1] != "" else "",
        "term3": _fmt(terms[2]) if terms[2] != "" else "",
        "margin1": _fmt(margins[0]) if margins[0] != "" else "",
        "margin2": _fmt(margins[1]) if margins[1] != "" else "",
        "sup_lower": _fmt(bracket[0]) if bracket[0] != "" else "",
        "sup_upper": _fmt(bracket[1]) if bracket[1] != "" else "",
        "sufficient_left": ""
        if result.sufficient_left is None
        else str(result.sufficient_left).lower(),
        "holds": str(result.holds).lower(),
        "tol": _fmt(result.tol_used),
    }


@dataclass
class SuiteReport:
    config: ExperimentConfig
    rows: list
    results: dict
    violations: list
    tightness: dict
    wall_time_s: float
    backend: str

    @property
    def n_violations(self):
        return len(self.violations)

    @property
    def ok(self):
        return not self.violations

    def summary_dict(self):
        return {
            "config": self.config.to_dict(),
            "rng": dict(RNG_ALGORITHM, root_seed=int(self.config.seed)),
            "backend": self.backend,
            "rows": len(self.rows),
            "violations": self.violations,
            "tightness": self.tightness,
            "timing": {
                "wall_time_s": self.wall_time_s,
                "timestamp": datetime.now(timezone.utc).isoformat(),
            },
        }


def thread_count(threads=None):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("RADIUSLAB_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def run_suite(config, threads=None):
    """Evaluate every configured chain on every (ensemble, dim, sample).

    Returns a SuiteReport; writes CSV rows and the JSON summary when the
    config names output paths. Violations carry full replay inputs.
    """
    config.validate()
    t0 = time.perf_counter()
    tasks = sorted(
        (chain, ens, int(n), idx)
        for chain in config.chains
        for ens in config.ensembles
        for n in config.dims
        for idx in range(config.samples)
    )

    def work(task):
        chain_id, ensemble, n, index = task
        rng = derive_rng(config.seed, chain_id, ensemble, n, index)
        result, inputs = EVALUATORS[chain_id](config, chain_id, ensemble, n, rng)
        return task, result, inputs

    workers = thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, tasks))
    else:
        outcomes = [work(t) for t in tasks]

    rows = []
    per_chain = {}
    violations = []
    for (chain_id, ensemble, n, index), result, inputs in outcomes:
        seed_hex = derive_key_hex(config.seed, chain_id, ensemble, n, index)
        rows.append(_row(result, chain_id, ensemble, n, index, seed_hex))
        per_chain.setdefault(chain_id, []).append(result)
        if not result.holds:
            violations.append(
                {
                    "id": rows[-1]["id"],
                    "chain_id": chain_id,
                    "ensemble": ensemble,
                    "n": n,
                    "sample_index": index,
                    "seed": seed_hex,
                    "function": config.function.to_config(),
                    "inputs": inputs,
                    "result": result.as_dict(),
                }
            )
    tightness = {cid: tightness_report(res) for cid, res in per_chain.items()}
    report = SuiteReport(
        config=config,
        rows=rows,
        results=per_chain,
        violations=violations,
        tightness=tightness,
        wall_time_s=time.perf_counter() - t0,
        backend=active_backend(),
    )
    if config.out_csv:
        write_csv(report.rows, config.out_csv)
    if config.out_json:
        with open(config.out_json, "w") as fh:
            json.dump(report.summary_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
