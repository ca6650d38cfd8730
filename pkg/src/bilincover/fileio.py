"""Instance files (canonical JSON) and a deterministic trim-loss generator.

Two file kinds exist. A generic covering row:

    {"kind": "generic", "n": 2, "r": 20, "u": [5, 6],
     "c": [-1, -2], "d": [10, 12]}

with optional ``u``, ``delta``, and objective ``c``/``d`` (given together).
A trim-loss instance:

    {"kind": "trimloss", "L": 1000, "lengths": [...], "demands": [...],
     "n_patterns": 10}

``write_instance`` emits canonical bytes (sorted keys, compact separators,
integral numbers without a fractional part), so canonical input round-trips
byte for byte.
"""

from __future__ import annotations

import json
import math

from .model import (
    Instance,
    LinearObjective,
    TrimLossInstance,
    ValidationError,
    validate_instance,
    validate_trimloss,
)

_GENERIC_KEYS = ("kind", "n", "r", "u", "delta", "c", "d")
_TRIM_KEYS = ("kind", "L", "lengths", "demands", "n_patterns")


class ParseError(ValidationError):
    """Malformed instance file; the message is path-qualified ($.key)."""


def _require_number(obj, key, path):
    if key not in obj:
        raise ParseError(f"{path}.{key}: missing required key")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ParseError(f"{path}.{key}: expected a finite number")
    return v


def _require_int(obj, key, path):
    v = _require_number(obj, key, path)
    if isinstance(v, float):
        if not v.is_integer():
            raise ParseError(f"{path}.{key}: expected an integer")
        v = int(v)
    return v


def _number_list(obj, key, path, integral=False):
    v = obj[key]
    if not isinstance(v, list) or not v:
        raise ParseError(f"{path}.{key}: expected a non-empty array")
    out = []
    for i, e in enumerate(v):
        if isinstance(e, bool) or not isinstance(e, (int, float)) or not math.isfinite(e):
            raise ParseError(f"{path}.{key}[{i}]: expected a finite number")
        if integral:
            if isinstance(e, float):
                if not e.is_integer():
                    raise ParseError(f"{path}.{key}[{i}]: expected an integer")
                e = int(e)
        out.append(e)
    return out


def _parse_generic(obj) -> tuple[Instance, LinearObjective | None]:
    n = _require_int(obj, "n", "$")
    r = _require_number(obj, "r", "$")
    u = tuple(_number_list(obj, "u", "$", integral=True)) if "u" in obj else None
    delta = tuple(_number_list(obj, "delta", "$")) if "delta" in obj else None
    if ("c" in obj) != ("d" in obj):
        missing = "d" if "c" in obj else "c"
        raise ParseError(f"$.{missing}: c and d must be given together")
    objective = None
    if "c" in obj:
        c = _number_list(obj, "c", "$")
        d = _number_list(obj, "d", "$")
        if len(c) != n or len(d) != n:
            raise ParseError("$.c: objective arrays must have n entries")
        objective = LinearObjective(tuple(c), tuple(d))
    if u is not None and len(u) != n:
        raise ParseError("$.u: expected n entries")
    if delta is not None and len(delta) != n:
        raise ParseError("$.delta: expected n entries")
    try:
        inst = validate_instance(Instance(n, float(r), u, delta))
    except ValidationError as exc:
        raise ParseError(f"$: {exc}") from exc
    return inst, objective


def _parse_trimloss(obj) -> TrimLossInstance:
    L = _require_number(obj, "L", "$")
    if "lengths" not in obj:
        raise ParseError("$.lengths: missing required key")
    if "demands" not in obj:
        raise ParseError("$.demands: missing required key")
    lengths = _number_list(obj, "lengths", "$")
    demands = _number_list(obj, "demands", "$")
    n_patterns = _require_int(obj, "n_patterns", "$")
    for j, lj in enumerate(lengths):
        if lj > L:
            raise ParseError(f"$.lengths[{j}]: exceeds the stock length L")
    try:
        return validate_trimloss(
            TrimLossInstance(float(L), tuple(lengths), tuple(demands), n_patterns)
        )
    except ValidationError as exc:
        raise ParseError(f"$: {exc}") from exc


def parse_instance(
    data: str | bytes,
) -> tuple[Instance | TrimLossInstance, LinearObjective | None]:
    """Parse and validate an instance file; unknown keys are rejected."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"$: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("$: expected a JSON object")
    kind = obj.get("kind")
    if kind is None:
        raise ParseError("$.kind: missing required key")
    if kind == "generic":
        allowed = _GENERIC_KEYS
    elif kind == "trimloss":
        allowed = _TRIM_KEYS
    else:
        raise ParseError(f"$.kind: unknown kind {kind!r}")
    for k in obj:
        if k not in allowed:
            raise ParseError(f"$.{k}: unknown key")
    if kind == "generic":
        return _parse_generic(obj)
    return _parse_trimloss(obj), None


def _num(v: float):
    f = float(v)
    return int(f) if f.is_integer() else f


def write_instance(
    inst: Instance | TrimLossInstance, objective: LinearObjective | None = None
) -> str:
    """Canonical JSON text for an instance (sorted keys, compact, newline)."""
    if isinstance(inst, TrimLossInstance):
        payload: dict = {
            "kind": "trimloss",
            "L": _num(inst.L),
            "lengths": [_num(v) for v in inst.lengths],
            "demands": [_num(v) for v in inst.demands],
            "n_patterns": inst.n_patterns,
        }
    else:
        payload = {"kind": "generic", "n": inst.n, "r": _num(inst.r)}
        if inst.u is not None:
            payload["u"] = [int(v) for v in inst.u]
        if inst.delta is not None:
            payload["delta"] = [_num(v) for v in inst.delta]
        if objective is not None:
            payload["c"] = [_num(v) for v in objective.c]
            payload["d"] = [_num(v) for v in objective.d]
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


class SplitMix64:
    """splitmix64 generator; fixed constants keep output platform-independent.

    Constants: increment 0x9E3779B97F4A7C15, mix multipliers
    0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, shifts 30/27/31.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]; modulo reduction (bias is negligible
        at the spans used here)."""
        return lo + self.next_u64() % (hi - lo + 1)


def gen_trimloss(
    seed: int,
    n_finals: int,
    n_patterns: int,
    L: float,
    length_range_fracs: tuple[float, float] = (0.01, 0.2),
    demand_mean: int = 10,
) -> TrimLossInstance:
    """Random trim-loss instance, deterministic per seed.

    Final lengths are uniform integers in [frac_lo*L, frac_hi*L], demands
    uniform integers in [1, 2*demand_mean - 1] (mean ``demand_mean``). The
    parameterization imitates common cutting-stock generators but is an
    approximation; published benchmark files are not reproduced.
    """
    frac_lo, frac_hi = length_range_fracs
    if not (0.0 < frac_lo < frac_hi <= 1.0):
        raise ValidationError("length fractions must satisfy 0 < lo < hi <= 1")
    if n_finals < 1 or n_patterns < 1:
        raise ValidationError("n_finals and n_patterns must be positive")
    if demand_mean < 1:
        raise ValidationError("demand_mean must be at least 1")
    lo_len = max(1, math.ceil(frac_lo * L))
    hi_len = math.floor(frac_hi * L)
    if lo_len > hi_len:
        raise ValidationError("length range is empty for this L")
    rng = SplitMix64(seed)
    lengths = tuple(float(rng.randint(lo_len, hi_len)) for _ in range(n_finals))
    demands = tuple(float(rng.randint(1, 2 * demand_mean - 1)) for _ in range(n_finals))
    return validate_trimloss(TrimLossInstance(float(L), lengths, demands, n_patterns))
