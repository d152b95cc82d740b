"""Instance and realization JSON.

Instance files look like::

    {"machines": 2,
     "jobs": [{"id": 0, "dist": {"type": "bernoulli", "size": 10, "prob": 0.5}},
              {"id": 1, "dist": {"type": "deterministic", "size": 3}},
              {"id": 2, "dist": {"type": "discrete", "support": [[1, 0.5], [4, 0.5]]}}]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .job_model import Bernoulli, Deterministic, Discrete, Instance, JobSpec, Realization


class InstanceFormatError(ValueError):
    pass


def _num(x):
    # integers stay integers so files round-trip byte for byte
    return int(x) if float(x).is_integer() else float(x)


def dist_to_dict(dist) -> dict:
    if isinstance(dist, Bernoulli):
        return {"type": "bernoulli", "size": _num(dist.size), "prob": dist.prob}
    if isinstance(dist, Deterministic):
        return {"type": "deterministic", "size": _num(dist.size)}
    return {"type": "discrete", "support": [[_num(v), p] for v, p in dist.support_]}


def dist_from_dict(d: dict):
    try:
        kind = d["type"]
        if kind == "bernoulli":
            return Bernoulli(float(d["size"]), float(d["prob"]))
        if kind == "deterministic":
            return Deterministic(float(d["size"]))
        if kind == "discrete":
            return Discrete(tuple((float(v), float(p)) for v, p in d["support"]))
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError(f"malformed distribution {d!r}") from exc
    raise InstanceFormatError(f"unknown distribution type {d.get('type')!r}")


def instance_to_dict(instance: Instance) -> dict:
    return {
        "machines": instance.machines,
        "jobs": [{"id": j.id, "dist": dist_to_dict(j.dist)} for j in instance.jobs],
    }


def instance_from_dict(d: dict) -> Instance:
    try:
        machines = int(d["machines"])
        raw = d["jobs"]
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError("instance needs 'machines' and 'jobs'") from exc
    by_id = {}
    for entry in raw:
        jid = int(entry["id"])
        if jid in by_id:
            raise InstanceFormatError(f"duplicate job id {jid}")
        try:
            by_id[jid] = dist_from_dict(entry["dist"])
        except ValueError as exc:
            raise InstanceFormatError(f"job {jid}: {exc}") from exc
    if sorted(by_id) != list(range(len(by_id))):
        raise InstanceFormatError("job ids must be exactly 0..n-1")
    try:
        return Instance(machines, tuple(JobSpec(j, by_id[j]) for j in range(len(by_id))))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def load_instance(path) -> Instance:
    with open(path) as fh:
        try:
            return instance_from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: {exc}") from exc


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance))


def realization_from_obj(obj) -> Realization:
    """Accept ``{"0": 2, "1": 0}`` or ``[2, 0]``."""
    if isinstance(obj, list):
        return Realization({i: float(v) for i, v in enumerate(obj)})
    return Realization({int(k): float(v) for k, v in obj.items()})
