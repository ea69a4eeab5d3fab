"""JSON game files.

A file either spells out a game::

    {"players": 2, "types": [1, 1],
     "actions": [[[0, 1]], [[0, 1]]],
     "states": {"structured": {"dims": [[0, 1]]}},
     "payoff_utility": [[[[a-profile][state] ...]]],
     "attitudes": [[{"kind": "alarmist", "priors": [[...], [...]]}], ...]}

or names a builder with ``{"model": "pricing", "params": {...}}``. General
state spaces use ``{"general": {"states": [...], "partition": [[...], ...]}}``
with one state-index list per type profile (lexicographic). Payoff tables are
indexed ``[player][type profile][action profile][state]`` with both profiles
flattened lexicographically.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dist import SupportGrid
from .game import AmbiguityAttitude, GameSpec, ValidationError
from .models import build_from_params
from .satisfaction import COMPARATORS

SCHEMA_VERSION = 1
TOP_KEYS = {
    "schema_version", "name", "description", "players", "types", "actions", "states",
    "payoff_utility", "attitudes", "model", "params", "family",
}
ATTITUDE_KEYS = {"kind", "prior", "priors", "type_probs", "nu_set", "tilde_sets", "comparator"}
FAMILY_KEYS = {"vary", "how", "lambdas"}


def _unknown(d: dict, allowed: set, where: str):
    extra = sorted(set(d) - allowed)
    if extra:
        raise ValidationError(f"{where}: unknown key(s) {extra}")


def _attitude_from_json(obj: dict, where: str) -> AmbiguityAttitude:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: attitude must be an object")
    _unknown(obj, ATTITUDE_KEYS, where)
    kind = obj.get("kind")
    if kind == "custom":
        name = obj.get("comparator")
        if name not in COMPARATORS:
            raise ValidationError(f"{where}: unknown comparator {name!r}; known: {sorted(COMPARATORS)}")
        return AmbiguityAttitude.custom(COMPARATORS[name], name)
    try:
        if "type_probs" in obj:
            return AmbiguityAttitude.factored(kind, obj["type_probs"], obj["nu_set"], obj.get("tilde_sets"))
        if "prior" in obj:
            return AmbiguityAttitude(kind, (obj["prior"],))
        return AmbiguityAttitude(kind, tuple(obj["priors"]))
    except KeyError as exc:
        raise ValidationError(f"{where}: missing key {exc}") from None
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _attitude_to_json(att: AmbiguityAttitude) -> dict:
    if att.kind == "custom":
        if att.comparator_name not in COMPARATORS:
            raise ValidationError("only named comparators can be saved")
        return {"kind": "custom", "comparator": att.comparator_name}
    if att.is_factored:
        out = {
            "kind": att.kind,
            "type_probs": att.type_probs.tolist(),
            "nu_set": [nu.tolist() for nu in att.nu_set],
        }
        if att.tilde_sets is not None:
            out["tilde_sets"] = [[mu.tolist() for mu in s] for s in att.tilde_sets]
        return out
    if att.kind == "traditional":
        return {"kind": "traditional", "prior": att.priors[0].tolist()}
    return {"kind": att.kind, "priors": [r.tolist() for r in att.priors]}


def _payoff_table(raw, n, t, n_actions, n_states) -> np.ndarray:
    """Dense table of shape ``(n_actions, n_states)``, naming the first gap."""
    rows = raw if isinstance(raw, list) else []
    out = np.empty((n_actions, n_states))
    for a in range(n_actions):
        row = rows[a] if a < len(rows) and isinstance(rows[a], list) else []
        for w in range(n_states):
            if w >= len(row) or row[w] is None:
                raise ValidationError(f"missing payoff entry (n={n}, t={t}, a={a}, w={w})")
            out[a, w] = float(row[w])
        if len(row) > n_states:
            raise ValidationError(f"extra payoff entries at (n={n}, t={t}, a={a})")
    if len(rows) > n_actions:
        raise ValidationError(f"extra payoff rows at (n={n}, t={t})")
    return out


def _build_model(model, params) -> GameSpec:
    try:
        return build_from_params(model, params)
    except KeyError as exc:
        raise ValidationError(f"model {model!r}: missing parameter {exc}") from None
    except (TypeError, IndexError) as exc:
        raise ValidationError(f"model {model!r}: malformed parameters ({exc})") from None


def game_from_dict(doc: dict) -> GameSpec:
    if not isinstance(doc, dict):
        raise ValidationError("game file must hold a JSON object")
    _unknown(doc, TOP_KEYS, "game file")
    if "model" in doc:
        params = dict(doc.get("params", {}))
        if "name" in doc:
            params.setdefault("name", doc["name"])
        return _build_model(doc["model"], params)
    for key in ("players", "types", "actions", "states", "payoff_utility", "attitudes"):
        if key not in doc:
            raise ValidationError(f"game file: missing key {key!r}")
    N = int(doc["players"])
    types = [int(k) for k in doc["types"]]
    if len(types) != N:
        raise ValidationError(f"'types' lists {len(types)} players, expected {N}")
    actions = doc["actions"]
    if len(actions) != N:
        raise ValidationError(f"'actions' lists {len(actions)} players, expected {N}")
    grids = []
    for n, per in enumerate(actions):
        if per and not isinstance(per[0], list):
            per = [per] * types[n]
        if len(per) != types[n]:
            raise ValidationError(f"player {n}: need {types[n]} action grids")
        grids.append(tuple(SupportGrid.line(levels) for levels in per))
    states = doc["states"]
    if not isinstance(states, dict) or len(states) != 1:
        raise ValidationError("'states' must hold exactly one of 'structured' or 'general'")
    kw = {}
    if "structured" in states:
        st = states["structured"]
        _unknown(st, {"dims"}, "states.structured")
        kw["tilde_grid"] = SupportGrid(tuple(tuple(d) for d in st["dims"]))
    elif "general" in states:
        st = states["general"]
        _unknown(st, {"states", "partition"}, "states.general")
        kw["state_labels"] = tuple(st["states"])
        kw["partition"] = tuple(tuple(b) for b in st["partition"])
    else:
        raise ValidationError(f"unknown state encoding {sorted(states)}")
    profiles = list(np.ndindex(*types))
    if "partition" in kw and len(kw["partition"]) != len(profiles):
        raise ValidationError("partition needs one state subset per type profile")
    raw = doc["payoff_utility"]
    if len(raw) != N:
        raise ValidationError(f"'payoff_utility' lists {len(raw)} players, expected {N}")
    payoffs = []
    for n in range(N):
        if len(raw[n]) != len(profiles):
            raise ValidationError(f"player {n}: need payoff tables for {len(profiles)} type profiles")
        tabs = []
        for ti, t in enumerate(profiles):
            shape = tuple(grids[m][tm].size for m, tm in enumerate(t))
            K = kw["tilde_grid"].size if "tilde_grid" in kw else len(kw["partition"][ti])
            tab = _payoff_table(raw[n][ti], n, t, int(np.prod(shape)), K)
            tabs.append(tab.reshape(shape + (K,)))
        payoffs.append(tuple(tabs))
    atts = doc["attitudes"]
    if len(atts) != N or any(len(atts[n]) != types[n] for n in range(N)):
        raise ValidationError("'attitudes' needs one entry per player and type")
    attitudes = [
        [_attitude_from_json(a, f"attitude ({n},{tn})") for tn, a in enumerate(row)]
        for n, row in enumerate(atts)
    ]
    return GameSpec(tuple(types), tuple(grids), tuple(payoffs), attitudes, name=doc.get("name", ""), **kw)


def game_to_dict(game: GameSpec) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": game.name,
        "players": game.n_players,
        "types": list(game.type_counts),
        "actions": [[list(g.levels) for g in row] for row in game.action_grids],
    }
    if game.structured:
        doc["states"] = {"structured": {"dims": [list(d) for d in game.tilde_grid.dims]}}
    else:
        doc["states"] = {"general": {"states": list(game.state_labels), "partition": [list(b) for b in game.partition]}}
    doc["payoff_utility"] = [
        [tab.reshape(-1, tab.shape[-1]).tolist() for tab in row] for row in game.payoffs
    ]
    doc["attitudes"] = [[_attitude_to_json(a) for a in row] for row in game.attitudes]
    return doc


def load_document(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def load_game(path) -> GameSpec:
    return game_from_dict(load_document(path))


def save_game(game: GameSpec, path):
    Path(path).write_text(json.dumps(game_to_dict(game), indent=1, sort_keys=True) + "\n", encoding="utf-8")


# -- parametric families ---------------------------------------------------------


def _scaled(value, lam: float, how: str):
    if how == "set":
        return lam
    if isinstance(value, list):
        return [_scaled(v, lam, how) for v in value]
    return value * lam


def family_from_dict(doc: dict, lambdas=None):
    """Parametric family from a ``model`` file with a ``family`` section.

    ``family.vary`` names parameter keys; ``how`` is ``"scale"`` (multiply
    every number under the key by the parameter) or ``"set"`` (replace it).
    """
    from .monotone import ParametricFamily

    if "model" not in doc or "family" not in doc:
        raise ValidationError("a family file needs 'model', 'params' and 'family'")
    _unknown(doc, TOP_KEYS, "family file")
    fam = doc["family"]
    _unknown(fam, FAMILY_KEYS, "family")
    how = fam.get("how", "scale")
    if how not in ("scale", "set"):
        raise ValidationError("family.how must be 'scale' or 'set'")
    vary = list(fam["vary"])
    base = dict(doc.get("params", {}))
    for key in vary:
        if key not in base:
            raise ValidationError(f"family varies unknown parameter {key!r}")
    lams = [float(x) for x in (lambdas if lambdas is not None else fam["lambdas"])]

    def build(lam):
        params = dict(base)
        for key in vary:
            params[key] = _scaled(base[key], lam, how)
        return _build_model(doc["model"], params)

    return ParametricFamily(lams, build)


def load_family(path, lambdas=None):
    return family_from_dict(load_document(path), lambdas)
