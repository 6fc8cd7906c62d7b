"""Game definition files and CSV/JSON output writers."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
from pathlib import Path

import numpy as np

from . import presets
from .errors import GameStabError
from .game import QuadraticGame

PRESET_PARAM_KEYS = ("b", "p", "eps")


class GameFileError(GameStabError, ValueError):
    """Malformed game definition."""


def game_from_dict(data: dict) -> QuadraticGame:
    """Build a game from a parsed definition.

    Either ``{"preset": name, <param>: value, ...}`` (parameters may also sit
    under ``"params"``) or an explicit quadratic game with ``d1``, ``d2``,
    ``Q1``, ``Q2`` and optional ``b1``, ``b2``.
    """
    if not isinstance(data, dict):
        raise GameFileError("game definition must be a JSON object")
    if "preset" in data:
        params = dict(data.get("params") or {})
        params.update({k: data[k] for k in PRESET_PARAM_KEYS if k in data})
        try:
            return presets.build(data["preset"], params)
        except (TypeError, ValueError) as exc:
            raise GameFileError(str(exc)) from exc
    kind = data.get("type", "quadratic")
    if kind != "quadratic":
        raise GameFileError(f"unsupported game type {kind!r}")
    missing = [k for k in ("d1", "d2", "Q1", "Q2") if k not in data]
    if missing:
        raise GameFileError(f"game definition is missing {missing}")
    try:
        return QuadraticGame(
            int(data["d1"]),
            int(data["d2"]),
            np.array(data["Q1"], dtype=float),
            np.array(data["Q2"], dtype=float),
            None if data.get("b1") is None else np.array(data["b1"], dtype=float),
            None if data.get("b2") is None else np.array(data["b2"], dtype=float),
        )
    except (TypeError, ValueError) as exc:
        raise GameFileError(f"invalid quadratic game: {exc}") from exc


def load_game_file(path) -> QuadraticGame:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GameFileError(f"cannot read game file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"game file is not valid JSON: {exc}") from exc
    return game_from_dict(data)


def game_to_dict(game: QuadraticGame) -> dict:
    return {
        "type": "quadratic",
        "d1": game.d1,
        "d2": game.d2,
        "Q1": game.Q1.tolist(),
        "Q2": game.Q2.tolist(),
        "b1": game.b1.tolist(),
        "b2": game.b2.tolist(),
    }


def fmt(v: float) -> str:
    return repr(float(v))


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def action_columns(d1: int, d2: int) -> list:
    return [f"x{i + 1}" for i in range(d1)] + [f"y{i + 1}" for i in range(d2)]


def trajectory_csv(record) -> str:
    d1 = record.d1
    d2 = record.states.shape[1] - d1
    header = ["t", *action_columns(d1, d2), "norm"]
    rows = ([t, *s, n] for t, s, n in zip(record.times, record.states, record.norms))
    return csv_text(header, rows)


def sweep_csv(result) -> str:
    n = len(result.spectra_continuous[0])
    header = ["tau", "rho"] + [f"re_{i + 1}" for i in range(n)] + [f"im_{i + 1}" for i in range(n)]
    rows = []
    for tau, rho, spec in zip(result.taus, result.rho_discrete, result.spectra_continuous):
        lam = spec.eigenvalues
        rows.append([tau, rho, *lam.real, *lam.imag])
    return csv_text(header, rows)


def qnr_csv(estimate) -> str:
    rows = [["nr", z.real, z.imag] for z in estimate.nr_points]
    rows += [["qnr", z.real, z.imag] for z in estimate.points]
    return csv_text(["kind", "re", "im"], rows)


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
