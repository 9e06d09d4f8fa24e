# File: src/harness/reports.py
# Purpose: JSON (stdout) and CSV (--out) writers shared by the CLI subcommands.

import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np
import pandas as pd

from mechanism.model import Configuration


def to_jsonable(value: Any) -> Any:
    """Convert numpy / dataclass-ish values into plain JSON types (inf -> "inf")."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Configuration):
        return configuration_dict(value)
    return value


def configuration_dict(q: Configuration) -> dict:
    return {
        "position": q.base_pose.position.tolist(),
        "orientation": q.base_pose.orientation.tolist(),
        "internal": list(q.internal),
    }


def emit(payload: dict, stream=None) -> str:
    """Write one JSON document (sorted keys) to stdout."""
    text = json.dumps(to_jsonable(payload), sort_keys=True)
    print(text, file=stream or sys.stdout)
    return text


def write_csv(frame: pd.DataFrame, path: Optional[Union[str, Path]]) -> Optional[Path]:
    if path is None:
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def vector_frame(name: str, values: Sequence[float], label: str = "cable") -> pd.DataFrame:
    return pd.DataFrame({label: list(range(len(values))), name: list(values)})
