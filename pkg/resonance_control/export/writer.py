import json
import logging
import os
import tempfile
from typing import Any, Dict, Optional

import pandas as pd

from resonance_control import __version__
from resonance_control.config import Config

logger = logging.getLogger(__name__)

# Bit-exact headers of the fixed-layout exports
COLUMNS = {
    "trajectory": ["t", "re_b1", "im_b1", "re_b2", "im_b2", "p", "pi_x", "pi_y", "omega", "delta"],
    "portrait": ["curve_id", "p", "alpha", "pi_x", "pi_y", "kind"],
    "scan": ["delta0", "beta", "fidelity"],
    "track": ["t", "p", "alpha", "pi_x", "pi_y", "fp_p", "fp_alpha", "sep_alpha_plus", "sep_alpha_minus"],
}


class ResultWriter:
    """Writes result tables as CSV with a one-line JSON config header plus a JSON sidecar"""

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = output_dir or Config.OUTPUT_DIR
        self.frame_builders = {
            "trajectory": self._trajectory_frame,
            "pulse": self._plain_frame,
            "portrait": self._portrait_frame,
            "scan": self._scan_frame,
            "trace": self._trace_frame,
            "track": self._plain_frame,
        }

    def build_frame(self, kind: str, payload: Any) -> pd.DataFrame:
        if kind not in self.frame_builders:
            raise ValueError(f"unknown result kind '{kind}'")
        frame = self.frame_builders[kind](payload)
        expected = COLUMNS.get(kind)
        if expected is not None and list(frame.columns) != expected:
            raise ValueError(f"{kind} frame has columns {list(frame.columns)}, expected {expected}")
        return frame

    def write(self, kind: str, payload: Any, stem: str, resolved: Dict[str, Any],
              summary: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Write <stem>.csv and <stem>.json; both appear together or not at all"""
        try:
            frame = self.build_frame(kind, payload)
            os.makedirs(self.output_dir, exist_ok=True)
            csv_path = os.path.join(self.output_dir, f"{stem}.csv")
            sidecar_path = os.path.join(self.output_dir, f"{stem}.json")

            header = {"version": __version__, **resolved}
            sidecar = {**header, "kind": kind, "columns": list(frame.columns),
                       "rows": len(frame), "summary": summary or {}}

            csv_tmp = self._stage(csv_path, lambda fh: self._write_csv(fh, header, frame))
            try:
                sidecar_tmp = self._stage(sidecar_path,
                                          lambda fh: json.dump(sidecar, fh, indent=2, default=_jsonable))
            except Exception:
                os.unlink(csv_tmp)
                raise
            os.replace(csv_tmp, csv_path)
            os.replace(sidecar_tmp, sidecar_path)

            logger.info(f"wrote {len(frame)} rows to {csv_path}")
            return {"success": True, "csv": csv_path, "sidecar": sidecar_path, "rows": len(frame)}

        except (OSError, ValueError, TypeError) as e:
            logger.error(f"Writing {kind} results failed: {e}")
            return {"success": False, "error": f"Failed to write {kind} results: {str(e)}"}

    def _stage(self, target: str, fill) -> str:
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target) or ".", prefix=".tmp-", suffix=os.path.basename(target))
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fill(fh)
        except Exception:
            os.unlink(tmp)
            raise
        return tmp

    @staticmethod
    def _write_csv(fh, header: Dict[str, Any], frame: pd.DataFrame) -> None:
        fh.write("# " + json.dumps(header, separators=(",", ":"), default=_jsonable) + "\n")
        frame.to_csv(fh, index=False, float_format="%.17g")

    def _trajectory_frame(self, trajectory) -> pd.DataFrame:
        return trajectory.to_frame()

    def _portrait_frame(self, portrait) -> pd.DataFrame:
        return portrait.to_frame()

    def _scan_frame(self, result) -> pd.DataFrame:
        return result.to_frame()

    def _trace_frame(self, result) -> pd.DataFrame:
        return result.to_frame()

    def _plain_frame(self, frame: pd.DataFrame) -> pd.DataFrame:
        if not isinstance(frame, pd.DataFrame):
            raise TypeError(f"expected a DataFrame, got {type(frame).__name__}")
        return frame


def _jsonable(value):
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


def read_header(csv_path: str) -> Dict[str, Any]:
    """Resolved config stored in the first line of an exported CSV"""
    with open(csv_path) as fh:
        first = fh.readline()
    if not first.startswith("# "):
        raise ValueError(f"{csv_path} has no config header")
    return json.loads(first[2:])
