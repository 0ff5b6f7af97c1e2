"""
Error hierarchy shared by every layer of the simulator.
Each error carries a machine-readable code used in validation reports.
"""

from typing import Optional


class GridstormError(Exception):
    code = "error"

    def __init__(self, message: str, code: Optional[str] = None, detail: Optional[dict] = None):
        self.message = message
        if code is not None:
            self.code = code
        self.detail = detail or {}
        super().__init__(f"[{self.code}] {message}")


class MissingFile(GridstormError):
    code = "missing_file"

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"File not found: {path}", detail={"path": path})


class ParseError(GridstormError):
    code = "parse_error"

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None, source: str = ""):
        self.row = row
        self.column = column
        self.source = source
        where = f"{source} row {row} column '{column}'" if row is not None else source
        super().__init__(f"{where}: {message}", detail={"source": source, "row": row, "column": column})


class DanglingReference(GridstormError):
    code = "dangling_reference"

    def __init__(self, ref: str, context: str = ""):
        self.ref = ref
        msg = f"Unknown reference '{ref}'" + (f" in {context}" if context else "")
        super().__init__(msg, detail={"id": ref, "context": context})


class InvariantViolation(GridstormError):
    code = "invariant_violation"


class InfeasibleTarget(GridstormError):
    code = "infeasible_target"


class DegenerateTrack(GridstormError):
    code = "degenerate_track"


class OutOfRange(GridstormError):
    code = "out_of_range"


class MissingCurve(GridstormError):
    code = "missing_curve"

    def __init__(self, component_class: str):
        self.component_class = component_class
        super().__init__(
            f"No fragility curve for component class '{component_class}'",
            detail={"class": component_class},
        )


class UnknownComponent(GridstormError):
    code = "unknown_component"

    def __init__(self, component_id: str):
        self.component_id = component_id
        super().__init__(f"Unknown component '{component_id}'", detail={"id": component_id})


class SingularSystem(GridstormError):
    code = "singular_system"


class InfeasibleDispatch(GridstormError):
    code = "infeasible_dispatch"


class MisalignedTimeGrid(GridstormError):
    code = "misaligned_time_grid"


class ConfigError(GridstormError):
    code = "config_error"


class SchemaVersionError(ConfigError):
    code = "schema_version"
