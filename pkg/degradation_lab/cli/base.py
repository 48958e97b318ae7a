# cli/base.py
#
# Shared behaviour of every command: logging verbosity, the result store and error reporting
import json
import sys
from typing import List, Optional, Sequence

from cleo import Command
from loguru import logger

from degradation_lab.errors import LabError
from degradation_lab.store import FlatFileStore


class LabCommand(Command):
    """
    Base class of degradation_lab commands.
    """

    store: FlatFileStore

    def handle(self) -> int:
        logger.remove()
        logger.add(sys.stderr, level="DEBUG" if self.io.is_verbose() else "WARNING")
        self.store = FlatFileStore()
        try:
            return self.run() or 0
        except (LabError, ValueError, OSError) as e:
            self.line_error(json.dumps({"error": type(e).__name__, "message": str(e)}))
            return 1

    def run(self) -> Optional[int]:
        raise NotImplementedError

    def int_option(self, name: str) -> int:
        return int(self.option(name))

    def float_option(self, name: str) -> float:
        return float(self.option(name))

    def list_option(self, name: str) -> List[str]:
        return [v.strip() for v in str(self.option(name)).split(",") if v.strip()]


def float_list(text: str) -> List[float]:
    """Parses ``a,b,c`` or ``start:stop:step`` into a list of floats."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        n = int(round((stop - start) / step))
        return [round(start + k * step, 10) for k in range(n + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def metadata_path(output: str, suffix: str = "metadata.json") -> str:
    stem = output.rsplit(".", 1)[0] if "." in output.rsplit("/", 1)[-1] else output
    return f"{stem}_{suffix}"


def render_rows(command: Command, header: Sequence[str], rows: Sequence[Sequence]):
    table = command.table()
    table.set_header_row(list(header))
    table.set_rows([[str(v) for v in row] for row in rows])
    table.render(command.io)
