"""Run a handful of ``corrkit`` commands on the bundled inputs.

Each command writes a JSON report. The script prints the exit code, the
verdict and the report's top-level keys. Reports go to a temporary
directory.

Run with ``python3 demos/cli_tour.py``.
"""
import json
import tempfile
from pathlib import Path

from corrkit.cli import main

COMMANDS = [
    ["check-usc", "ex1.json"],
    ["check-wcg", "ex1_wcg.json"],
    ["check-wnq", "ex1_wnq.json"],
    ["select", "ex1_select.json"],
    ["compose-fix", "ex1_compose.json"],
    ["brouwer", "brouwer_swap.json"],
    ["equilibrium-selection", "econ1.json"],
    ["equilibrium-approx", "econ1_approx.json"],
]


def main_tour() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        for k, args in enumerate(COMMANDS):
            out = Path(tmp) / f"report_{k}.json"
            code = main([*args, str(out)])
            rep = json.loads(out.read_text())
            print(f"corrkit {' '.join(args):40s} exit {code}  verdict {rep['verdict']}")
        print("\nreport keys:", sorted(rep))
        out = Path(tmp) / "replay.json"
        code = main(["equilibrium-approx", str(Path(tmp) / f"report_{len(COMMANDS) - 1}.json"), str(out)])
        print("replaying the last report gives exit", code)


if __name__ == "__main__":
    main_tour()
