"""Write the built-in scenarios as JSON configs, usable with ``eqph run <file>``."""

import json
import sys
from pathlib import Path

from equivariant_ph.scenarios import BUILTIN

out = Path(sys.argv[1] if len(sys.argv) > 1 else "configs")
out.mkdir(parents=True, exist_ok=True)
for name, rec in BUILTIN.items():
    (out / f"{name}.json").write_text(json.dumps(rec, indent=2) + "\n")
    print(out / f"{name}.json")
