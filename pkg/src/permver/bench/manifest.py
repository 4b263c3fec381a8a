"""Suite manifests: a plain-text index of example path, group tag, and
expected verdict (with expected error positions for failing examples)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ExampleSpec:
    path: str
    group: str
    expected: tuple  # ("verify",) or ("errors", frozenset of (line, col))

    @property
    def name(self) -> str:
        return Path(self.path).name

    @property
    def expects_verify(self) -> bool:
        return self.expected[0] == "verify"


class ManifestError(Exception):
    pass


def parse_positions(text: str):
    out = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        line, _, col = part.partition(":")
        out.add((int(line), int(col)))
    return frozenset(out)


def format_positions(positions) -> str:
    return ",".join(f"{l}:{c}" for l, c in sorted(positions))


def load_manifest(path: str | Path, validate: bool = True) -> list:
    """Lines: `<path> <group> verify` or `<path> <group> errors <l:c,l:c>`;
    `#` starts a comment. Example paths are relative to the manifest file."""
    path = Path(path)
    base = path.parent
    out = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ManifestError(f"{path}:{lineno}: expected `path group verify|errors [positions]`")
        ex_path, group, kind = parts[0], parts[1], parts[2]
        full = base / ex_path
        if kind == "verify":
            expected = ("verify",)
        elif kind == "errors":
            if len(parts) < 4:
                raise ManifestError(f"{path}:{lineno}: errors entry needs positions")
            expected = ("errors", parse_positions(parts[3]))
        else:
            raise ManifestError(f"{path}:{lineno}: unknown expectation {kind!r}")
        if validate:
            if not full.exists():
                raise ManifestError(f"{path}:{lineno}: no such example {full}")
            if expected[0] == "errors":
                n_lines = len(full.read_text().splitlines())
                for (l, c) in expected[1]:
                    if not (1 <= l <= n_lines):
                        raise ManifestError(
                            f"{path}:{lineno}: position {l}:{c} outside {full} "
                            f"({n_lines} lines)")
        out.append(ExampleSpec(str(full), group, expected))
    return out
