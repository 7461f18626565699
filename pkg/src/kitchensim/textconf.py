"""Line-oriented sectioned config format used by scenes and bench configs.

Syntax:

    # comment
    version = 1          (top-level assignments before any section)

    [section]
    key = value

Values stay raw strings; consumers parse them and report errors through
:class:`~kitchensim.errors.ConfigError`, which always cites the line number.
Duplicate sections and duplicate keys within a section are rejected here
because silently-last-wins configs are a debugging tarpit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError


@dataclass
class ConfigEntry:
    key: str
    value: str
    line: int


@dataclass
class ConfigDoc:
    source: str
    top: dict[str, ConfigEntry] = field(default_factory=dict)
    sections: dict[str, list[ConfigEntry]] = field(default_factory=dict)
    section_lines: dict[str, int] = field(default_factory=dict)

    def error(self, message: str, line: int | None = None) -> ConfigError:
        return ConfigError(message, source=self.source, line=line)

    def require_top(self, key: str) -> ConfigEntry:
        if key not in self.top:
            raise self.error(f"missing required top-level key {key!r}")
        return self.top[key]

    def require_section(self, name: str) -> list[ConfigEntry]:
        if name not in self.sections:
            raise self.error(f"missing required section [{name}]")
        return self.sections[name]

    def section_map(self, name: str) -> dict[str, ConfigEntry]:
        """Entries of a section as a key->entry map (keys are unique)."""
        return {e.key: e for e in self.sections.get(name, [])}


def parse_config(text: str, source: str = "<config>") -> ConfigDoc:
    doc = ConfigDoc(source=source)
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise doc.error(f"malformed section header {raw.strip()!r}", lineno)
            name = line[1:-1].strip()
            if name in doc.sections:
                raise doc.error(f"duplicate section [{name}]", lineno)
            doc.sections[name] = []
            doc.section_lines[name] = lineno
            current = name
            continue
        if "=" not in line:
            raise doc.error(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise doc.error("empty key", lineno)
        entry = ConfigEntry(key=key, value=value, line=lineno)
        if current is None:
            if key in doc.top:
                raise doc.error(f"duplicate top-level key {key!r}", lineno)
            doc.top[key] = entry
        else:
            if any(e.key == key for e in doc.sections[current]):
                raise doc.error(f"duplicate key {key!r} in section [{current}]", lineno)
            doc.sections[current].append(entry)
    return doc


def parse_int(doc: ConfigDoc, entry: ConfigEntry, *, minimum: int | None = None) -> int:
    try:
        value = int(entry.value)
    except ValueError:
        raise doc.error(f"{entry.key!r} must be an integer, got {entry.value!r}", entry.line)
    if minimum is not None and value < minimum:
        raise doc.error(f"{entry.key!r} must be >= {minimum}, got {value}", entry.line)
    return value


def parse_float(doc: ConfigDoc, entry: ConfigEntry) -> float:
    try:
        return float(entry.value)
    except ValueError:
        raise doc.error(f"{entry.key!r} must be a number, got {entry.value!r}", entry.line)


def parse_bool(doc: ConfigDoc, entry: ConfigEntry) -> bool:
    lowered = entry.value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise doc.error(f"{entry.key!r} must be a boolean, got {entry.value!r}", entry.line)
