"""
Report generation module
Renders command results as deterministic text, markdown or JSON
"""

import json
import logging
from typing import Dict, List

logger = logging.getLogger(__name__)

FORMATS = ("text", "markdown", "json")


class ReportGenerator:
    """Format a command result dict into a byte-stable report"""

    def __init__(self, output_format: str = "text"):
        if output_format not in FORMATS:
            raise ValueError(f"Unknown output format '{output_format}', expected one of {', '.join(FORMATS)}")
        self.output_format = output_format

    def generate(self, report: Dict) -> str:
        """
        Render a report

        Args:
            report: Result of a session command; keys and nested values must be JSON-compatible

        Returns:
            Report text ending in a newline
        """
        if self.output_format == "json":
            return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        if self.output_format == "markdown":
            return self._markdown(report)
        return "\n".join(self._text_lines(report, 0)) + "\n"

    def _text_lines(self, value, depth: int) -> List[str]:
        indent = "  " * depth
        lines = []
        if isinstance(value, dict):
            for key in sorted(value):
                item = value[key]
                if isinstance(item, (dict, list)) and item:
                    lines.append(f"{indent}{key}:")
                    lines.extend(self._text_lines(item, depth + 1))
                else:
                    lines.append(f"{indent}{key}: {self._scalar(item)}")
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, (dict, list)) and item:
                    lines.append(f"{indent}-")
                    lines.extend(self._text_lines(item, depth + 1))
                else:
                    lines.append(f"{indent}- {self._scalar(item)}")
        else:
            lines.append(f"{indent}{self._scalar(value)}")
        return lines

    @staticmethod
    def _scalar(value) -> str:
        if value is None:
            return "-"
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, (dict, list)):
            return "(none)"
        return str(value)

    def _markdown(self, report: Dict) -> str:
        command = report.get("command", "report")
        source = report.get("source", "")
        sections = []
        for key in sorted(report):
            if key in ("command", "source"):
                continue
            value = report[key]
            if isinstance(value, (dict, list)) and value:
                body = "\n".join(self._text_lines(value, 0))
                sections.append(f"## {key}\n```\n{body}\n```")
            else:
                sections.append(f"## {key}\n{self._scalar(value)}")
        body = "\n\n".join(sections)
        return f"# {command}: {source}\n\n{body}\n"
