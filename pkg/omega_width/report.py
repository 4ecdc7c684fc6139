"""
Markdown rendering of acceptance reports.

Thin wrapper around Jinja2 with the templates shipped in
``omega_width/templates``.
"""

from pathlib import Path
from typing import Any

import jinja2
from jinja2 import Environment

from .logging_config import get_logger

logger = get_logger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"
REPORT_TEMPLATE = "report.md.j2"


class ReportError(Exception):
    """Raised when a report template cannot be rendered."""

    pass


def create_template_env(template_dir: Path | None = None) -> Environment:
    """
    Create the Jinja2 environment for reports.

    Args:
        template_dir: Directory containing template files; defaults to the
            packaged templates.
    """
    directory = template_dir or TEMPLATE_DIR
    env = jinja2.Environment(
        loader=jinja2.FileSystemLoader(str(directory)),
        trim_blocks=True,
        lstrip_blocks=True,
        autoescape=False,
        keep_trailing_newline=True,
        undefined=jinja2.StrictUndefined,
    )
    env.filters["status"] = _status_filter
    env.filters["compact"] = _compact_filter
    logger.debug("Report template environment created from %s", directory)
    return env


def render_report(report: dict[str, Any], env: Environment | None = None) -> str:
    """
    Render an acceptance report as Markdown.

    Raises:
        ReportError: If the template is missing or fails to render.
    """
    env = env or create_template_env()
    try:
        template = env.get_template(REPORT_TEMPLATE)
        return template.render(report=report, criteria=report.get("criteria", []))
    except jinja2.TemplateNotFound as e:
        raise ReportError(f"Template not found: {REPORT_TEMPLATE}") from e
    except jinja2.TemplateError as e:
        raise ReportError(f"Failed to render {REPORT_TEMPLATE}: {e}") from e


def _status_filter(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _compact_filter(details: dict[str, Any]) -> str:
    """One-line ``key=value`` rendering of a details mapping."""
    return ", ".join(f"{key}={value}" for key, value in sorted(details.items()))
