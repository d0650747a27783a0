"""Terminal rendering of certification reports, tables and series.

Tables and reports go to standard output; notifications go to standard error
so that piped output stays clean.
"""

from datetime import datetime
from typing import List, Optional

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.models import CertificationReport, TableRow
from src.molien import PoincareResult

STATUS_STYLES = {
    "MATCH": "bold green",
    "MISMATCH": "bold red",
    "SKIPPED": "yellow",
}


def _abbreviate(text: str, limit: int = 40) -> str:
    if len(text) <= limit:
        return text
    return f"{text[:16]}...{text[-16:]} ({len(text)} chars)"


def format_polynomial(coefficients: List[int], var: str = "t") -> str:
    """1 + t^2 + 2t^4 style rendering, lowest degree first."""
    parts = []
    for k, c in enumerate(coefficients):
        if c == 0:
            continue
        if k == 0:
            parts.append(str(c))
            continue
        power = var if k == 1 else f"{var}^{k}"
        parts.append(power if c == 1 else f"{c}{power}")
    return " + ".join(parts) if parts else "0"


class UIDisplay:
    """Rich console output for the command-line front end."""

    def __init__(self, console: Optional[Console] = None, err_console: Optional[Console] = None):
        self.console = console or Console()
        self.err_console = err_console or Console(stderr=True)

    def render_report(self, report: CertificationReport) -> Panel:
        """Render one certification report.

        Args:
            report: Finished report

        Returns:
            Rich Panel with the summary and one row per candidate set
        """
        summary = Table(show_header=False, box=box.SIMPLE, padding=(0, 1))
        summary.add_column("Field", style="cyan", width=22)
        summary.add_column("Value")

        summary.add_row("Degrees", f"{', '.join(map(str, report.degrees))}  ({report.degree_source})")
        orbit = str(report.orbit_size)
        if report.published_orbit_size is not None and report.published_orbit_size != report.orbit_size:
            orbit += f"  (published: {report.published_orbit_size})"
        summary.add_row("|O|", orbit)
        if report.group_order is not None:
            summary.add_row("Group order", str(report.group_order))
        summary.add_row("v", ", ".join(str(x) for x in report.v))
        summary.add_row("Regular", Text(str(report.regular), style="green" if report.regular else "red"))
        summary.add_row("Sym2 numerator", f"{format_polynomial(report.numerator)}  ({report.numerator_source})")
        jac_style = "green" if report.jacobian_nonzero else "red"
        summary.add_row("det J", Text(_abbreviate(str(report.jacobian_determinant)), style=jac_style))
        summary.add_row("Candidate sets", str(len(report.candidate_sets)))

        sets = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED)
        sets.add_column("#", justify="right")
        sets.add_column("Products")
        sets.add_column("det M", justify="right")
        for k, verdict in enumerate(report.candidate_sets, start=1):
            style = "green" if verdict.nonzero else "bold red"
            products = ", ".join(verdict.candidate.labels()[report.rank:])
            sets.add_row(str(k), products, Text(_abbreviate(str(verdict.determinant)), style=style))

        body = Table.grid()
        body.add_row(summary)
        if report.candidate_sets:
            body.add_row(sets)
        for warning in report.warnings:
            body.add_row(Text(f"warning: {warning}", style="yellow"))

        verdict_style = "bold green" if report.passed else "bold red"
        title = Text.assemble((f"{report.label} ", "bold white"), (report.verdict, verdict_style))
        return Panel(body, title=title, border_style="green" if report.passed else "red")

    def render_tables(self, rows: List[TableRow]) -> Table:
        """Computed-vs-reference comparison with status colouring."""
        table = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED, padding=(0, 1))
        table.add_column("Group", style="cyan")
        table.add_column("Quantity")
        table.add_column("Computed")
        table.add_column("Expected")
        table.add_column("Status")
        table.add_column("Note", style="dim")
        for row in rows:
            table.add_row(
                row.label,
                row.quantity,
                row.computed,
                row.expected,
                Text(row.status, style=STATUS_STYLES.get(row.status, "white")),
                row.note,
            )
        return table

    def render_series(self, result: PoincareResult, label: str, terms: int = 24) -> Table:
        """Leading series coefficients and the numerator of one covariant class."""
        table = Table(show_header=False, box=box.SIMPLE, padding=(0, 1),
                      title=f"{label} {result.cls.value} Molien series")
        table.add_column("Field", style="cyan", width=14)
        table.add_column("Value")
        if result.series is not None:
            count = min(terms, result.series.order)
            head = [str(result.series[k]) for k in range(count)]
            table.add_row("Series", ", ".join(head) + (", ..." if count < result.series.order else ""))
        table.add_row("Degrees", ", ".join(map(str, result.degrees)))
        table.add_row("Numerator", format_polynomial(result.numerator_coefficients()))
        table.add_row("Value at 1", str(result.value_at_one()))
        table.add_row("Source", result.source)
        return table

    def print(self, renderable) -> None:
        self.console.print(renderable)

    def show_notification(self, message: str, level: str = "INFO"):
        """Display notification message with appropriate styling.

        Args:
            message: Notification message to display
            level: Notification level ("INFO", "WARNING", "ERROR", "SUCCESS")
        """
        level_styles = {
            "INFO": ("blue", "[i]"),
            "WARNING": ("yellow", "[WARNING]"),
            "ERROR": ("red", "[X]"),
            "SUCCESS": ("green", "[OK]")
        }

        style, icon = level_styles.get(level.upper(), ("white", "-"))

        timestamp = datetime.now().strftime("%H:%M:%S")
        notification_text = Text()
        notification_text.append(f"[{timestamp}] ", style="dim white")
        notification_text.append(f"{icon} ", style=f"bold {style}")
        notification_text.append(message, style=style)

        self.err_console.print(notification_text)
