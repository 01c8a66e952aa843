from rich.table import Table

from subgrain.cli.constants import language_name
from subgrain.timedtext import CorpusStats


def corpus_stats_table(movie_id: str, stats: dict[str, CorpusStats]) -> Table:
    """The per-language subtitle statistics for one movie."""
    table = Table(title=f"Subtitles: {movie_id}")
    table.add_column("Language")
    table.add_column("Pairs", justify="right")
    table.add_column("Avg. words (EN)", justify="right")
    table.add_column("Avg. chars (EN)", justify="right")

    for language, row in stats.items():
        table.add_row(
            language_name(language),
            f"{row.pairs:,}",
            f"{row.avg_words:.2f}",
            f"{row.avg_chars:.2f}",
        )
    return table


def frame_stats_table(
    movie_id: str,
    duration_ms: int | None,
    frames_loaded: int,
    frames_in_spans: int,
    frames_total: int | None,
) -> Table:
    """The visual statistics for one movie."""
    table = Table(title=f"Frames: {movie_id}")
    table.add_column("Duration", justify="right")
    table.add_column("Descriptions", justify="right")
    table.add_column("Sampled frames", justify="right")
    table.add_column("Frames in subtitle spans", justify="right")

    duration = "-" if duration_ms is None else f"{duration_ms / 60_000:.1f} min"
    total = "-" if frames_total is None else f"{frames_total:,}"
    table.add_row(duration, f"{frames_loaded:,}", total, f"{frames_in_spans:,}")
    return table


def language_summary_table(rows: list[list[str]], header: list[str]) -> Table:
    """Language-wise COMET gains."""
    table = Table(title="Average COMET change over baseline")
    for column in header:
        table.add_column(column, justify="left" if column == "language" else "right")
    for row in rows:
        table.add_row(*row)
    return table
