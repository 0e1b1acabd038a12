from __future__ import annotations

import math
from typing import Any, Mapping, Optional, Sequence


def _cell(value: Any) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.3f}"
    return str(value)


def format_summary(
    title: str,
    fields: Mapping[str, Any],
) -> str:
    """
    Return a `key: value` block with aligned keys, used for command summaries.

    Args:
        title (str): First line of the block.
        fields (Mapping[str, Any]): Values to show; floats are rounded to three
            decimals and None renders as `n/a`.

    Returns:
        str: A multi-line string.
    """
    if not fields:
        return f"{title}: (empty)"
    width = max(len(k) for k in fields)
    rows = [f"    {k:<{width}} : {_cell(v)}" for k, v in fields.items()]
    return f"{title}\n" + "\n".join(rows)


def format_table(
    rows: Sequence[Sequence[Any]],
    columns: Sequence[str],
    indent: Optional[str] = "",
) -> str:
    """
    Format rows as aligned columns under a `#` header line.

    Args:
        rows (Sequence[Sequence[Any]]): Table rows ordered like `columns`.
        columns (Sequence[str]): Column headers used for width computation.
        indent (Optional[str]): Left indentation of every line.

    Returns:
        str: Header row and one line per row; an empty table names its columns.
    """
    if not rows:
        return f"{indent}Table empty: ({', '.join(columns)})"
    cells = [[_cell(v) for v in row] for row in rows]
    lmax = [len(c) for c in columns]
    for row in cells:
        for i, value in enumerate(row):
            lmax[i] = max(lmax[i], len(value))
    header = "   ".join(f"{c:<{lmax[i]}}" for i, c in enumerate(columns))
    lines = [" , ".join(f"{v:<{lmax[i]}}" for i, v in enumerate(row)) for row in cells]
    return f"{indent}# {header}\n" + "\n".join(f"{indent}  {line}" for line in lines)
