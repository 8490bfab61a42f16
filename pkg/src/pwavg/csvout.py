"""Deterministic CSV output: 17 significant digits, '.' decimal separator,
'\\n' line endings, so reruns are byte-identical."""

__all__ = ["fmt17", "write_rows"]


def fmt17(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt17(v) for v in row) + "\n")
