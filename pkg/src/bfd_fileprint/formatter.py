"""Text formatting for model documents, tables and per-file result lines."""

import math

from bfd_fileprint.models import ConfusionMatrix, Prediction


def fmt(value, width: int, justify: str = "L", fill: str = " ") -> str:
    """Format a value to fixed width.

    Args:
        value: The value to format (converted with str()).
        width: Minimum field width; longer values are kept whole.
        justify: "L" for left-justified, "R" for right-justified.
        fill: Fill character.
    """
    value = str(value) if value is not None else ""
    if justify == "L":
        return value.ljust(width, fill)
    return value.rjust(width, fill)


def fmt_real(value: float) -> str:
    """Decimal with 17 significant digits, enough to round-trip any double.

    Examples:
        0.1   -> "0.10000000000000001"
        1.0   -> "1"
        -2.5  -> "-2.5"
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"Cannot serialize non-finite real {value!r}")
    text = format(value, ".17g")
    return "0" if text == "-0" else text


def fmt_score(value: float) -> str:
    return f"{value:.6f}"


def fmt_accuracy(value: float) -> str:
    return f"accuracy={value:.4f}"


def format_prediction_line(path, prediction: Prediction) -> str:
    return f"{path}\t{prediction.label}\t{fmt_score(prediction.score)}"


def format_error_line(path, reason: str) -> str:
    return f"{path}\tERROR\t{reason}"


def format_confusion_table(cm: ConfusionMatrix) -> str:
    """Aligned table, predicted classes as rows and actual classes as columns."""
    corner = "pred\\actual"
    width = max([len(corner)] + [len(l) for l in cm.labels] + [len(str(c)) for c in cm.cells.ravel()]) + 2
    lines = [fmt(corner, width) + "".join(fmt(l, width, justify="R") for l in cm.labels)]
    for label, row in zip(cm.labels, cm.cells):
        lines.append(fmt(label, width) + "".join(fmt(int(c), width, justify="R") for c in row))
    return "\n".join(lines)


def format_confusion_csv(cm: ConfusionMatrix) -> str:
    """Same matrix as CSV with a `predicted` index column and a header row."""
    return cm.to_frame().to_csv(lineterminator="\n")


def format_evaluation(cm: ConfusionMatrix, csv: bool = False) -> str:
    body = format_confusion_csv(cm).rstrip("\n") if csv else format_confusion_table(cm)
    return body + "\n" + fmt_accuracy(cm.accuracy()) + "\n"
