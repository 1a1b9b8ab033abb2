"""File utility functions for tropsev."""

from pathlib import Path
from typing import List


def get_output_filename(base_file: Path, suffix: str = ".svg") -> Path:
    """Generate an output filename that does not overwrite anything.

    Args:
        base_file: Desired file path; its suffix is replaced by ``suffix``
        suffix: Output extension (default: ".svg")

    Returns:
        ``base_file`` with the new suffix, numbered if that name is taken

    Raises:
        ValueError: If the base file has no stem
    """
    if not base_file.stem:
        raise ValueError("Output file must have a valid name")

    output_file = base_file.with_suffix(suffix)

    if output_file.exists():
        output_file = _generate_unique_filename(output_file)

    return output_file


def _generate_unique_filename(base_file: Path) -> Path:
    """Generate unique filename by appending number suffix.

    Args:
        base_file: Base file path

    Returns:
        Path with unique filename
    """
    stem = base_file.stem
    suffix = base_file.suffix

    # Try numbers 1-99
    for i in range(1, 100):
        new_name = f"{stem}_{i}{suffix}"
        candidate = base_file.parent / new_name

        if not candidate.exists():
            return candidate

    raise ValueError(f"Could not generate unique filename for {base_file}")


def validate_file_path(file_path: Path) -> None:
    """Check that an input file exists, is a regular file and is not empty.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the path is not a file or the file is empty
    """
    if not file_path.exists():
        raise FileNotFoundError(f"File not found: {file_path}")

    if not file_path.is_file():
        raise ValueError(f"Path is not a file: {file_path}")

    if not file_path.stat().st_size > 0:
        raise ValueError(f"File is empty: {file_path}")


def read_matrix_file(file_path: Path, encoding: str = "utf-8") -> List[List[str]]:
    """Read a matrix of series literals, one row per line.

    Entries are separated by commas and may be double-quoted. Blank lines and
    lines starting with ``#`` are skipped.

    Args:
        file_path: Path to the matrix file
        encoding: File encoding (default: utf-8)

    Returns:
        Rows of raw entry strings

    Raises:
        ValueError: If the file has no rows or rows of different lengths
    """
    validate_file_path(file_path)
    rows = []
    with open(file_path, encoding=encoding) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(_parse_csv_line(line))

    if not rows:
        raise ValueError(f"No matrix rows found in {file_path}")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ValueError(f"Matrix rows in {file_path} have different lengths: {sorted(widths)}")
    return rows


def _parse_csv_line(line: str) -> List[str]:
    """Parse a single CSV line, handling quoted values.

    Args:
        line: CSV line to parse

    Returns:
        List of parsed values
    """
    if not line:
        return []

    result = []
    current = ""
    in_quotes = False

    for char in line:
        if char == '"':
            in_quotes = not in_quotes
        elif char == "," and not in_quotes:
            result.append(current.strip())
            current = ""
        else:
            current += char

    result.append(current.strip())

    return result
