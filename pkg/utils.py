"""
Utility functions and error handling for the GTL toolkit
"""
import json
import logging
import traceback
from dataclasses import dataclass
from fractions import Fraction
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class GTLError(Exception):
    """Base exception for toolkit errors"""
    pass


class ConfigurationError(GTLError):
    """Configuration-related errors"""
    pass


class FormulaSyntaxError(GTLError):
    """Concrete syntax errors, located by 1-based line and column"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ModelFormatError(GTLError):
    """Malformed model, quasimodel or proof files"""
    pass


class ModelError(GTLError):
    """A model violates one of its semantic invariants"""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class ClosureError(GTLError):
    """Formula outside the closure set, or mismatched closure sets"""
    pass


class BudgetExceededError(GTLError):
    """Closure set larger than the configured search budget"""

    def __init__(self, size: int, budget: int):
        super().__init__(f"|Sigma| = {size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


class ProofError(GTLError):
    """Structurally malformed proofs"""
    pass


class InternalError(GTLError):
    """A self-check of the toolkit failed"""
    pass


@dataclass(frozen=True)
class Violation:
    """First failing condition found by a check, with the worlds and formula involved"""
    condition: str
    worlds: Tuple[Any, ...] = ()
    formula: Optional[Any] = None
    message: str = ''

    def __str__(self) -> str:
        parts = [f"violation {self.condition}"]
        if self.worlds:
            parts.append(f"worlds={','.join(str(w) for w in self.worlds)}")
        if self.formula is not None:
            parts.append(f"formula={self.formula}")
        if self.message:
            parts.append(f"({self.message})")
        return ' '.join(parts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'condition': self.condition,
            'worlds': [str(w) for w in self.worlds],
            'formula': None if self.formula is None else str(self.formula),
            'message': self.message,
        }


def error_handler(exit_code: int = 2, log_error: bool = True):
    """
    Decorator for CLI handlers: toolkit errors become an exit code

    Args:
        exit_code: Exit code returned when a handled error occurs
        log_error: Whether to log the error
    """
    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            try:
                return func(*args, **kwargs)
            except (GTLError, OSError) as e:
                if log_error:
                    logger.error(f"Error in {func.__name__}: {e}")
                    logger.debug(f"Traceback: {traceback.format_exc()}")
                return exit_code
        return wrapper
    return decorator


def setup_logging(level: Union[str, int] = 'INFO') -> None:
    """Configure root logging once for command-line use"""
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


def load_json_file(path: Union[str, Path]) -> Any:
    """
    Read a JSON document

    Raises:
        ModelFormatError: If the file cannot be read or is not valid JSON
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ModelFormatError(f"No such file: {path}") from e
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    except UnicodeDecodeError as e:
        raise ModelFormatError(f"{path}: not UTF-8 text at byte {e.start}") from e


def load_text_file(path: Union[str, Path]) -> str:
    """
    Read a UTF-8 text file, stripped of surrounding whitespace

    Raises:
        ModelFormatError: If the file is missing or not UTF-8 text
    """
    try:
        return Path(path).read_text(encoding='utf-8').strip()
    except FileNotFoundError as e:
        raise ModelFormatError(f"No such file: {path}") from e
    except UnicodeDecodeError as e:
        raise ModelFormatError(f"{path}: not UTF-8 text at byte {e.start}") from e


def save_json_file(data: Any, path: Union[str, Path]) -> str:
    """Write a JSON document, creating parent directories; returns the path"""
    filepath = Path(path)
    if filepath.parent and not filepath.parent.exists():
        filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, default=str)
    logger.info(f"Wrote {filepath}")
    return str(filepath)


def parse_rational(value: Any) -> Fraction:
    """
    Parse an exact rational from "num/den", an integer, or a decimal string

    Raises:
        ModelFormatError: For floats, booleans and unparseable text
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ModelFormatError(f"Truth values must be exact, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ModelFormatError(f"Not a rational: {value!r}") from e
    raise ModelFormatError(f"Not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render a rational as "num/den", or as an integer when whole"""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
