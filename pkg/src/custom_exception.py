"""
custom_exception.py
-------------------
Exception hierarchy for the coin-toss π project.

Every error raised by the library derives from `CustomException`, which
keeps the plain message and a detailed message carrying the file name and
line number where the failure happened. The CLI maps the subclasses onto
exit codes:

- `InvalidInputError`        -> exit 1 (usage / precondition error)
- `InvariantViolationError`  -> exit 2 (oracle/analytics mismatch)

Usage
-----
Example (within any module):

    from src.custom_exception import CustomException, InvalidInputError
    import sys

    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")

    try:
        table.extend_to(k)
    except Exception as e:
        raise CustomException("Failed to extend tau table", sys) from e
"""

from __future__ import annotations

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import inspect
import os
import sys
from typing import Any, Optional


# -------------------------------------------------------------------
# Base Exception Class
# -------------------------------------------------------------------
class CustomException(Exception):
    """
    Base project exception with file/line context.

    Parameters
    ----------
    error_message : str
        The original error message.
    error_detail : module, optional
        The `sys` module, used to read the active traceback. When no
        exception is being handled the raising frame is used instead.

    Attributes
    ----------
    message : str
        The plain message, suitable for end users.
    error_message : str
        The message prefixed with file name and line number.
    """

    def __init__(self, error_message: str, error_detail: Any = sys):
        super().__init__(error_message)
        self.message = error_message
        self.error_message = self.get_detailed_error_message(error_message, error_detail)

    # -------------------------------------------------------------------
    # Static Method: Error Message Formatter
    # -------------------------------------------------------------------
    @staticmethod
    def get_detailed_error_message(error_message: str, error_detail: Any = sys) -> str:
        """
        Builds "Error in <file>, line <n>: <message>".

        The location comes from the traceback being handled if there is
        one, otherwise from the first frame outside this module.
        """
        exc_tb = None
        if error_detail is not None and hasattr(error_detail, "exc_info"):
            _, _, exc_tb = error_detail.exc_info()

        if exc_tb is not None:
            file_name = exc_tb.tb_frame.f_code.co_filename
            line_number = exc_tb.tb_lineno
        else:
            here = os.path.abspath(__file__)
            frame = inspect.currentframe()
            while frame is not None and os.path.abspath(frame.f_code.co_filename) == here:
                frame = frame.f_back
            file_name = frame.f_code.co_filename if frame is not None else "<unknown>"
            line_number = frame.f_lineno if frame is not None else 0
            del frame

        return f"Error in {file_name}, line {line_number}: {error_message}"

    def __str__(self) -> str:
        return self.error_message


# -------------------------------------------------------------------
# Domain Subclasses
# -------------------------------------------------------------------
class InvalidInputError(CustomException):
    """A precondition of an operation was violated by its caller."""


class InvariantViolationError(CustomException):
    """
    An internal invariant failed, e.g. the oracle disagreed with analytics.

    Parameters
    ----------
    error_message : str
        Description of the mismatch.
    record : Any, optional
        Structured evidence (a comparison record) attached for reporting.
    """

    def __init__(self, error_message: str, record: Optional[Any] = None, error_detail: Any = sys):
        super().__init__(error_message, error_detail)
        self.record = record


class BitSourceExhaustedError(CustomException):
    """A scripted bit sequence ran out before the caller was done with it."""
