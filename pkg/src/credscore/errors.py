class CredscoreError(Exception):
    exit_code = 1


class DataError(CredscoreError):
    """Malformed input data or schema."""

    exit_code = 3


class ModelError(CredscoreError):
    """Fitting, scoring or persistence failure."""

    exit_code = 4
