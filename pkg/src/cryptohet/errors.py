"""Exception hierarchy.

Every error carries a distinct ``exit_code`` which the CLI returns verbatim,
so scripts can branch on failure kind without parsing messages.
"""


class CryptohetError(Exception):
    exit_code = 1


# price series / panels
class NonPositivePrice(CryptohetError):
    exit_code = 10


class DuplicateDate(CryptohetError):
    exit_code = 11


class OutOfOrderDate(CryptohetError):
    exit_code = 12


class TooShort(CryptohetError):
    exit_code = 13


class InvalidDate(CryptohetError):
    exit_code = 14


class EmptyIntersection(CryptohetError):
    exit_code = 20


class DuplicateCoin(CryptohetError):
    exit_code = 21


# correlation
class ZeroVariance(CryptohetError):
    exit_code = 30


class InsufficientOverlap(CryptohetError):
    exit_code = 31


class TooFewCoins(CryptohetError):
    exit_code = 32


class DegenerateAnchor(CryptohetError):
    exit_code = 33


class OutOfRange(CryptohetError):
    exit_code = 34


class AnchorMissing(CryptohetError):
    exit_code = 35


# concentration / indicators
class AllZero(CryptohetError):
    exit_code = 40


class NegativeValue(CryptohetError):
    exit_code = 41


class UnknownIndicator(CryptohetError):
    exit_code = 42


class NothingToBin(CryptohetError):
    exit_code = 43


class InvalidSnapshot(CryptohetError):
    exit_code = 44


# ingestion
class FileUnreadable(CryptohetError):
    exit_code = 50


class MalformedRow(CryptohetError):
    exit_code = 51

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NetworkError(CryptohetError):
    exit_code = 52


class SchemaMismatch(CryptohetError):
    exit_code = 53


class ConfigError(CryptohetError):
    exit_code = 54


class InvalidParameter(CryptohetError):
    exit_code = 60
