"""Exception types shared across the pipeline."""


class MuseItError(Exception):
    """Base class for every error raised by this package."""


class EmptyQuery(MuseItError):
    """A search query was empty after trimming."""


class TransportError(MuseItError):
    """Network failure or HTTP status >= 500."""


class TransportTimeout(TransportError):
    """A single request exceeded its time budget."""


class AuthError(TransportError):
    """HTTP 401/403 from an upstream API."""


class FixtureMiss(TransportError):
    """Replay transport had no recorded entry for a request."""


class SubredditNotFound(MuseItError):
    """HTTP 404 for a subreddit search."""


class PostDeleted(MuseItError):
    """The post behind a comment fetch no longer exists."""


class MalformedUrl(MuseItError):
    """Input string is not syntactically a URL."""


class LexiconMissing(MuseItError):
    """Default lexicon assets were not found at the configured path."""


class ParseError(MuseItError):
    """Malformed input file; carries position information when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class NegativeWeight(ParseError):
    """A lexicon row carried a negative weight."""


class BackendFailure(MuseItError):
    """A classifier backend failed; carries the post id for job bookkeeping."""

    def __init__(self, post_id, cause):
        self.post_id = post_id
        self.cause = cause
        super().__init__(f"backend failure for post {post_id!r}: {cause}")


class CorpusTooSmall(MuseItError):
    """Fewer than two non-empty documents."""


class DegenerateCorpus(MuseItError):
    """Every document embedded to the zero vector."""


class TooFewTopics(MuseItError):
    """Dendrogram/projection need at least two topics."""


class MissingAnnotations(MuseItError):
    """A label-attribute trend was requested without annotations."""


class CorruptCacheFile(MuseItError):
    """A metadata cache file could not be parsed; quarantined as *.bad."""


class DuplicatePrimaryKey(MuseItError):
    """Two rows shared a reddit_post_id."""


class JobFailed(MuseItError):
    """Fatal pipeline condition (auth failure, disk full)."""
