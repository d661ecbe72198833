"""Exception hierarchy shared by all emoarc modules."""


class EmoarcError(Exception):
    """Base class for every error raised by this package."""


class IngestError(EmoarcError):
    pass


class DecodeError(IngestError):
    """Raw book bytes are not valid UTF-8."""


class MarkerOrderError(IngestError):
    """The Gutenberg end marker appears before the start marker."""


class ParseError(EmoarcError):
    """Malformed input line; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)


class LexiconError(EmoarcError):
    pass


class DuplicateError(LexiconError):
    def __init__(self, duplicates):
        self.duplicates = list(duplicates)
        shown = ", ".join(f"{lemma}/{emotion}" for lemma, emotion in self.duplicates[:10])
        more = "" if len(self.duplicates) <= 10 else f" (+{len(self.duplicates) - 10} more)"
        super().__init__(f"duplicate (lemma, emotion) rows: {shown}{more}")


class UnknownEmotionError(LexiconError):
    pass


class RangeError(LexiconError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class MissingLemmaError(LexiconError):
    pass


class EmbeddingError(EmoarcError):
    pass


class EmptyVocabError(EmbeddingError):
    pass


class ZeroVectorError(EmbeddingError):
    pass


class DimError(EmbeddingError):
    pass


class EmptyDocumentError(EmoarcError):
    pass


class ChunkingError(EmoarcError):
    pass


class ConfigError(EmoarcError):
    pass
