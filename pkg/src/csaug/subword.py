"""WordPiece segmentation and model-input assembly.

Words are segmented by greedy longest-match-first search against a fixed
vocabulary: at each position the longest matching piece wins, word-internal
positions match with the continuation prefix ("##aff"), and a word with no
match at any position, or longer than max_word_chars, falls back to the
single unknown piece. No lowercasing or unicode normalization happens here;
the vocabulary is taken exactly as loaded.

encode_instance assembles [CLS] seg1 [SEP] (seg2 [SEP] for pairs), caps the
result at max_len pieces, and maps every surviving word to the position of
its first piece, the position sequence-labeling consumers read a word's
representation from.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import Instance
from .errors import ConfigError, DataError

CLS_PIECE = "[CLS]"
SEP_PIECE = "[SEP]"


@dataclass(slots=True)
class WordPieceVocab:
    pieces: tuple[str, ...]
    piece_ids: dict[str, int]
    unk_piece: str = "[UNK]"
    continuation_prefix: str = "##"
    max_word_chars: int = 100

    def __contains__(self, piece: str) -> bool:
        return piece in self.piece_ids

    def __len__(self) -> int:
        return len(self.pieces)


def load_vocab(
    lines: Iterable[str],
    unk_piece: str = "[UNK]",
    continuation_prefix: str = "##",
    max_word_chars: int = 100,
) -> WordPieceVocab:
    """Load a one-piece-per-line vocabulary; line index is the piece id."""
    if not continuation_prefix:
        raise ConfigError("continuation_prefix must be non-empty")
    pieces: list[str] = []
    ids: dict[str, int] = {}
    for lineno, line in enumerate(lines, start=1):
        piece = line.rstrip("\r\n")
        if not piece:
            raise DataError(f"vocab line {lineno}: empty piece")
        if piece in ids:
            raise DataError(f"vocab line {lineno}: duplicate piece {piece!r}")
        ids[piece] = len(pieces)
        pieces.append(piece)
    if unk_piece not in ids:
        raise DataError(f"vocabulary does not contain the unknown piece {unk_piece!r}")
    return WordPieceVocab(tuple(pieces), ids, unk_piece, continuation_prefix, max_word_chars)


def load_vocab_file(path: str | Path, **kwargs) -> WordPieceVocab:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as handle:
            return load_vocab(handle, **kwargs)
    except OSError as exc:
        raise ConfigError(f"cannot read vocab file {path}: {exc}") from exc


def wordpiece_tokenize(word: str, vocab: WordPieceVocab) -> list[str]:
    """Greedy longest-match segmentation of one word; [UNK] fallback is total."""
    if not word:
        raise ValueError("cannot tokenize an empty word")
    if len(word) > vocab.max_word_chars:
        return [vocab.unk_piece]
    ids = vocab.piece_ids
    prefix = vocab.continuation_prefix
    pieces: list[str] = []
    start = 0
    length = len(word)
    while start < length:
        end = length
        found = None
        while end > start:
            candidate = word[start:end]
            if start > 0:
                candidate = prefix + candidate
            if candidate in ids:
                found = candidate
                break
            end -= 1
        if found is None:
            return [vocab.unk_piece]
        pieces.append(found)
        start = end
    return pieces


@dataclass(slots=True)
class SubwordEncoding:
    pieces: tuple[str, ...]
    word_to_first_piece: dict[tuple[int, int], int]
    truncated: bool

    def piece_id_list(self, vocab: WordPieceVocab) -> list[int]:
        return [vocab.piece_ids[piece] for piece in self.pieces]


def encode_instance(
    instance: Instance, vocab: WordPieceVocab, max_len: int = 512
) -> SubwordEncoding:
    """Assemble the special-token-framed piece sequence for one instance.

    Oversized assemblies are trimmed piece by piece from the end of the
    currently longest segment (ties go to the later segment) until the cap
    fits, which keeps the pair structure intact. A word stays in the
    alignment map as long as its first piece survives.
    """
    if max_len < 4:
        raise ConfigError(f"max_len must be >= 4, got {max_len}")

    # Per segment, per word, that word's piece list; truncation pops pieces
    # from the tail so a surviving word always keeps a prefix of its pieces.
    segmented: list[list[list[str]]] = [
        [wordpiece_tokenize(token.surface, vocab) for token in segment]
        for segment in instance.segments
    ]
    seg_lengths = [sum(len(p) for p in words) for words in segmented]
    total = 1 + sum(length + 1 for length in seg_lengths)

    truncated = False
    while total > max_len:
        truncated = True
        longest = max(range(len(seg_lengths)), key=lambda i: (seg_lengths[i], i))
        if seg_lengths[longest] == 0:
            break
        words = segmented[longest]
        words[-1].pop()
        if not words[-1]:
            words.pop()
        seg_lengths[longest] -= 1
        total -= 1

    pieces: list[str] = [CLS_PIECE]
    alignment: dict[tuple[int, int], int] = {}
    for seg_i, words in enumerate(segmented):
        for tok_i, word_pieces in enumerate(words):
            if word_pieces:
                alignment[(seg_i, tok_i)] = len(pieces)
                pieces.extend(word_pieces)
        pieces.append(SEP_PIECE)
    return SubwordEncoding(tuple(pieces), alignment, truncated)


def encoding_to_obj(
    encoding: SubwordEncoding,
    instance_id: str,
    vocab: WordPieceVocab | None = None,
) -> dict:
    """JSONL form of an encoding; piece ids are included when a vocab is given."""
    obj: dict = {
        "id": instance_id,
        "pieces": list(encoding.pieces),
        "alignment": [
            [seg, tok, pos] for (seg, tok), pos in sorted(encoding.word_to_first_piece.items())
        ],
        "truncated": encoding.truncated,
    }
    if vocab is not None:
        obj["piece_ids"] = encoding.piece_id_list(vocab)
    return obj
