"""Regenerate the shipped spelling dictionary and familiar-word list.

Both lists are derived from the English frequency table bundled with the
``pyspellchecker`` wheel (MIT licensed). Only purely alphabetic entries are
kept. The wheel is needed only to run this script, never at runtime.

    pip download --no-deps -d /tmp/wheels pyspellchecker==0.9.0
    python scripts/build_wordlists.py /tmp/wheels/pyspellchecker-0.9.0-py3-none-any.whl
"""

import gzip
import json
import sys
import zipfile
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "redorank" / "data"
FAMILIAR_SIZE = 3000


def main(wheel: str) -> None:
    with zipfile.ZipFile(wheel) as zf:
        freq = json.loads(gzip.decompress(zf.read("spellchecker/resources/en.json.gz")))
    words = {w: f for w, f in freq.items() if w.isascii() and w.isalpha()}

    # mtime=0 keeps the archive byte-stable across rebuilds
    body = "".join(w + "\n" for w in sorted(words)).encode("utf-8")
    with open(DATA / "en_words.txt.gz", "wb") as raw:
        with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as gz:
            gz.write(body)

    ranked = sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))
    familiar = sorted(w for w, _ in ranked[:FAMILIAR_SIZE] if len(w) > 1 or w in ("a", "i"))
    (DATA / "familiar_words.txt").write_text("".join(w + "\n" for w in familiar), encoding="utf-8")
    print(f"dictionary: {len(words)} words, familiar: {len(familiar)} words")


if __name__ == "__main__":
    main(sys.argv[1])
