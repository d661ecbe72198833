"""Deterministic synthetic Gutenberg-style books for tests."""

import random

LEXICON_WORDS = [
    "ilo", "rakkaus", "onni", "toivo", "pelko", "kauhu", "suru", "itku", "viha", "raivo",
    "inho", "lika", "luottamus", "ystävä", "aurinko", "koti", "taivas", "kirkas", "valkoinen",
    "odottaa", "kuolema", "pimeä",
]
FILLER = [
    "talo", "mies", "vaimo", "metsä", "tie", "juna", "asema", "kylä", "pelto", "järvi", "vesi",
    "puu", "lumi", "talvi", "kesä", "päivä", "yö", "aamu", "ilta", "matka", "hevonen", "lehmä",
    "pappi", "kirkko", "raha", "leipä", "kahvi", "sauna", "pihlaja", "harakka", "kuusi", "mäki",
    "ja", "että", "se", "hän", "oli", "ei", "niin", "kun", "mutta", "vain", "sitten", "jo",
]


def sentence(rng, emotional=0.12, words=None):
    n = rng.randint(5, 14)
    out = []
    for _ in range(n):
        if rng.random() < emotional:
            out.append(rng.choice(words or LEXICON_WORDS))
        else:
            out.append(rng.choice(FILLER))
    out[0] = out[0].capitalize()
    return " ".join(out) + rng.choice([".", ".", ".", "!", "?"])


def body(rng, chapters=5, paragraphs=6, emotional=0.12, heading="roman"):
    romans = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII"]
    parts = []
    for c in range(chapters):
        if heading == "roman":
            parts.append(f"{romans[c]}.")
        elif heading == "luku":
            parts.append(f"{romans[c]} LUKU")
        parts.append("")
        for _ in range(paragraphs):
            parts.append(" ".join(sentence(rng, emotional) for _ in range(rng.randint(3, 6))))
            parts.append("")
    return "\n".join(parts)


def gutenberg_book(seed, title="Testikirja", author="Maija Meikäläinen", year=1890, chapters=5,
                   paragraphs=6, emotional=0.12, variant="the", language="Finnish"):
    rng = random.Random(seed)
    start = {
        "the": f"*** START OF THE PROJECT GUTENBERG EBOOK {title.upper()} ***",
        "this": f"*** START OF THIS PROJECT GUTENBERG EBOOK {title.upper()} ***",
        "tight": f"***START OF THE PROJECT GUTENBERG EBOOK {title.upper()}***",
        "lower": f"*** start of the project gutenberg ebook {title.lower()} ***",
    }[variant]
    end = start.replace("START", "END").replace("start", "end")
    header = [
        f"The Project Gutenberg EBook of {title}, by {author}",
        "",
        "This eBook is for the use of anyone anywhere at no cost.",
        "",
        f"Title: {title}",
        "",
        f"Author: {author}",
        "",
        "Release Date: March 1, 2004 [EBook #11537]",
        "",
        f"Language: {language}",
        "",
    ]
    if year is not None:
        header += [f"Original publication: Porvoo: WSOY, {year}", ""]
    text = "\n".join(header) + "\n" + start + "\n\n" + body(rng, chapters, paragraphs, emotional) + "\n" + end + "\n\nEnd of license.\n"
    return text


def planted_corpus(seed=0, n=600):
    """X and Y share every context; Z lives in disjoint contexts."""
    rng = random.Random(seed)
    filler = [f"w{i}" for i in range(50)]
    sents = []
    for _ in range(n):
        k = rng.random()
        f = rng.sample(filler, 4)
        if k < 0.33:
            s = [f[0], "aa", "bb", "X", "cc", "dd", f[1]]
        elif k < 0.66:
            s = [f[0], "aa", "bb", "Y", "cc", "dd", f[1]]
        else:
            s = [f[2], "pp", "qq", "Z", "rr", "ss", f[3]]
        sents.append(" ".join(s) + ".")
    return " ".join(sents)


def random_pair(rng, max_tokens=50, max_entries=20):
    """Random (token list, lexicon rows) pair for scoring oracles."""
    from emoarc.lexicon import DEFAULT_EMOTIONS
    from emoarc.textproc import Token

    vocab = [f"l{i}" for i in range(15)]
    rows = {}
    for _ in range(rng.randint(0, max_entries)):
        rows[(rng.choice(vocab), rng.choice(DEFAULT_EMOTIONS))] = rng.choice(
            [rng.random(), round(rng.random(), 3), 1.0, 0.0]
        )
    tokens = []
    for _ in range(rng.randint(1, max_tokens)):
        if rng.random() < 0.15:
            tokens.append(Token(".", ".", "PUNCT", False))
        else:
            w = rng.choice(vocab)
            tokens.append(Token(w, w, None, True))
    if not any(t.is_word for t in tokens):
        tokens.append(Token("l0", "l0", None, True))
    return tokens, rows


def brute_force_score(tokens, rows, emotions):
    """Per-token exact accumulation; independent of emoarc.arcs."""
    from fractions import Fraction

    raw = {e: Fraction(0) for e in emotions}
    words = 0
    for t in tokens:
        if not t.is_word:
            continue
        words += 1
        for (lemma, emotion), value in rows.items():
            if lemma == t.lemma:
                raw[emotion] += Fraction(value)
    return {e: float(v) for e, v in raw.items()}, {e: float(10000 * v / words) for e, v in raw.items()}, words
