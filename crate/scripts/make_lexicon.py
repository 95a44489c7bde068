"""Convert the upstream VADER lexicon (token, mean, std, ratings) to the two-column TSV shipped with the crate."""
import sys
from pathlib import Path

import vaderSentiment

src = Path(vaderSentiment.__file__).parent / "vader_lexicon.txt"
out = Path(sys.argv[1])
with out.open("w", encoding="utf-8") as f:
    f.write("# VADER sentiment lexicon (mean valence column only).\n")
    f.write("# Source: vaderSentiment 3.3.2, MIT License, (c) 2014 C.J. Hutto.\n")
    for line in src.read_text(encoding="utf-8").rstrip("\n").split("\n"):
        if not line:
            continue
        token, mean = line.strip().split("\t")[0:2]
        f.write(f"{token}\t{mean}\n")
