"""Paraphrasing prompt templates, shipped as data.

Each template has exactly one ``{text}`` placeholder.  The "basic" prompt
is the plain context-agnostic instruction used for in-distribution data;
the remaining four are progressively more elaborate variants intended for
generalization testing against prompt diversity.
"""

PROMPT_TEMPLATES: dict[str, str] = {
    "basic": "Paraphrase the following text:\n\n{text}",
    "fluent": (
        "Rewrite the following text so it reads naturally and fluently while "
        "keeping the original meaning intact:\n\n{text}"
    ),
    "vocabulary": (
        "Paraphrase the following text using different vocabulary wherever "
        "possible. Replace words with synonyms and vary the phrasing, but do "
        "not change the meaning:\n\n{text}"
    ),
    "restructure": (
        "Paraphrase the following text by restructuring its sentences: change "
        "clause order, split or merge sentences, and switch between active and "
        "passive voice where natural, while preserving all information:\n\n{text}"
    ),
    "elaborate": (
        "Thoroughly rewrite the following text. Use fresh wording, new sentence "
        "structures, and a polished style so that the rewrite shares as little "
        "surface form with the original as possible while remaining faithful "
        "to its meaning and level of detail:\n\n{text}"
    ),
}

DEFAULT_PROMPT_ID = "basic"
