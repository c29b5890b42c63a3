"""The nine layout classes and their stable integer codes."""

CLASS_LABELS = (
    "abstract",
    "algorithm",
    "author",
    "body-text",
    "caption",
    "equation",
    "figure",
    "table",
    "title",
)

LABEL_TO_ID = {name: i for i, name in enumerate(CLASS_LABELS)}
ID_TO_LABEL = dict(enumerate(CLASS_LABELS))

# classes whose content is an image asset rather than generated text
VISUAL_CLASSES = ("figure", "table", "algorithm", "equation")

# classes eligible for label-noise injection (everything but body-text)
NOISE_ELIGIBLE = tuple(c for c in CLASS_LABELS if c != "body-text")


def label_id(name):
    try:
        return LABEL_TO_ID[name]
    except KeyError:
        raise ValueError(f"unknown class label: {name!r}") from None
