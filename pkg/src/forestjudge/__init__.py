"""forestjudge: interactive disambiguation of ambiguous parse forests.

A sentence with many competing analyses is judged by deciding a few
discriminant properties; a propagation engine infers the rest.  Includes
corpus persistence with merge across coverage changes, POS-sequence
propagation, automatic resolution from corpus statistics, suspect detection,
a small chart parser for ambiguous fixtures, an HTTP annotation service and
a command-line interface.
"""

from importlib import resources

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled data file (grammar, class map, sample sentences)."""
    return resources.files(__package__) / "data" / name


BUNDLED_GRAMMAR = "atis.grammar"
BUNDLED_CLASSES = "classes.tsv"
BUNDLED_SENTENCES = "sentences.txt"
