"""
bpcover Utilities Package

Contains seeded model generators for the test corpora and the catalog of
bundled example models.
"""

from .random_models import (
    protocol_corpus,
    random_phase_bounded,
    random_protocol,
    random_vass,
    scaled,
    vass_corpus
)
from .model_library import (
    ModelLibrary,
    UnknownModelError,
    get_model_library,
    load_example
)

__all__ = [
    'protocol_corpus',
    'random_phase_bounded',
    'random_protocol',
    'random_vass',
    'scaled',
    'vass_corpus',
    'ModelLibrary',
    'UnknownModelError',
    'get_model_library',
    'load_example'
]
