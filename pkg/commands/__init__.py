# One module per polyspec subcommand, each with add_arguments(parser) and run(args)
from . import bounds
from . import fourier_check
from . import lemma1_fuzz
from . import run

__all__ = ['bounds', 'fourier_check', 'lemma1_fuzz', 'run']
