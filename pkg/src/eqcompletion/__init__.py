"""Finite verification engine for elementary doctrines and their completions."""
from .fincat import CatWindow, FunctorData, ProductCell, ProductUndefined, WindowError, check_category, check_functor
from .infsl import InfSemilattice, InfSLHom, check_hom, check_infsl, meet, sub_infsl
from .doctrine import (Doctrine, Doctrine2Cell, DoctrineArrow, boxtimes, check_doctrine, check_elementary,
                       check_one_arrow, check_two_arrow, enumerate_one_arrows, exists_along_diagonal,
                       exists_along_e)
from .report import Report

__version__ = "0.1.0"
