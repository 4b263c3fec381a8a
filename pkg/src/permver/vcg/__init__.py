from .check import check_vc
from .encode import Vc, VcgEncoder, encode_method
