from .cholesky import cholesky_factor, stable_mvn_quadform_logdet
from .kernel import KernelMatrix, kernel_inverse, kernel_logdet
from .rank_one import RankOneCovariance, rank_one_inverse, rank_one_logdet
from .block import BlockTridiagonalFactor
