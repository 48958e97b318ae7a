from .discrepancy import phi, wd2
from .spatial import Design, optimize_design, swap_neighbor
from .scores import AugmentedVector, augmented_loglik, score_alpha, score_gamma
from .temporal import criterion, fim, next_epoch_time, next_time
