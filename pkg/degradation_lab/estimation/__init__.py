from .profile import concentrate_scale, full_loglik, profile_loglik, scale_terms
from .fit import fit
