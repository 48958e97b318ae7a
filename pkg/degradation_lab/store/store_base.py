# store/store_base.py
#
# Defines a base class for a result store
from abc import ABC, abstractmethod


class StoreBase(ABC):
    def __init__(self):
        super().__init__()

    # INPUTS ==========================================================================================================

    @abstractmethod
    def read_observations(self, path, n_units=None):
        pass

    @abstractmethod
    def read_document(self, path, schema):
        pass

    @abstractmethod
    def read_plotdata(self, path):
        pass

    # OUTPUTS =========================================================================================================

    @abstractmethod
    def write_observations(self, path, data):
        pass

    @abstractmethod
    def write_paths(self, path, paths, units, grid):
        pass

    @abstractmethod
    def write_reliability(self, path, units, horizons, curves):
        pass

    @abstractmethod
    def write_matrix(self, path, matrix):
        pass

    @abstractmethod
    def write_trace(self, path, trace, columns):
        pass

    @abstractmethod
    def write_error_table(self, path, table):
        pass

    @abstractmethod
    def write_plotdata(self, path, frame):
        pass

    @abstractmethod
    def write_document(self, path, document):
        pass

    @abstractmethod
    def write_metadata(self, path, config, seed, **extra):
        pass

    # TRUTH CACHE =====================================================================================================

    @abstractmethod
    def read_truth(self, config_hash):
        pass

    @abstractmethod
    def write_truth(self, config_hash, units, horizons, curves):
        pass
