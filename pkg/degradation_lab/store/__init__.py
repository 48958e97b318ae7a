from .store_base import StoreBase
from .files.flat_file_store import FlatFileStore, config_hash
