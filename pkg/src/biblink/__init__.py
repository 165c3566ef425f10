# Marks src/biblink as python package

__version__ = "0.1.0"
