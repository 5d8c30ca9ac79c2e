# processing/__init__.py
