try:  # pragma: no cover
    # Try importlib.metadata first (available in Python 3.8+)
    from importlib.metadata import version

    __version__ = version("mlag.killing-fields")
except Exception:  # pragma: no cover
    __version__ = "unknown"
