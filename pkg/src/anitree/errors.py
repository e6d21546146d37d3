"""Exception types shared across the pipeline."""


class CatalogError(ValueError):
    """Catalog input failed validation (parse error, duplicate id, bad votes)."""


class EmptyHistogramError(CatalogError):
    """A record has zero votes in every category, so no score histogram exists."""


class DimensionError(ValueError):
    """Histogram or category dimensions disagree."""


class NotConnectedError(RuntimeError):
    """The edge stream did not connect all vertices."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach its tolerance."""


class UnknownItemError(LookupError):
    """A queried item id is not present in the catalog."""
