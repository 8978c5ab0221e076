from .plotting import (
    PlotSpec,
    Row,
    cell_eligible,
    group_cells,
    log_ratio_density,
    read_rows,
    render_ratio_densities,
)

__version__ = "0.1.0"
