# Figures the command line can produce
FIGURE_NAMES = (
    'pxn',
    'density',
    'window-convergence',
    'rates',
    'equiv-efficiency',
    'point-query',
    'detector-comparison',
)

OUTPUT_FORMATS = ('csv', 'json')

# Per-figure defaults, layered over DETECTOR_DEFAULTS; grid axes use start:stop:count[:log]
FIGURE_DEFAULTS = {
    'pxn': {
        'n_values': [0, 1, 2, 3, 4, 5],
        'grid': {'x': '-8:8:801'},
    },
    'density': {
        'p': 4,
        'n_values': list(range(9)),
        'grid': {'x': '-6:6:241'},
    },
    'window-convergence': {
        'p_values': [1, 2, 4],
        'w_max': 4,
    },
    'rates': {
        'rates': [0.05, 0.1, 0.2, 0.4],
        'p_max': 6,
    },
    'equiv-efficiency': {
        'p': 1,
        'w': 3,  # labels 0..4 around p = 1
        'grid': {'delta': '0.01:1.0:30:log', 'eta': '0.9:1.0:21'},
    },
    'point-query': {},
    'detector-comparison': {
        'p_values': [1, 2, 3, 4],
        'grid': {'eta': '0.9:1.0:11'},
    },
}

# Grid axes each figure reads
FIGURE_AXES = {
    'pxn': ('x',),
    'density': ('x',),
    'window-convergence': (),
    'rates': (),
    'equiv-efficiency': ('delta', 'eta'),
    'point-query': (),
    'detector-comparison': ('eta',),
}

# Column order of every emitted table
TABLE_COLUMNS = {
    'pxn': ['n', 'x', 'density'],
    'density': ['n', 'x', 'density'],
    'window-convergence': ['p', 'w', 'fidelity_change'],
    'rates': ['rate', 'p', 'delta', 'fidelity'],
    'equiv-efficiency': ['delta', 'eta', 'eta_ideal'],
    'detector-comparison': ['p', 'eta', 'pad_fidelity', 'ideal_fidelity'],
}


def ensure_directories(directory):
    """Ensure the output directory exists."""
    directory.mkdir(parents=True, exist_ok=True)
    return directory
