from pathlib import Path

MODELS_DIR = Path(__file__).parent / "models"

bundled_models = {
    "phi3": MODELS_DIR / "phi3.toml",
    "phi4": MODELS_DIR / "phi4.toml",
}

# (model, leg counts) exercised by the oracle suite
oracle_cases = [
    ("phi3", (0, 1, 2, 3)),
    ("phi4", (0, 2, 4)),
]


def model_path(name: str) -> Path:
    """Path of a bundled model by name, or `name` itself when it is a file path."""
    if name in bundled_models:
        return bundled_models[name]
    return Path(name)
