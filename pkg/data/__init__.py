from .bundled import bundled_models, model_path, oracle_cases

__all__ = ["bundled_models", "model_path", "oracle_cases"]
