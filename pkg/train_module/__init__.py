from train_module.objective import TrainSample, loss, model_loss, sample_training_pairs
from train_module.trainer import RunArtifacts, TrainConfig, TrainingDivergedError, time_sweep, train


__all__ = [
    "RunArtifacts",
    "TrainConfig",
    "TrainSample",
    "TrainingDivergedError",
    "loss",
    "model_loss",
    "sample_training_pairs",
    "time_sweep",
    "train",
]
