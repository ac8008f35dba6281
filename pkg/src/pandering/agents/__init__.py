from .dqn import DQNAgent, ReplayBuffer, TrainConfig, TrainingDiverged, epsilon_greedy, greedy_action, td_loss
from .network import MLP, Adam
from .policies import (
    BASELINES,
    ConstantBudgetPolicy,
    DQNPolicy,
    GreedyPolicy,
    HonestPolicy,
    RandomPolicy,
    RandomSolverPolicy,
    baseline_policy,
    decode_joint_action,
    encode_joint_action,
    joint_action_count,
)
