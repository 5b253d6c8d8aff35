"""Off-policy hierarchical reinforcement learning laboratory."""
