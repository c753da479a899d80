"""evoloop: iterative self-evolution for tool-calling agents.

Sample trajectories from a simulated multi-API environment, score them with
a critic, keep the top fraction (minus anything used before), fine-tune the
actor on action-masked sequences mixed 1:1 with general chat data, and
repeat — improving evaluation accuracy across iterations without expert
trajectories or decisive environment rewards.
"""

__version__ = "0.1.0"
