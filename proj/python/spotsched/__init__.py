# Copyright 2026 The spotsched Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Cost-aware workflow scheduling on spot and on-demand clusters.

Cluster specs, workflows and workload configs are plain dicts in the same
layout as the JSON config files.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    Error,
    InvalidAction,
    InvalidState,
    LayoutError,
    NoFeasibleAction,
    discounted_returns,
    masked_softmax,
    ppo_clip_objective,
)

__all__ = [
    "ConfigError",
    "Environment",
    "Error",
    "InvalidAction",
    "InvalidState",
    "LayoutError",
    "NoFeasibleAction",
    "compare",
    "default_workload_config",
    "discounted_returns",
    "generate_workload",
    "masked_softmax",
    "ppo_clip_objective",
    "run_baseline",
    "table_one_cluster",
    "train",
]


def table_one_cluster(interruption_rate_per_hour=0.5):
    return json.loads(_core.table_one_cluster(interruption_rate_per_hour))


def default_workload_config():
    return json.loads(_core.default_workload_config())


def generate_workload(config=None):
    config = default_workload_config() if config is None else config
    return [json.loads(wf) for wf in _core.generate_workload(json.dumps(config))]


class Environment:
    """Step-wise simulator: each step places the pending task on a node index."""

    def __init__(self, restrict_to=None):
        self._env = _core.Environment(restrict_to)

    def reset(self, cluster, workload, seed):
        return self._env.reset(json.dumps(cluster), [json.dumps(wf) for wf in workload], seed)

    def step(self, node):
        return self._env.step(node)

    @property
    def done(self):
        return self._env.done

    @property
    def now(self):
        return self._env.now

    def stats(self):
        return self._env.stats()


def run_baseline(name, cluster, workload, seed):
    return _core.run_baseline(name, json.dumps(cluster), [json.dumps(wf) for wf in workload], seed)


def train(cluster=None, workload_config=None, episodes=300, seed=0):
    """Returns (checkpoint_json_text, learning_curve_csv_text)."""
    cluster = table_one_cluster() if cluster is None else cluster
    workload_config = default_workload_config() if workload_config is None else workload_config
    return _core.train(json.dumps(cluster), json.dumps(workload_config), episodes, seed)


def compare(schedulers, seeds, cluster=None, workload_config=None, checkpoint=None):
    """Returns (summaries sorted by mean cost, comparison_csv_text)."""
    cluster = table_one_cluster() if cluster is None else cluster
    workload_config = default_workload_config() if workload_config is None else workload_config
    return _core.compare(json.dumps(cluster), json.dumps(workload_config), list(schedulers), list(seeds), checkpoint)
