#
# Copyright 2026 The Datamarket Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""Python interface to the datamarket broker library."""

from ._datamarket import (
    DatamarketError,
    baseline_prices,
    classification_accuracy,
    exact_shapley,
    generate_survey,
    maximize_revenue,
    monte_carlo_shapley,
    noise_scales,
    run_manifest,
    solution_space_sizes,
    solve_bcmvp,
    train_dp_erm,
)

__all__ = [
    "DatamarketError",
    "baseline_prices",
    "classification_accuracy",
    "exact_shapley",
    "generate_survey",
    "maximize_revenue",
    "monte_carlo_shapley",
    "noise_scales",
    "run_manifest",
    "solution_space_sizes",
    "solve_bcmvp",
    "train_dp_erm",
]
