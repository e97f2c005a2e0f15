# Copyright 2026 The Falsiflow Authors
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

"""Zero-one cost optimal transport tests of incomplete econometric models."""

from ._falsiflow import (
    DENOMINATOR,
    Correspondence,
    Distribution,
    FalsiflowError,
    SemiparametricModel,
    binary_response_pilot,
    bootstrap,
    core_deficiency_bruteforce,
    empirical,
    entry_game,
    example4_instance,
    line_network_game,
    maximize_dual,
    pilot_distribution,
    pin_latent_distribution,
    primal_lp,
    search_game,
    selection_minimax_check,
    simulate,
    solve_zero_one,
    statistic,
    total_variation,
)

__version__ = "0.1.0"

__all__ = [
    "DENOMINATOR",
    "Correspondence",
    "Distribution",
    "FalsiflowError",
    "SemiparametricModel",
    "binary_response_pilot",
    "bootstrap",
    "core_deficiency_bruteforce",
    "empirical",
    "entry_game",
    "example4_instance",
    "line_network_game",
    "maximize_dual",
    "pilot_distribution",
    "pin_latent_distribution",
    "primal_lp",
    "search_game",
    "selection_minimax_check",
    "simulate",
    "solve_zero_one",
    "statistic",
    "total_variation",
]
