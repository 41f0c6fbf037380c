# Copyright 2026 The wgcloud Authors.
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

"""Desk-scale controlled-access research cloud simulator."""

from ._wgcloud import (  # noqa: F401
    BackendModel,
    ClusterLayout,
    Simulation,
    WgError,
    __version__,
    backend_bytes,
    client_throughput,
    crossover_size,
    default_calibrated_model,
    hpl_matrix_size,
    parse_image_name,
    percent_of_peak,
    rs_decode,
    rs_encode,
    run_cli,
    virtualization_loss,
)

__all__ = [
    "BackendModel",
    "ClusterLayout",
    "Simulation",
    "WgError",
    "backend_bytes",
    "client_throughput",
    "crossover_size",
    "default_calibrated_model",
    "hpl_matrix_size",
    "parse_image_name",
    "percent_of_peak",
    "rs_decode",
    "rs_encode",
    "run_cli",
    "virtualization_loss",
]
