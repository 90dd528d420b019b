// Copyright 2026 The ensembleq developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header for the ensembleq library.

#include "ensembleq/config.hpp"
#include "ensembleq/ensemble.hpp"
#include "ensembleq/measurement.hpp"
#include "ensembleq/operators.hpp"
#include "ensembleq/random.hpp"
#include "ensembleq/reports.hpp"
#include "ensembleq/scenarios.hpp"
#include "ensembleq/space_layout.hpp"
#include "ensembleq/states.hpp"
#include "ensembleq/wavepacket.hpp"
