// Copyright 2026 The qmlsim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qmlsim/channels.hpp"
#include "qmlsim/circuit.hpp"
#include "qmlsim/cost.hpp"
#include "qmlsim/dataset.hpp"
#include "qmlsim/device.hpp"
#include "qmlsim/errors.hpp"
#include "qmlsim/evaluate.hpp"
#include "qmlsim/gates.hpp"
#include "qmlsim/layers.hpp"
#include "qmlsim/metrics.hpp"
#include "qmlsim/model.hpp"
#include "qmlsim/rng.hpp"
#include "qmlsim/state.hpp"
#include "qmlsim/training.hpp"
#include "qmlsim/transpiler.hpp"
#include "qmlsim/version.hpp"
